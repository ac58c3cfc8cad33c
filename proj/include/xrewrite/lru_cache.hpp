#pragma once

#include <atomic>
#include <cstddef>
#include <list>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <utility>

namespace xr {

// Mutex-guarded LRU map shared by rewriter workers. A miss is always safe.
template <class K, class V, class Hash = std::hash<K>>
class LruCache {
public:
    explicit LruCache(size_t capacity = 1024) : capacity_(capacity) {}

    std::optional<V> get(const K& key) {
        std::lock_guard lock(mu_);
        auto it = index_.find(key);
        if (it == index_.end()) {
            ++misses_;
            return std::nullopt;
        }
        order_.splice(order_.begin(), order_, it->second);
        ++hits_;
        return it->second->second;
    }

    void put(const K& key, V value) {
        if (capacity_ == 0) return;
        std::lock_guard lock(mu_);
        auto it = index_.find(key);
        if (it != index_.end()) {
            it->second->second = std::move(value);
            order_.splice(order_.begin(), order_, it->second);
            return;
        }
        order_.emplace_front(key, std::move(value));
        index_.emplace(order_.front().first, order_.begin());
        if (order_.size() > capacity_) {
            index_.erase(order_.back().first);
            order_.pop_back();
        }
    }

    size_t size() const {
        std::lock_guard lock(mu_);
        return order_.size();
    }
    size_t capacity() const { return capacity_; }
    size_t hits() const { return hits_; }
    size_t misses() const { return misses_; }

private:
    size_t capacity_;
    mutable std::mutex mu_;
    std::list<std::pair<K, V>> order_;
    std::unordered_map<K, typename std::list<std::pair<K, V>>::iterator, Hash> index_;
    std::atomic<size_t> hits_{0}, misses_{0};
};

}  // namespace xr
