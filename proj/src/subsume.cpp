#include "xrewrite/subsume.hpp"

#include <stdexcept>

namespace xr {

SubsumptionMode parseSubsumptionMode(const std::string& s) {
    if (s == "none") return SubsumptionMode::None;
    if (s == "tail") return SubsumptionMode::Tail;
    if (s == "idec") return SubsumptionMode::IDec;
    if (s == "irew") return SubsumptionMode::IRew;
    throw std::invalid_argument("unknown subsumption mode: " + s);
}

std::string toString(SubsumptionMode m) {
    switch (m) {
        case SubsumptionMode::None: return "none";
        case SubsumptionMode::Tail: return "tail";
        case SubsumptionMode::IDec: return "idec";
        case SubsumptionMode::IRew: return "irew";
    }
    return "none";
}

bool subsumes(const Query& q1, const Query& q2) {
    if (q1.headPred != q2.headPred || q1.head.size() != q2.head.size()) return false;
    Atom h1(q1.headPred, q1.head), h2(q2.headPred, q2.head);
    return findHomomorphism(q1.body, q2.body, std::make_pair(h1, h2)).has_value();
}

std::vector<Query> pruneTail(const std::vector<Query>& ucq) {
    size_t n = ucq.size();
    std::vector<std::string> keys(n);
    for (size_t i = 0; i < n; ++i) keys[i] = canonicalString(ucq[i]);
    std::vector<char> gone(n, 0);
    for (size_t i = 0; i < n; ++i) {
        if (gone[i]) continue;
        for (size_t j = 0; j < n && !gone[i]; ++j) {
            if (i == j || gone[j]) continue;
            if (!subsumes(ucq[j], ucq[i])) continue;
            // j is at least as general as i
            if (subsumes(ucq[i], ucq[j]) && (keys[i] < keys[j] || (keys[i] == keys[j] && i < j))) continue;
            gone[i] = 1;
        }
    }
    std::vector<Query> out;
    for (size_t i = 0; i < n; ++i)
        if (!gone[i]) out.push_back(ucq[i]);
    return out;
}

}  // namespace xr
