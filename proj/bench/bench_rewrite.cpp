#include <benchmark/benchmark.h>

#include "support.hpp"

using namespace xrt;

namespace {

struct Financial {
    NormalizedOntology onto;
    Query query;
    Financial() {
        auto d = doc(readFile(repoPath("data/financial.dlog")));
        onto = normalizeTGDs(d);
        query = d.queries[0];
    }
};

const Financial& financial() {
    static Financial f;
    return f;
}

void BM_Financial(benchmark::State& state) {
    RewriteOptions o;
    o.elimination = state.range(0) != 0;
    o.parallel = state.range(1) != 0;
    const auto& f = financial();
    RewriteContext ctx(f.onto, o);
    size_t size = 0;
    for (auto _ : state) {
        auto r = rewriteQuery(f.query, ctx);
        size = r.ucq.size();
        benchmark::DoNotOptimize(r);
    }
    state.counters["cqs"] = double(size);
}
BENCHMARK(BM_Financial)->ArgNames({"elim", "par"})->Args({1, 1})->Args({1, 0})->Args({0, 1})->Args({0, 0})
    ->Unit(benchmark::kMillisecond);

void BM_SizeLaw(benchmark::State& state) {
    auto o = onto(sizeLawOntology(size_t(state.range(0))));
    Query q = cq(sizeLawQuery(size_t(state.range(1))));
    RewriteOptions opt;
    opt.elimination = false;
    opt.parallel = false;
    RewriteContext ctx(o, opt);
    size_t size = 0;
    for (auto _ : state) {
        auto r = xrewrite(q, ctx);
        size = r.ucq.size();
        benchmark::DoNotOptimize(r);
    }
    state.counters["cqs"] = double(size);
}
BENCHMARK(BM_SizeLaw)->ArgNames({"m", "n"})->Args({2, 2})->Args({2, 3})->Args({3, 3})->Args({3, 4})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
