#include <benchmark/benchmark.h>

#include "gspace/expr.hpp"
#include "gspace/properties.hpp"
#include "gspace/space.hpp"

namespace {

using namespace gspace;

SampleSet grid(std::size_t n) { return SampleSet::from_region({Box{{-1.0, -1.0}, {1.0, 1.0}, {n, n}}}); }

ScanPolicy policy(Exec exec) { return {exec, 0, 0}; }

// Triangle axiom holds for the Euclidean metric, so the scan never stops early.
void triangle(benchmark::State& st, Exec exec) {
  const GFunction g("g", expr::parse("sqrt((x1-u1)^2+(x2-u2)^2)"), 2);
  const SampleSet s = grid(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    PropertyReport r = falsify_axiom(Axiom::Triangle, g, s, ToleranceSet{}, policy(exec));
    benchmark::DoNotOptimize(r);
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(s.size() * s.size() * s.size()));
}

void coefficient(benchmark::State& st, Exec exec) {
  const GFunction g("g", expr::parse("x1^2-u1^2+x2-u2"), 2);
  const auto s = std::make_shared<const SampleSet>(grid(static_cast<std::size_t>(st.range(0))));
  const MapSpec t = MapSpec::from_exprs("T", {expr::parse("x1/2"), expr::parse("x2/3")}, 2).with_sets(s, s);
  for (auto _ : st) {
    CoefficientEstimate e = estimate_coefficient(g, t, ToleranceSet{}, policy(exec));
    benchmark::DoNotOptimize(e);
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(s->size() * s->size()));
}

BENCHMARK_CAPTURE(triangle, serial, Exec::Serial)->Arg(8)->Arg(12);
BENCHMARK_CAPTURE(triangle, parallel, Exec::Parallel)->Arg(8)->Arg(12);
BENCHMARK_CAPTURE(coefficient, serial, Exec::Serial)->Arg(41)->Arg(81);
BENCHMARK_CAPTURE(coefficient, parallel, Exec::Parallel)->Arg(41)->Arg(81);

}  // namespace

BENCHMARK_MAIN();
