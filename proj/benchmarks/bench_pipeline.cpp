#include "cvxc/canon.hpp"
#include "cvxc/cbf.hpp"
#include "cvxc/obligations.hpp"
#include "cvxc/parser.hpp"
#include "cvxc/verify.hpp"

#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

namespace {

std::string fixture(const char* name) {
  std::ifstream in(std::string(CVXC_FIXTURE_DIR) + "/" + name);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

const cvxc::Problem& so1() {
  static const cvxc::Problem p = cvxc::parse_problem(fixture("so1.cvx"));
  return p;
}

void BM_Parse(benchmark::State& state) {
  const std::string text = fixture("so1.cvx");
  for (auto _ : state) benchmark::DoNotOptimize(cvxc::parse_problem(text));
}
BENCHMARK(BM_Parse);

void BM_Canonicalize(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(cvxc::canonicalize(so1()));
}
BENCHMARK(BM_Canonicalize);

void BM_WriteCbf(benchmark::State& state) {
  const auto c = cvxc::canonicalize(so1());
  for (auto _ : state) benchmark::DoNotOptimize(cvxc::write_cbf(c.reduced));
}
BENCHMARK(BM_WriteCbf);

void BM_AtomObligations(benchmark::State& state) {
  const auto& atoms = cvxc::default_registry().atoms();
  cvxc::SampleConfig cfg;
  cfg.samples = static_cast<int>(state.range(0));
  for (auto _ : state)
    for (const auto& d : atoms) benchmark::DoNotOptimize(cvxc::check_atom_obligations(*d, cfg));
}
BENCHMARK(BM_AtomObligations)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_CheckReduction(benchmark::State& state) {
  const auto c = cvxc::canonicalize(so1());
  cvxc::SampleConfig cfg;
  cfg.samples = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cvxc::check_reduction(c, cfg));
}
BENCHMARK(BM_CheckReduction)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_BruteForce(benchmark::State& state) {
  const std::map<std::string, cvxc::Box, std::less<>> boxes{{"x", {-2, 2}}, {"y", {-6, 0}}};
  const int grid = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cvxc::brute_force_optimum(so1(), grid, {}, boxes));
}
BENCHMARK(BM_BruteForce)->Arg(201)->Arg(2001)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
