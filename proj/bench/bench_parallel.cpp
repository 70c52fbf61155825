#include <benchmark/benchmark.h>
#include <omp.h>

#include "hnls/stepper.hpp"
#include "hnls/transform.hpp"

using namespace hnls;

namespace {

PhysicsParams params() {
  PhysicsParams p;
  p.alpha = 2.0;
  p.delta = 8.0;
  p.r = 1.0;
  return p;
}

const Kernel& kernel() {
  static const Kernel k = solve_kernel(params());
  return k;
}

void threads(benchmark::State& st) { omp_set_num_threads(static_cast<int>(st.range(1))); }

void BM_upsilon_serial(benchmark::State& st) {
  const Grid g{static_cast<int>(st.range(0)), params().L};
  for (auto _ : st) benchmark::DoNotOptimize(serial::build_upsilon(kernel(), g));
}

void BM_upsilon_parallel(benchmark::State& st) {
  threads(st);
  const Grid g{static_cast<int>(st.range(0)), params().L};
  for (auto _ : st) benchmark::DoNotOptimize(build_upsilon(kernel(), g));
}

void BM_residual_serial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(serial::kernel_residual(kernel(), static_cast<int>(st.range(0))));
}

void BM_residual_parallel(benchmark::State& st) {
  threads(st);
  for (auto _ : st) benchmark::DoNotOptimize(kernel_residual(kernel(), static_cast<int>(st.range(0))));
}

struct JacobianData {
  Eigen::MatrixXcd LK, CK;
  Eigen::VectorXd a;
  Eigen::VectorXcd b;
  explicit JacobianData(int M)
      : LK(Eigen::MatrixXcd::Random(M, M)),
        CK(Eigen::MatrixXcd::Random(M, M)),
        a(Eigen::VectorXd::Random(M)),
        b(Eigen::VectorXcd::Random(M)) {}
};

void BM_jacobian_serial(benchmark::State& st) {
  const JacobianData d(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(serial::assemble_newton_jacobian(d.LK, d.CK, d.a, d.b));
}

void BM_jacobian_parallel(benchmark::State& st) {
  threads(st);
  const JacobianData d(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(assemble_newton_jacobian(d.LK, d.CK, d.a, d.b));
}

}  // namespace

BENCHMARK(BM_upsilon_serial)->Arg(201)->Arg(1001)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_upsilon_parallel)->ArgsProduct({{201, 1001}, {1, 2, 4}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_residual_serial)->Arg(51)->Arg(201)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_residual_parallel)->ArgsProduct({{51, 201}, {1, 2, 4}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_jacobian_serial)->Arg(201)->Arg(1001)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_jacobian_parallel)->ArgsProduct({{201, 1001}, {1, 2, 4}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
