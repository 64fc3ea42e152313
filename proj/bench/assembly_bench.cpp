#include "tresca/assembly.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace tresca;

namespace {

Discretization make_disc(int dim, int n) {
  ChannelDomain dom;
  dom.dim = dim;
  dom.lower = Vec::Zero(dim - 1);
  dom.upper = Vec::Ones(dim - 1);
  dom.height = [](const Vec& x) { return 1.0 + 0.1 * x(0); };
  dom.resolution = n;
  return Discretization(build_mesh(dom), 4);
}

Eigen::VectorXd random_vector(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

void flow_jacobian(benchmark::State& state, Execution exec) {
  const int dim = static_cast<int>(state.range(0));
  const Discretization disc = make_disc(dim, static_cast<int>(state.range(1)));
  const FlowAssembler assembler(disc, ViscosityModel::temperature_coupled(0.5, 2.0, 1.0, 0.3, 0.2),
                                2.5, 1e-8);
  const Eigen::VectorXd theta = random_vector(disc.num_vertices(), 1);
  const Eigen::VectorXd u = disc.extend_velocity(random_vector(disc.num_velocity_free(), 2));
  const Eigen::VectorXd load;
  for (auto _ : state) {
    FlowOperator op = assembler.evaluate(theta, u, u, load, exec, true);
    benchmark::DoNotOptimize(op.jacobian.valuePtr());
  }
  state.counters["cells"] = static_cast<double>(disc.mesh().num_cells());
}

void heat_matrix(benchmark::State& state, Execution exec) {
  const int dim = static_cast<int>(state.range(0));
  const Discretization disc = make_disc(dim, static_cast<int>(state.range(1)));
  const HeatAssembler heat(disc, Mat::Identity(dim, dim));
  const Eigen::VectorXd u = random_vector(disc.velocity_size(), 3);
  for (auto _ : state) {
    SparseMatrix m = heat.matrix(u, exec);
    benchmark::DoNotOptimize(m.valuePtr());
  }
}

}  // namespace

BENCHMARK_CAPTURE(flow_jacobian, serial, Execution::serial)->Args({2, 32})->Args({3, 8})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(flow_jacobian, parallel, Execution::parallel)->Args({2, 32})->Args({3, 8})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(heat_matrix, serial, Execution::serial)->Args({2, 64})->Args({3, 12})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(heat_matrix, parallel, Execution::parallel)->Args({2, 64})->Args({3, 12})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
