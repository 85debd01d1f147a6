#include <benchmark/benchmark.h>

#include "rislab/oracle.hpp"
#include "rislab/training.hpp"

namespace {

using namespace rislab;

Matrix noise_matrix(Eigen::Index rows, Eigen::Index cols, SeededRng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

void BM_MlpForward(benchmark::State& state) {
  const SystemConfig sys;
  const auto batch = state.range(0);
  SeededRng rng(1);
  const Mlp net({static_cast<Eigen::Index>(sys.state_dim()), 256, 256, 2 * static_cast<Eigen::Index>(sys.action_dim())},
                OutputActivation::kLinear, rng);
  const Matrix x = noise_matrix(net.input_size(), batch, rng);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(x));
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_MlpForward)->Arg(1)->Arg(16);

void BM_MlpBackward(benchmark::State& state) {
  const SystemConfig sys;
  SeededRng rng(2);
  const Mlp net({static_cast<Eigen::Index>(sys.state_dim() + sys.action_dim()), 256, 256, 1},
                OutputActivation::kLinear, rng);
  const Matrix x = noise_matrix(net.input_size(), 16, rng);
  const MlpTrace trace = net.forward_trace(x);
  const Matrix up = noise_matrix(1, 16, rng);
  for (auto _ : state) benchmark::DoNotOptimize(net.backward(trace, up));
}
BENCHMARK(BM_MlpBackward);

void BM_AdamStep(benchmark::State& state) {
  SeededRng rng(3);
  Mlp net({648, 256, 256, 1}, OutputActivation::kLinear, rng);
  OptimState opt(net, AdamConfig{});
  const Gradients g = net.backward(noise_matrix(648, 16, rng), noise_matrix(1, 16, rng));
  for (auto _ : state) adam_step(opt, net, g, Direction::kDescend);
}
BENCHMARK(BM_AdamStep);

void BM_SumRate(benchmark::State& state) {
  SystemConfig sys;
  sys.elements = static_cast<std::size_t>(state.range(0));
  SeededRng rng(4);
  const ChannelSet ch = generate_channels(sys, rng);
  std::vector<double> raw(sys.action_dim());
  for (auto& x : raw) x = rng.uniform(-1.0, 1.0);
  const DecodedAction a = decode_action(raw, sys);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sum_rate(a.true_phases, ch.cascaded, a.beamformer, sys.noise_power, sys.log_base));
  }
}
BENCHMARK(BM_SumRate)->Arg(16)->Arg(64);

void BM_EnvironmentStep(benchmark::State& state) {
  const SystemConfig sys;
  Environment env(sys);
  SeededRng rng(5);
  env.reset(rng);
  std::vector<double> raw(sys.action_dim());
  for (auto& x : raw) x = rng.uniform(-1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(env.step(raw));
}
BENCHMARK(BM_EnvironmentStep);

void BM_AgentUpdate(benchmark::State& state) {
  SystemConfig sys;
  sys.scenario = Scenario::kMismatch;
  AgentConfig cfg;
  cfg.use_explorer = state.range(0) != 0;
  RunStreams streams(6);
  Agent agent(sys, cfg, streams);
  const auto sd = static_cast<Eigen::Index>(sys.state_dim());
  const auto ad = static_cast<Eigen::Index>(sys.action_dim());
  SeededRng rng(7);
  for (int i = 0; i < 64; ++i) {
    const Vector a = noise_matrix(ad, 1, rng).array().tanh().matrix();
    agent.buffer().push({noise_matrix(sd, 1, rng), a, a, rng.uniform(), noise_matrix(sd, 1, rng)});
  }
  for (auto _ : state) agent.update(0.1, streams);
}
BENCHMARK(BM_AgentUpdate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_RandomSearch(benchmark::State& state) {
  const SystemConfig sys;
  SeededRng rng(8);
  const ChannelSet ch = generate_channels(sys, rng);
  for (auto _ : state) benchmark::DoNotOptimize(oracle::random_search(sys, ch, 1000, rng));
}
BENCHMARK(BM_RandomSearch)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
