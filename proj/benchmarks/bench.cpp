#include <benchmark/benchmark.h>

#include <cmath>

#include "wirepick/controller.hpp"
#include "wirepick/grasp.hpp"
#include "wirepick/sim_world.hpp"
#include "wirepick/signal.hpp"
#include "wirepick/simulator.hpp"

using namespace wirepick;

static void BM_MedianFilter(benchmark::State& state) {
  std::vector<double> f(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::sin(0.1 * i) + 0.01 * (i % 7);
  const auto trace = ForceTrace::from_forces(Phase::Lift, f);
  for (auto _ : state) benchmark::DoNotOptimize(signal::median_filter(trace, 5));
}
BENCHMARK(BM_MedianFilter)->Arg(100)->Arg(1000);

static void BM_InitWorld(benchmark::State& state) {
  sim::WorldConfig c;
  c.n_objects = static_cast<int>(state.range(0));
  for (auto _ : state) {
    ++c.rng_seed;
    benchmark::DoNotOptimize(sim::init_world(c));
  }
}
BENCHMARK(BM_InitWorld)->Arg(10)->Arg(40);

static void BM_DetectGrasps(benchmark::State& state) {
  sim::WorldConfig c;
  c.n_objects = 40;
  c.rng_seed = 3;
  const auto w = sim::init_world(c);
  const auto depth = sim::render_depth(w, c.camera_pixels, c.camera_pixels, c.camera_resolution());
  const auto gripper = grasp::make_parallel_jaw_template(depth.resolution);
  for (auto _ : state) benchmark::DoNotOptimize(grasp::detect_grasps(depth, gripper));
}
BENCHMARK(BM_DetectGrasps)->Unit(benchmark::kMillisecond);

static void BM_RunAttempt(benchmark::State& state) {
  sim::WorldConfig c;
  c.n_objects = 40;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    state.PauseTiming();
    c.rng_seed = ++seed;
    sim::SimulatedWorld world(c);
    PickingController controller(validate_config({}), Policy::OursA);
    state.ResumeTiming();
    benchmark::DoNotOptimize(controller.run_attempt(world, 0));
  }
}
BENCHMARK(BM_RunAttempt)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
