#include <benchmark/benchmark.h>

#include "chiralab/continuum.hpp"
#include "chiralab/minimize.hpp"
#include "chiralab/profiles.hpp"

using namespace chiralab;

namespace {

ModelParams desk_params(double delta) {
    ModelParams p;
    p.delta = delta;
    p.lambda = 0.05 * std::sqrt(delta);
    return p;
}

void bm_chain_energy(benchmark::State& state) {
    ModelParams p = desk_params(1e-3);
    p.lambda = 1.0 / static_cast<double>(state.range(0));
    SpinChain c = ground_helix(p.delta, Rotation::identity(), state.range(0), p.lambda);
    for (auto _ : state) benchmark::DoNotOptimize(chain_energy(c, p));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_chain_energy)->Arg(1 << 10)->Arg(1 << 14)->Arg(1 << 18);

void bm_chirality(benchmark::State& state) {
    ModelParams p = desk_params(1e-3);
    SpinChain c = ground_helix(p.delta, Rotation::identity(), state.range(0), p.lambda);
    for (auto _ : state) benchmark::DoNotOptimize(chirality(c, p.delta));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_chirality)->Arg(1 << 12)->Arg(1 << 16);

void bm_gradient(benchmark::State& state) {
    ModelParams p = desk_params(1e-3);
    p.mu = 1e-5;
    PenaltySpec pen = PenaltySpec::dist_to_axes({kE3});
    SpinChain c = perturbed(ground_helix(p.delta, Rotation::identity(), state.range(0), p.lambda),
                            0.05, 1);
    MinimizeMode mode = MinimizeMode::soft_g(pen);
    for (auto _ : state) benchmark::DoNotOptimize(gradient(c, p, mode));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_gradient)->Arg(1 << 10)->Arg(1 << 14);

void bm_minimize_step(benchmark::State& state) {
    ModelParams p = desk_params(1e-3);
    SpinChain c = perturbed(ground_helix(p.delta, Rotation::identity(), 2048, p.lambda), 0.05, 1);
    c.boundary = Boundary::periodic();
    MinimizeOptions o;
    o.max_iters = 16;
    for (auto _ : state) {
        auto [out, rep] = minimize_chain(c, p, o);
        benchmark::DoNotOptimize(rep.final_energy);
    }
}
BENCHMARK(bm_minimize_step);

void bm_tanh_sample(benchmark::State& state) {
    ModelParams p = desk_params(1e-3);
    ContinuumProfile prof = tanh_profile(kE3, -kE3, 14.0, 1e-3);
    for (auto _ : state) benchmark::DoNotOptimize(sample_chain(prof, p.lambda, p.delta, 0.5));
}
BENCHMARK(bm_tanh_sample);

void bm_continuum_energy(benchmark::State& state) {
    ContinuumProfile prof = tanh_profile(kE3, -kE3, 12.0, 1e-3);
    for (auto _ : state) benchmark::DoNotOptimize(continuum_energy(prof));
    state.SetItemsProcessed(state.iterations() * prof.size());
}
BENCHMARK(bm_continuum_energy);

}  // namespace

BENCHMARK_MAIN();
