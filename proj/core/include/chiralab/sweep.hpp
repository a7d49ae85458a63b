#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chiralab/config.hpp"
#include "chiralab/minimize.hpp"
#include "chiralab/penalty.hpp"

namespace chiralab {

enum class Regime { R_i, R_ii, R_iii, R_iv, HardK, FreeS2, TwoD };

std::string regime_name(Regime r);
Regime regime_from_name(const std::string& name);

/// Sweep plan: closed-form parameter rules in the sequence index n,
///   delta_n = delta0 * ratio^n,  lambda_n = c * delta_n^s,  mu_n = m0 * delta_n^t,
/// plus the penalty/pins and per-run minimizer settings. validate() checks
/// the regime consistency conditions numerically over the n list and rejects
/// inconsistent rule sets before any run starts.
struct SweepConfig {
    Regime regime = Regime::R_iv;
    std::vector<long long> n_values;
    double delta0 = 1e-2, ratio = 0.5;
    double lambda_coeff = 0.05, lambda_exp = 0.5;
    double mu_coeff = 0.0, mu_exp = 2.0;
    std::optional<PenaltySpec> pen;
    std::optional<Vec3> pin_left, pin_right;
    std::uint64_t seed = 1;
    std::string output_path;
    long long max_iters = 20000;  // 0 = evaluate the built state only
    double grad_tol = 1e-9;
    std::size_t grid_width = 64, grid_height = 16;
    double j2_coupling = 10.0;          // TwoD: J2 = j2_coupling * sqrt(delta)/lambda
    double chirality_axis_tilt = 0.4;   // R_i: tilt of the constant-chirality axis

    ModelParams params_for(long long n) const;
    void validate() const;
    static SweepConfig from_config(const Config& cfg);
};

struct SweepRow {
    std::string run_id;
    std::string regime;
    long long n = 0;
    double lambda = 0, delta = 0, mu = 0, p_n = 0, beta_n = 0;
    double energy = 0, energy_scaled = 0;
    double well_term = 0, gradient_term = 0, penalty_term = 0, y_variation = 0;
    long long iterations = 0;
    bool converged = false;
    double grad_norm = 0;
    std::uint64_t seed = 0;
    long long wall_ms = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    bool all_converged = true;
};

/// One row per n: build the regime's initial state, minimize, record.
/// Rows execute as an isolated task pool; output order is by n regardless of
/// the thread count.
SweepResult run_sweep(const SweepConfig& cfg, int threads = 1);

inline constexpr const char* kSweepCsvHeader =
    "run_id,regime,n,lambda,delta,mu,p_n,beta_n,energy,energy_scaled,well_term,gradient_term,"
    "penalty_term,y_variation,iterations,converged,grad_norm,seed,wall_ms";

std::string sweep_csv(const SweepResult& result, bool include_wall_ms = true);

}  // namespace chiralab
