#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "chiralab/acceptance.hpp"
#include "chiralab/continuum.hpp"
#include "chiralab/io.hpp"
#include "chiralab/minimize.hpp"
#include "chiralab/profiles.hpp"
#include "chiralab/sweep.hpp"

namespace {

using namespace chiralab;

Vec3 parse_vec3(const std::string& s) {
    std::istringstream is(s);
    Vec3 v;
    if (!(is >> v.x >> v.y >> v.z)) throw ParameterError("expected three components: " + s);
    return v;
}

std::vector<Vec3> parse_axes(const std::string& s) {
    std::vector<Vec3> out;
    std::istringstream is(s);
    std::string part;
    while (std::getline(is, part, '|')) out.push_back(parse_vec3(part));
    return out;
}

void write_or_print(const std::string& out_path, const std::string& content) {
    if (out_path.empty())
        std::cout << content;
    else
        write_text_file(out_path, content);
}

SpinChain load_chain(const std::string& path, double lambda, const std::string& boundary,
                     const std::string& pins_left, const std::string& pins_right) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open chain file " + path);
    Boundary b = Boundary::free();
    if (boundary == "periodic") b = Boundary::periodic();
    if (boundary == "pinned") b = Boundary::pinned(parse_vec3(pins_left), parse_vec3(pins_right));
    return read_chain(f, lambda, b);
}

std::string report_csv(const std::string& run_id, const ModelParams& p, const MinimizeReport& rep,
                       double yvar, std::uint64_t seed, long long wall_ms) {
    SweepResult res;
    SweepRow row;
    row.run_id = run_id;
    row.regime = "minimize";
    row.n = 0;
    row.lambda = p.lambda;
    row.delta = p.delta;
    row.mu = p.mu;
    row.p_n = p.mu > 0 ? p.p_n() : 0.0;
    row.beta_n = p.beta_n();
    row.energy = rep.final_energy;
    row.energy_scaled = rep.scaled_energy;
    row.well_term = rep.breakdown.well_term;
    row.gradient_term = rep.breakdown.gradient_term;
    row.penalty_term = rep.breakdown.penalty_term;
    row.y_variation = yvar;
    row.iterations = rep.iterations;
    row.converged = rep.converged;
    row.grad_norm = rep.grad_norm;
    row.seed = seed;
    row.wall_ms = wall_ms;
    res.rows.push_back(row);
    return sweep_csv(res);
}

int main_impl(int argc, char** argv) {
    CLI::App app{"chiralab: frustrated spin-chain energies, chirality transitions, and their"
                 " continuum limits"};
    app.require_subcommand(1);
    app.fallthrough();

    int threads = 1;
    app.add_option("--threads", threads, "worker threads for sweeps and tables");

    // ---- energy ----
    auto* cmd_energy = app.add_subcommand("energy", "evaluate chain energies and the breakdown");
    std::string e_chain, e_boundary = "free", e_axes, e_pin_l = "0 0 1", e_pin_r = "0 0 1";
    double e_lambda = 0, e_delta = 0, e_j2 = 0, e_mu = 0, e_j0 = -1;
    std::string e_out;
    cmd_energy->add_option("--chain", e_chain, "chain file (3 columns per site)")->required();
    cmd_energy->add_option("--lambda", e_lambda, "lattice spacing")->required();
    cmd_energy->add_option("--delta", e_delta, "distance to the transition point")->required();
    cmd_energy->add_option("--j2", e_j2, "vertical coupling");
    cmd_energy->add_option("--j0", e_j0, "horizontal NN coupling (default 4(1-delta))");
    cmd_energy->add_option("--mu", e_mu, "penalty weight");
    cmd_energy->add_option("--axes", e_axes, "penalty axes 'x y z | x y z | ...'");
    cmd_energy->add_option("--boundary", e_boundary, "free|periodic|pinned");
    cmd_energy->add_option("--pin-left", e_pin_l, "left chirality pin (pinned boundary)");
    cmd_energy->add_option("--pin-right", e_pin_r, "right chirality pin (pinned boundary)");
    cmd_energy->add_option("--out", e_out, "output path (default stdout)");

    // ---- minimize ----
    auto* cmd_min = app.add_subcommand("minimize", "minimize a chain energy");
    std::string m_chain, m_mode = "free", m_axes, m_boundary = "free";
    std::string m_pin_l = "0 0 1", m_pin_r = "0 0 -1", m_out, m_report;
    double m_lambda = 0, m_delta = 0, m_mu = 0, m_grad_tol = 1e-9;
    long long m_iters = 20000;
    std::uint64_t m_seed = 1;
    bool m_anneal = false;
    cmd_min->add_option("--chain", m_chain, "initial chain file")->required();
    cmd_min->add_option("--lambda", m_lambda)->required();
    cmd_min->add_option("--delta", m_delta)->required();
    cmd_min->add_option("--mu", m_mu, "penalty weight (soft mode)");
    cmd_min->add_option("--mode", m_mode, "free|hard|soft");
    cmd_min->add_option("--axes", m_axes, "penalty axes for hard/soft modes");
    cmd_min->add_option("--boundary", m_boundary, "free|periodic|pinned");
    cmd_min->add_option("--pin-left", m_pin_l);
    cmd_min->add_option("--pin-right", m_pin_r);
    cmd_min->add_option("--max-iters", m_iters);
    cmd_min->add_option("--grad-tol", m_grad_tol);
    cmd_min->add_option("--seed", m_seed);
    cmd_min->add_flag("--anneal", m_anneal, "Metropolis preconditioning before descent");
    cmd_min->add_option("--out", m_out, "write the minimized chain here");
    cmd_min->add_option("--report", m_report, "write the CSV report here (default stdout)");

    // ---- profile ----
    auto* cmd_prof = app.add_subcommand("profile", "solve a continuum optimal-profile problem");
    std::string p_qm = "0 0 1", p_qp = "0 0 -1", p_constraint = "free", p_axes, p_out;
    double p_tspan = 20.0, p_h = 5e-3;
    cmd_prof->add_option("--qminus", p_qm, "left chirality limit");
    cmd_prof->add_option("--qplus", p_qp, "right chirality limit");
    cmd_prof->add_option("--constraint", p_constraint, "free|hard|soft");
    cmd_prof->add_option("--axes", p_axes, "penalty axes (soft) ");
    cmd_prof->add_option("--tspan", p_tspan);
    cmd_prof->add_option("--step", p_h, "grid step");
    cmd_prof->add_option("--out", p_out, "write the solved profile here");

    // ---- hgtable ----
    auto* cmd_hg = app.add_subcommand("hgtable", "solve h_G for every ordered axis pair");
    std::string hg_axes, hg_out;
    double hg_tspan = 20.0, hg_h = 5e-3, hg_scale = 1.0;
    cmd_hg->add_option("--axes", hg_axes, "penalty axes 'x y z | x y z'")->required();
    cmd_hg->add_option("--scale", hg_scale, "penalty scale factor");
    cmd_hg->add_option("--tspan", hg_tspan);
    cmd_hg->add_option("--step", hg_h, "grid step");
    cmd_hg->add_option("--out", hg_out, "CSV output path (default stdout)");

    // ---- sweep ----
    auto* cmd_sweep = app.add_subcommand("sweep", "run a configuration-driven regime sweep");
    std::string s_config, s_out;
    std::uint64_t s_seed = 0;
    bool s_seed_set = false;
    cmd_sweep->add_option("--config", s_config, "sweep config file")->required();
    cmd_sweep->add_option("--out", s_out, "CSV output path (overrides sweep.out)");
    cmd_sweep->add_option("--seed", s_seed, "override sweep.seed")->each([&](const std::string&) {
        s_seed_set = true;
    });

    // ---- accept ----
    auto* cmd_accept = app.add_subcommand("accept", "run the acceptance criteria");
    std::string a_only;
    cmd_accept->add_option("--only", a_only, "run a single criterion id (1..9)");

    // ---- emit ----
    auto* cmd_emit = app.add_subcommand("emit", "emit analytic profiles and chains");
    std::string em_kind, em_out, em_q1 = "0 0 1", em_q2 = "0 0 -1";
    double em_rho = 16.0, em_tspan = 12.0, em_eps = 0.1, em_eta = 0.2;
    double em_delta = 1e-2, em_lambda = 1e-3;
    long long em_sites = 1001;
    bool em_sampled = false;
    cmd_emit->add_option("--kind", em_kind, "tanh|zerocost|soft|helix|oscillating")->required();
    cmd_emit->add_option("--q1", em_q1, "first chirality / axis");
    cmd_emit->add_option("--q2", em_q2, "second chirality / axis");
    cmd_emit->add_option("--rho", em_rho, "zerocost transition length");
    cmd_emit->add_option("--tspan", em_tspan, "tanh truncation span");
    cmd_emit->add_option("--eps", em_eps, "soft profile ramp width");
    cmd_emit->add_option("--eta", em_eta, "oscillation half period");
    cmd_emit->add_option("--delta", em_delta);
    cmd_emit->add_option("--lambda", em_lambda);
    cmd_emit->add_option("--sites", em_sites, "helix site count");
    cmd_emit->add_flag("--sampled", em_sampled, "emit the sampled chain instead of the profile");
    cmd_emit->add_option("--out", em_out, "output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    if (cmd_energy->parsed()) {
        SpinChain chain = load_chain(e_chain, e_lambda, e_boundary, e_pin_l, e_pin_r);
        ModelParams p;
        p.lambda = e_lambda;
        p.delta = e_delta;
        p.j2 = e_j2;
        p.mu = e_mu;
        p.j0 = e_j0;
        EnergyBreakdown b = sandwich_terms_unchecked(chain, p);
        std::ostringstream os;
        os << "energy=" << format_full(chain_energy(chain, p)) << '\n'
           << "energy_scaled=" << format_full(chain_energy_scaled(chain, p)) << '\n';
        if (!e_axes.empty()) {
            PenaltySpec pen = PenaltySpec::dist_to_axes(parse_axes(e_axes));
            os << "penalty=" << format_full(penalty_energy(chain, p, pen)) << '\n';
            b.penalty_term = penalty_energy(chain, p, pen) / p.energy_scale();
        }
        std::ostringstream bs;
        write_breakdown(bs, b);
        os << bs.str();
        write_or_print(e_out, os.str());
        return 0;
    }

    if (cmd_min->parsed()) {
        auto t0 = std::chrono::steady_clock::now();
        SpinChain chain = load_chain(m_chain, m_lambda, m_boundary, m_pin_l, m_pin_r);
        ModelParams p;
        p.lambda = m_lambda;
        p.delta = m_delta;
        p.mu = m_mu;
        MinimizeOptions o;
        o.max_iters = static_cast<int>(m_iters);
        o.grad_tol = m_grad_tol;
        o.seed = m_seed;
        o.pin_ends = m_boundary == "pinned";
        if (m_mode == "free")
            o.mode = MinimizeMode::free_mode();
        else if (m_mode == "hard")
            o.mode = MinimizeMode::hard_mk(PenaltySpec::dist_to_axes(parse_axes(m_axes)));
        else if (m_mode == "soft")
            o.mode = MinimizeMode::soft_g(PenaltySpec::dist_to_axes(parse_axes(m_axes)));
        else
            throw ParameterError("unknown mode " + m_mode);
        if (m_anneal) {
            o.anneal = AnnealOptions{};
            chain = anneal(chain, p, o);
        }
        auto [out, rep] = minimize_chain(std::move(chain), p, o);
        auto t1 = std::chrono::steady_clock::now();
        if (!m_out.empty()) {
            std::ofstream f(m_out);
            write_chain(f, out);
        }
        long long ms = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
        write_or_print(m_report, report_csv("minimize", p, rep, 0.0, m_seed, ms));
        return rep.converged ? 0 : 2;
    }

    if (cmd_prof->parsed()) {
        ProfileProblem prob;
        prob.q_minus = parse_vec3(p_qm).normalized();
        prob.q_plus = parse_vec3(p_qp).normalized();
        prob.t_span = p_tspan;
        prob.h = p_h;
        if (p_constraint == "hard")
            prob.constraint = ProfileProblem::Constraint::HardMk;
        else if (p_constraint == "soft")
            prob.pen = PenaltySpec::dist_to_axes(parse_axes(p_axes));
        else if (p_constraint != "free")
            throw ParameterError("unknown constraint " + p_constraint);
        SolveResult res = solve_profile(prob);
        std::cout << "energy=" << format_full(res.energy) << "\nconverged=" << res.converged
                  << "\niterations=" << res.iterations << "\n";
        if (!p_out.empty()) {
            std::ofstream f(p_out);
            write_profile(f, res.profile);
        }
        return 0;
    }

    if (cmd_hg->parsed()) {
        PenaltySpec pen = PenaltySpec::dist_to_axes(parse_axes(hg_axes), hg_scale);
        HgTable table = h_g_table(pen, SolveOptions{}, hg_tspan, hg_h, threads);
        std::ostringstream os;
        write_hg_table(os, table);
        write_or_print(hg_out, os.str());
        return 0;
    }

    if (cmd_sweep->parsed()) {
        SweepConfig cfg = SweepConfig::from_config(Config::load(s_config));
        if (s_seed_set) cfg.seed = s_seed;
        if (!s_out.empty()) cfg.output_path = s_out;
        SweepResult res = run_sweep(cfg, threads);
        std::string csv = sweep_csv(res);
        if (cfg.output_path.empty())
            std::cout << csv;
        else
            write_text_file(cfg.output_path, csv);
        return res.all_converged ? 0 : 2;
    }

    if (cmd_accept->parsed()) {
        AcceptanceOptions o;
        o.only = a_only;
        o.threads = threads;
        if (const char* env = std::getenv("CHIRALAB_TOL_OVERRIDE")) o.tol_scale = std::atof(env);
        int failures = run_acceptance(std::cout, o);
        return failures == 0 ? 0 : 1;
    }

    if (cmd_emit->parsed()) {
        std::ostringstream os;
        auto emit_profile_or_chain = [&](const ContinuumProfile& prof) {
            if (em_sampled) {
                SpinChain c = sample_chain(prof, em_lambda, em_delta, 0.5);
                write_chain(os, c);
            } else {
                write_profile(os, prof);
            }
        };
        if (em_kind == "tanh") {
            emit_profile_or_chain(
                tanh_profile(parse_vec3(em_q1).normalized(), parse_vec3(em_q2).normalized(),
                             em_tspan));
        } else if (em_kind == "zerocost") {
            emit_profile_or_chain(zero_cost_profile(parse_vec3(em_q1).normalized(),
                                                    parse_vec3(em_q2).normalized(), em_rho));
        } else if (em_kind == "soft") {
            emit_profile_or_chain(soft_profile(parse_vec3(em_q1).normalized(),
                                               parse_vec3(em_q2).normalized(), em_eps));
        } else if (em_kind == "helix") {
            SpinChain c = ground_helix(em_delta, Rotation::between(kE3, parse_vec3(em_q1).normalized()),
                                       static_cast<std::size_t>(em_sites), em_lambda);
            write_chain(os, c);
        } else if (em_kind == "oscillating") {
            ModelParams p;
            p.delta = em_delta;
            p.lambda = em_lambda;
            write_chain(os, oscillating_chain(em_eta, p));
        } else {
            throw ParameterError("unknown emit kind " + em_kind);
        }
        write_or_print(em_out, os.str());
        return 0;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return main_impl(argc, argv);
    } catch (const chiralab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
