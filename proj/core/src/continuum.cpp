#include "chiralab/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <atomic>
#include <random>
#include <thread>

namespace chiralab {

void ProfileProblem::validate() const {
    if (std::abs(q_minus.norm() - 1.0) > 1e-9 || std::abs(q_plus.norm() - 1.0) > 1e-9)
        throw ParameterError("profile problem needs unit q_minus, q_plus");
    if (!(t_span > 4.0)) throw ParameterError("profile problem needs t_span > 4");
    if (!(h > 0.0) || h > t_span / 8.0) throw ParameterError("profile problem step too large");
}

double continuum_energy(const ContinuumProfile& profile, const PenaltySpec* pen) {
    const auto& w = profile.w;
    if (w.size() < 3) throw DimensionError("continuum energy needs at least 3 samples");
    double h = profile.dt;
    KahanSum well, dir;
    for (std::size_t j = 0; j < w.size(); ++j) {
        double n2 = w[j].norm2();
        double v = (n2 - 1.0) * (n2 - 1.0);
        if (pen) v += (*pen)(w[j]) / 2.0;
        well.add((j == 0 || j + 1 == w.size()) ? 0.5 * v : v);
    }
    for (std::size_t j = 0; j + 1 < w.size(); ++j) dir.add((w[j + 1] - w[j]).norm2());
    return h * well.value() + dir.value() / h;
}

namespace {

// Discrete objective of the solver: w on midpoints from consecutive cross
// products, well (+G/2) by the midpoint rule, gradient part by differences
// of midpoint values at interior nodes.
struct LiftObjective {
    double h;
    const PenaltySpec* pen = nullptr;  // soft term, already meaning G/2

    double energy(const std::vector<Vec3>& u, std::vector<Vec3>* w_buf = nullptr) const {
        std::size_t m = u.size() - 1;
        std::vector<Vec3> local;
        std::vector<Vec3>& w = w_buf ? *w_buf : local;
        w.resize(m);
        for (std::size_t j = 0; j < m; ++j) w[j] = u[j].cross(u[j + 1]) / h;
        KahanSum well, dir;
        for (std::size_t j = 0; j < m; ++j) {
            double n2 = w[j].norm2();
            double v = (n2 - 1.0) * (n2 - 1.0);
            if (pen) v += (*pen)(w[j]) / 2.0;
            well.add(v);
        }
        for (std::size_t j = 0; j + 1 < m; ++j) dir.add((w[j + 1] - w[j]).norm2());
        return h * well.value() + dir.value() / h;
    }

    void gradient(const std::vector<Vec3>& u, const std::vector<Vec3>& w,
                  std::vector<Vec3>& gu) const {
        std::size_t m = w.size();
        std::vector<Vec3> gw(m);
        for (std::size_t j = 0; j < m; ++j) {
            double n2 = w[j].norm2();
            gw[j] = w[j] * (4.0 * h * (n2 - 1.0));
            if (pen) gw[j] += pen->gradient(w[j]) * (h / 2.0);
        }
        for (std::size_t j = 0; j + 1 < m; ++j) {
            Vec3 d = (w[j + 1] - w[j]) * (2.0 / h);
            gw[j] -= d;
            gw[j + 1] += d;
        }
        gu.assign(u.size(), Vec3{});
        for (std::size_t j = 0; j < m; ++j) {
            gu[j] += u[j + 1].cross(gw[j]) / h;
            gu[j + 1] += gw[j].cross(u[j]) / h;
        }
    }
};

struct Grid {
    double t_lo, h;
    std::size_t n;  // node count
    double t(std::size_t j) const { return t_lo + h * static_cast<double>(j); }
};

std::vector<bool> frozen_mask(const Grid& g) {
    std::vector<bool> frozen(g.n, false);
    double lo = g.t_lo + 2.0, hi = g.t(g.n - 1) - 2.0;
    for (std::size_t j = 0; j < g.n; ++j) frozen[j] = (g.t(j) <= lo || g.t(j) >= hi);
    return frozen;
}

std::vector<Vec3> init_from_profile(const Grid& g, const ContinuumProfile& prof, double shift) {
    std::vector<Vec3> u(g.n);
    for (std::size_t j = 0; j < g.n; ++j) u[j] = prof.eval_u(g.t(j) + shift).normalized();
    return u;
}

struct AnglesParam {
    std::vector<Rotation> frames;
    std::vector<std::size_t> labels;
    std::vector<double> angles;
    void write(std::vector<Vec3>& u) const {
        for (std::size_t j = 0; j < u.size(); ++j)
            u[j] = frames[labels[j]] * Vec3{std::cos(angles[j]), std::sin(angles[j]), 0.0};
    }
    Vec3 tangent(std::size_t j) const {
        return frames[labels[j]] * Vec3{-std::sin(angles[j]), std::cos(angles[j]), 0.0};
    }
};

struct RunResult {
    std::vector<Vec3> u;
    double energy = 0.0;
    bool converged = false;
    int iterations = 0;
    double grad_norm = 0.0;
};

RunResult descend_lift(std::vector<Vec3> u, const LiftObjective& obj,
                       const std::vector<bool>& frozen, const SolveOptions& o) {
    RunResult r;
    std::vector<Vec3> w, g, cand;
    double f = obj.energy(u, &w);
    auto grad = [&](const std::vector<Vec3>& uu, const std::vector<Vec3>& ww,
                    std::vector<Vec3>& gg) {
        obj.gradient(uu, ww, gg);
        for (std::size_t j = 0; j < uu.size(); ++j)
            gg[j] = frozen[j] ? Vec3{} : gg[j] - uu[j] * gg[j].dot(uu[j]);
    };
    grad(u, w, g);
    double step = 1e-3;
    std::vector<Vec3> prev_u, prev_g;
    bool has_prev = false;
    cand = u;
    int it = 0;
    double f_window = f;
    for (; it < o.max_iters; ++it) {
        double gn = 0.0, gsq = 0.0;
        for (const auto& v : g) {
            gn = std::max(gn, std::max(std::abs(v.x), std::max(std::abs(v.y), std::abs(v.z))));
            gsq += v.norm2();
        }
        r.grad_norm = gn;
        if (gn <= o.grad_tol) {
            r.converged = true;
            break;
        }
        if (it % 300 == 299) {  // stop once the value stagnates
            if (f_window - f <= 1e-12 * std::max(1.0, std::abs(f))) break;
            f_window = f;
        }
        if (has_prev) {
            double sy = 0.0, ss = 0.0;
            for (std::size_t j = 0; j < u.size(); ++j) {
                Vec3 s = u[j] - prev_u[j];
                Vec3 y = g[j] - prev_g[j];
                sy += s.dot(y);
                ss += s.dot(s);
            }
            if (sy > 1e-300) step = std::clamp(ss / sy, 1e-16, 1e6);
        }
        double t = step;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            for (std::size_t j = 0; j < u.size(); ++j)
                cand[j] = frozen[j] ? u[j] : (u[j] - g[j] * t).normalized();
            double fc = obj.energy(cand);
            if (fc <= f - 1e-4 * t * gsq) {
                prev_u = u;
                prev_g = g;
                has_prev = true;
                step = t;
                u.swap(cand);
                f = fc;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;  // at the floating-point floor
        f = obj.energy(u, &w);
        grad(u, w, g);
    }
    r.u = std::move(u);
    r.energy = f;
    r.iterations = it;
    return r;
}

RunResult descend_hard(AnglesParam ap, std::size_t n, const LiftObjective& obj,
                       const std::vector<bool>& frozen, const SolveOptions& o) {
    RunResult r;
    std::vector<Vec3> u(n), w, ge;
    std::vector<double> g(n), cand_a(n);
    ap.write(u);
    double f = obj.energy(u, &w);
    auto grad = [&]() {
        obj.gradient(u, w, ge);
        for (std::size_t j = 0; j < n; ++j) g[j] = frozen[j] ? 0.0 : ge[j].dot(ap.tangent(j));
    };
    grad();
    double step = 1e-3;
    std::vector<double> prev_a, prev_g;
    bool has_prev = false;
    int it = 0;
    double f_window = f;
    for (; it < o.max_iters; ++it) {
        double gn = 0.0, gsq = 0.0;
        for (double v : g) {
            gn = std::max(gn, std::abs(v));
            gsq += v * v;
        }
        r.grad_norm = gn;
        if (gn <= o.grad_tol) {
            r.converged = true;
            break;
        }
        if (it % 300 == 299) {
            if (f_window - f <= 1e-12 * std::max(1.0, std::abs(f))) break;
            f_window = f;
        }
        if (has_prev) {
            double sy = 0.0, ss = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                double s = ap.angles[j] - prev_a[j];
                double y = g[j] - prev_g[j];
                sy += s * y;
                ss += s * s;
            }
            if (sy > 1e-300) step = std::clamp(ss / sy, 1e-16, 1e6);
        }
        double t = step;
        bool accepted = false;
        AnglesParam cnd = ap;
        std::vector<Vec3> uc(n);
        for (int bt = 0; bt < 60; ++bt) {
            for (std::size_t j = 0; j < n; ++j) cand_a[j] = ap.angles[j] - t * g[j];
            cnd.angles = cand_a;
            cnd.write(uc);
            double fc = obj.energy(uc);
            if (fc <= f - 1e-4 * t * gsq) {
                prev_a = ap.angles;
                prev_g = g;
                has_prev = true;
                step = t;
                ap.angles = cand_a;
                u.swap(uc);
                f = fc;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;
        f = obj.energy(u, &w);
        grad();
    }
    r.u = std::move(u);
    r.energy = f;
    r.iterations = it;
    return r;
}

}  // namespace

SolveResult solve_profile(const ProfileProblem& problem, const SolveOptions& options) {
    problem.validate();
    Vec3 qm = problem.q_minus.normalized(), qp = problem.q_plus.normalized();
    Grid grid;
    grid.h = problem.h;
    std::size_t half = static_cast<std::size_t>(std::llround(problem.t_span / problem.h));
    grid.t_lo = -grid.h * static_cast<double>(half);
    grid.n = 2 * half + 1;

    const bool soft = problem.pen.has_value();
    const bool hard = !soft && problem.constraint == ProfileProblem::Constraint::HardMk;
    LiftObjective obj{grid.h, soft ? &*problem.pen : nullptr};
    std::vector<bool> frozen = frozen_mask(grid);

    bool same_endpoint = (qm - qp).norm() < 1e-12;
    ContinuumProfile tanh_init;
    if (!same_endpoint) tanh_init = tanh_profile(qm, qp, problem.t_span + 4.0, 2e-3);
    // free problems spread the axis rotation over the whole window; soft ones
    // start from a compact rotation whose length the descent can still grow
    double rho = soft ? std::min(8.0, problem.t_span - 6.0)
                      : std::max(2.0, 2.0 * problem.t_span - 10.0);
    ContinuumProfile zc_init = zero_cost_profile(qm, qp, rho);

    // circle set for the hard constraint: one circle for collinear endpoints,
    // otherwise the two circles of the endpoints
    std::optional<PenaltySpec> circles;
    if (hard)
        circles = PenaltySpec::dist_to_axes(qm.cross(qp).norm() < 1e-12
                                                ? std::vector<Vec3>{qm}
                                                : std::vector<Vec3>{qm, qp});

    SolveResult best;
    bool first = true;
    for (std::uint64_t seed : options.seeds) {
        std::vector<Vec3> u0;
        if ((hard || soft) && !same_endpoint) {
            // seeds 1: tanh lift, 2: rotating-axis lift, 3: jittered tanh lift
            if (seed % 3 == 2 && !hard)
                u0 = init_from_profile(grid, zc_init, rho / 2.0);
            else
                u0 = init_from_profile(grid, tanh_init, 0.0);
        } else {
            u0 = init_from_profile(grid, zc_init, rho / 2.0);
        }
        if (seed % 3 == 0) {
            std::mt19937_64 rng(seed);
            std::normal_distribution<double> gauss(0.0, 0.02);
            for (std::size_t j = 0; j < grid.n; ++j) {
                if (frozen[j]) continue;
                Vec3 xi{gauss(rng), gauss(rng), gauss(rng)};
                u0[j] = (u0[j] + xi - u0[j] * xi.dot(u0[j])).normalized();
            }
        }

        RunResult run;
        if (hard) {
            AnglesParam ap;
            ap.frames.reserve(circles->k());
            for (const auto& q : circles->axes()) ap.frames.push_back(Rotation::between(kE3, q));
            ap.labels.resize(grid.n);
            ap.angles.resize(grid.n);
            for (std::size_t j = 0; j < grid.n; ++j) {
                std::size_t l = circles->nearest_circle(u0[j]);
                Vec3 q = circles->axes()[l];
                Vec3 pr = u0[j] - q * u0[j].dot(q);
                Vec3 on = pr.norm() > 1e-12 ? pr.normalized() : ap.frames[l] * kE1;
                Vec3 a = ap.frames[l].transposed() * on;
                ap.labels[j] = l;
                ap.angles[j] = std::atan2(a.y, a.x);
            }
            run = descend_hard(ap, grid.n, obj, frozen, options);
        } else {
            run = descend_lift(std::move(u0), obj, frozen, options);
        }
        if (first || run.energy < best.energy) {
            first = false;
            best.energy = run.energy;
            best.converged = run.converged;
            best.iterations = run.iterations;
            best.grad_norm = run.grad_norm;
            best.best_seed = seed;
            best.profile = ContinuumProfile::from_samples(grid.t_lo, grid.h, run.u);
        }
    }
    return best;
}

HgTable h_g_table(const PenaltySpec& pen, const SolveOptions& options, double t_span, double h,
                  int threads) {
    HgTable table;
    table.axes = pen.signed_axes();
    std::size_t n = table.axes.size();
    table.value.assign(n, std::vector<double>(n, 0.0));
    table.asym_flag.assign(n, std::vector<bool>(n, false));
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) pairs.emplace_back(i, j);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t k = next.fetch_add(1);
            if (k >= pairs.size()) return;
            auto [i, j] = pairs[k];
            ProfileProblem prob;
            prob.q_minus = table.axes[i];
            prob.q_plus = table.axes[j];
            prob.pen = pen;
            prob.t_span = t_span;
            prob.h = h;
            table.value[i][j] = solve_profile(prob, options).energy;
        }
    };
    int nthreads = std::max(1, threads);
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            table.max_entry = std::max(table.max_entry, table.value[i][j]);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            double d = std::abs(table.value[i][j] - table.value[j][i]);
            double m = std::max(table.value[i][j], table.value[j][i]);
            if (m > 0 && d > 0.02 * m) table.asym_flag[i][j] = true;
        }
    return table;
}

}  // namespace chiralab
