#include "chiralab/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace chiralab {

namespace {

constexpr double kArmijoC = 1e-4;
constexpr int kMaxBacktracks = 60;

struct PinMask {
    std::size_t n = 0;
    bool active = false;
    bool pinned(std::size_t j) const { return active && (j < 2 || j + 2 >= n); }
};

PinMask pin_mask(const SpinChain& chain, const MinimizeOptions& o) {
    bool on = o.pin_ends || chain.boundary.mode == BoundaryMode::PinnedChirality;
    return {chain.size(), on};
}

// Euclidean gradient of the unscaled objective H (+ penalty in soft mode).
void euclid_gradient(const std::vector<Vec3>& u, const ModelParams& p, const MinimizeMode& mode,
                     std::vector<Vec3>& g) {
    std::size_t n = u.size();
    g.assign(n, Vec3{});
    double b = 2.0 * (1.0 - p.delta);
    std::size_t nr = n - 2;  // stencil count
    for (std::size_t i = 0; i < nr; ++i) {
        Vec3 st = (u[i + 2] - u[i + 1] * b + u[i]) * p.lambda;
        g[i] += st;
        g[i + 1] -= st * b;
        g[i + 2] += st;
    }
    if (mode.kind == MinimizeMode::Kind::soft) {
        const PenaltySpec& pen = *mode.pen;
        double c = p.mu * p.lambda;
        for (std::size_t i = 0; i < nr; ++i) {
            Vec3 gg = pen.gradient(u[i].cross(u[i + 1]));
            if (gg.norm2() == 0.0) continue;
            g[i] += u[i + 1].cross(gg) * c;
            g[i + 1] += gg.cross(u[i]) * c;
        }
    }
}

double objective(const SpinChain& chain, const ModelParams& p, const MinimizeMode& mode) {
    double e = chain_energy(chain, p);
    if (mode.kind == MinimizeMode::Kind::soft) e += penalty_energy(chain, p, *mode.pen);
    return e;
}

// Restore (u^1,u^0) = (u^{N-1},u^{N-2}) by moving the last spin inside the
// plane it already spans with its neighbor.
void project_periodic(std::vector<Vec3>& u) {
    std::size_t n = u.size();
    double target = std::clamp(u[1].dot(u[0]), -1.0, 1.0);
    const Vec3& a = u[n - 2];
    Vec3 tangent = u[n - 1] - a * u[n - 1].dot(a);
    if (tangent.norm() < 1e-12) {
        tangent = kE1 - a * a.dot(kE1);
        if (std::abs(a.dot(kE1)) > 0.9) tangent = kE2 - a * a.dot(kE2);
    }
    tangent = tangent.normalized();
    u[n - 1] = a * target + tangent * std::sqrt(std::max(0.0, 1.0 - target * target));
}

struct DescentState {
    double step = 1.0;
    std::vector<Vec3> prev_x, prev_g;
    bool has_prev = false;

    // Safeguarded Barzilai-Borwein step from the last accepted move.
    double propose(const std::vector<Vec3>& x, const std::vector<Vec3>& g) {
        if (has_prev) {
            double sy = 0.0, ss = 0.0;
            for (std::size_t j = 0; j < x.size(); ++j) {
                Vec3 s = x[j] - prev_x[j];
                Vec3 y = g[j] - prev_g[j];
                sy += s.dot(y);
                ss += s.dot(s);
            }
            if (sy > 1e-300) step = std::clamp(ss / sy, 1e-14, 1e8);
        }
        return step;
    }
    void remember(const std::vector<Vec3>& x, const std::vector<Vec3>& g) {
        prev_x = x;
        prev_g = g;
        has_prev = true;
    }
};

std::pair<SpinChain, MinimizeReport> descend_chain(SpinChain chain, const ModelParams& p,
                                                   const MinimizeOptions& o) {
    const double scale = p.energy_scale();
    PinMask pins = pin_mask(chain, o);
    bool periodic = !pins.active && chain.boundary.mode == BoundaryMode::PeriodicScalarProduct;
    chain.renormalize();
    if (periodic) project_periodic(chain.spins);

    MinimizeReport rep;
    std::vector<Vec3> g;
    auto eval_grad = [&](const SpinChain& c, std::vector<Vec3>& out) {
        euclid_gradient(c.spins, p, o.mode, out);
        for (std::size_t j = 0; j < out.size(); ++j) {
            if (pins.pinned(j)) {
                out[j] = Vec3{};
                continue;
            }
            out[j] = (out[j] - c.spins[j] * out[j].dot(c.spins[j])) / scale;
        }
    };

    double f = objective(chain, p, o.mode) / scale;
    eval_grad(chain, g);
    DescentState bb;
    bb.step = o.step_init;
    SpinChain cand = chain;
    rep.stop = StopReason::max_iters;

    int it = 0;
    for (; it < o.max_iters; ++it) {
        double gn = 0.0, gsq = 0.0;
        for (const auto& v : g) {
            gn = std::max(gn, std::max(std::abs(v.x), std::max(std::abs(v.y), std::abs(v.z))));
            gsq += v.norm2();
        }
        rep.grad_norm = gn;
        if (gn <= o.grad_tol) {
            rep.converged = true;
            rep.stop = StopReason::grad_tol;
            break;
        }
        double t = bb.propose(chain.spins, g);
        bool accepted = false;
        for (int bt = 0; bt < kMaxBacktracks; ++bt) {
            for (std::size_t j = 0; j < chain.size(); ++j)
                cand.spins[j] = pins.pinned(j) ? chain.spins[j]
                                               : (chain.spins[j] - g[j] * t).normalized();
            if (periodic) project_periodic(cand.spins);
            double fc = objective(cand, p, o.mode) / scale;
            if (fc <= f - kArmijoC * t * gsq) {
                bb.remember(chain.spins, g);
                bb.step = t;
                chain.spins.swap(cand.spins);
                f = fc;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            rep.stop = StopReason::step_failure;
            break;
        }
        eval_grad(chain, g);
    }
    rep.iterations = it;
    rep.final_energy = f * scale;
    rep.scaled_energy = f;
    rep.breakdown = sandwich_terms_unchecked(chain, p);
    if (o.mode.kind == MinimizeMode::Kind::soft)
        rep.breakdown.penalty_term = penalty_energy(chain, p, *o.mode.pen) / scale;
    rep.breakdown.total = rep.scaled_energy;
    return {std::move(chain), rep};
}

// ---- hard-constraint parametrization -------------------------------------

struct CircleParam {
    std::vector<Rotation> frames;      // R_l with R_l e3 = q_l
    std::vector<std::size_t> labels;   // circle per site
    std::vector<double> angles;        // angle per site

    Vec3 spin(std::size_t j) const {
        return frames[labels[j]] * Vec3{std::cos(angles[j]), std::sin(angles[j]), 0.0};
    }
    Vec3 tangent(std::size_t j) const {
        return frames[labels[j]] * Vec3{-std::sin(angles[j]), std::cos(angles[j]), 0.0};
    }
    void write_to(SpinChain& c) const {
        for (std::size_t j = 0; j < labels.size(); ++j) c.spins[j] = spin(j);
    }
};

CircleParam circle_param(const SpinChain& chain, const PenaltySpec& pen) {
    CircleParam cp;
    cp.frames.reserve(pen.k());
    for (const auto& q : pen.axes()) cp.frames.push_back(Rotation::between(kE3, q));
    cp.labels.resize(chain.size());
    cp.angles.resize(chain.size());
    for (std::size_t j = 0; j < chain.size(); ++j) {
        double d = pen.distance_to_circles(chain.spins[j]);
        if (d > kMembershipTol)
            throw ConstraintError("minimize_hard init: spin " + std::to_string(j) +
                                  " off M_k by " + std::to_string(d));
        std::size_t l = pen.nearest_circle(chain.spins[j]);
        cp.labels[j] = l;
        Vec3 a = cp.frames[l].transposed() * chain.spins[j];
        cp.angles[j] = std::atan2(a.y, a.x);
    }
    return cp;
}

// Energy of the stencils touching site j (label-switch bookkeeping).
double local_energy(const std::vector<Vec3>& u, const ModelParams& p, std::size_t j) {
    double b = 2.0 * (1.0 - p.delta);
    KahanSum s;
    std::size_t lo = j >= 2 ? j - 2 : 0;
    std::size_t hi = std::min(j, u.size() - 3);
    for (std::size_t i = lo; i <= hi && i + 2 < u.size(); ++i)
        s.add((u[i + 2] - u[i + 1] * b + u[i]).norm2());
    return 0.5 * p.lambda * s.value();
}

}  // namespace

void MinimizeOptions::validate() const {
    if (max_iters < 1) throw ParameterError("max_iters must be >= 1");
    if (!(grad_tol > 0.0)) throw ParameterError("grad_tol must be positive");
    if (!(step_init > 0.0)) throw ParameterError("step_init must be positive");
}

std::vector<Vec3> gradient(const SpinChain& chain, const ModelParams& p,
                           const MinimizeMode& mode) {
    if (chain.size() < 3) throw DimensionError("gradient needs N >= 3");
    const double scale = p.energy_scale();
    std::vector<Vec3> g;
    if (mode.kind == MinimizeMode::Kind::hard) {
        CircleParam cp = circle_param(chain, *mode.pen);
        std::vector<Vec3> ge;
        euclid_gradient(chain.spins, p, MinimizeMode::free_mode(), ge);
        g.resize(chain.size());
        for (std::size_t j = 0; j < chain.size(); ++j) {
            Vec3 tau = cp.tangent(j);
            g[j] = tau * (ge[j].dot(tau) / scale);
        }
        return g;
    }
    euclid_gradient(chain.spins, p, mode, g);
    for (std::size_t j = 0; j < chain.size(); ++j)
        g[j] = (g[j] - chain.spins[j] * g[j].dot(chain.spins[j])) / scale;
    return g;
}

std::pair<SpinChain, MinimizeReport> minimize_chain(SpinChain chain, const ModelParams& p,
                                                    const MinimizeOptions& options) {
    options.validate();
    p.validate();
    if (chain.size() < 3) throw DimensionError("minimize needs N >= 3");
    if (options.mode.kind == MinimizeMode::Kind::hard)
        return minimize_hard(std::move(chain), p, *options.mode.pen, options);
    return descend_chain(std::move(chain), p, options);
}

std::pair<SpinChain, MinimizeReport> minimize_hard(SpinChain chain, const ModelParams& p,
                                                   const PenaltySpec& pen,
                                                   const MinimizeOptions& options) {
    options.validate();
    p.validate();
    if (chain.size() < 3) throw DimensionError("minimize needs N >= 3");
    const double scale = p.energy_scale();
    chain.renormalize();
    CircleParam cp = circle_param(chain, pen);
    cp.write_to(chain);
    PinMask pins = pin_mask(chain, options);
    const double tol_switch = 10.0 * std::sqrt(p.delta);

    MinimizeReport rep;
    rep.stop = StopReason::max_iters;
    std::size_t n = chain.size();
    std::vector<double> gth(n), cand_angles(n);
    std::vector<Vec3> ge;
    auto f_of = [&](const CircleParam& c) {
        SpinChain tmp = chain;
        c.write_to(tmp);
        return chain_energy(tmp, p) / scale;
    };
    auto grad_angles = [&](const CircleParam& c) {
        c.write_to(chain);
        euclid_gradient(chain.spins, p, MinimizeMode::free_mode(), ge);
        for (std::size_t j = 0; j < n; ++j)
            gth[j] = pins.pinned(j) ? 0.0 : ge[j].dot(c.tangent(j)) / scale;
    };

    double f = f_of(cp);
    grad_angles(cp);
    double step = options.step_init;
    std::vector<double> prev_a, prev_g;
    bool has_prev = false;

    int it = 0;
    int since_switch_check = 0;
    for (; it < options.max_iters; ++it) {
        double gn = 0.0, gsq = 0.0;
        for (double v : gth) {
            gn = std::max(gn, std::abs(v));
            gsq += v * v;
        }
        rep.grad_norm = gn;
        bool try_switch = gn <= options.grad_tol || since_switch_check >= 40;
        if (try_switch) {
            since_switch_check = 0;
            bool switched = false;
            for (std::size_t j = 2; j + 2 < n; ++j) {
                if (pins.pinned(j)) continue;
                std::size_t l = cp.labels[j];
                for (std::size_t m = 0; m < pen.k() && !switched; ++m) {
                    if (m == l) continue;
                    auto [x1, x2] = pen.circle_intersections(l, m);
                    Vec3 uj = cp.spin(j);
                    double d = std::min((uj - x1).norm(), (uj - x2).norm());
                    if (d > tol_switch) continue;
                    // project the spin onto circle m and test the move
                    Vec3 q = pen.axes()[m];
                    Vec3 pr = uj - q * uj.dot(q);
                    if (pr.norm() < 1e-9) continue;
                    Vec3 um = pr.normalized();
                    double before = local_energy(chain.spins, p, j);
                    Vec3 saved = chain.spins[j];
                    chain.spins[j] = um;
                    double after = local_energy(chain.spins, p, j);
                    if (after < before - 1e-15 * std::abs(before)) {
                        Vec3 a = cp.frames[m].transposed() * um;
                        cp.labels[j] = m;
                        cp.angles[j] = std::atan2(a.y, a.x);
                        switched = true;
                    } else {
                        chain.spins[j] = saved;
                    }
                }
            }
            if (switched) {
                cp.write_to(chain);
                f = f_of(cp);
                grad_angles(cp);
                has_prev = false;
                continue;
            }
            if (gn <= options.grad_tol) {
                rep.converged = true;
                rep.stop = StopReason::grad_tol;
                break;
            }
        }
        if (has_prev) {
            double sy = 0.0, ss = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                double s = cp.angles[j] - prev_a[j];
                double y = gth[j] - prev_g[j];
                sy += s * y;
                ss += s * s;
            }
            if (sy > 1e-300) step = std::clamp(ss / sy, 1e-14, 1e8);
        }
        double t = step;
        bool accepted = false;
        for (int bt = 0; bt < kMaxBacktracks; ++bt) {
            for (std::size_t j = 0; j < n; ++j) cand_angles[j] = cp.angles[j] - t * gth[j];
            CircleParam cnd = cp;
            cnd.angles = cand_angles;
            double fc = f_of(cnd);
            if (fc <= f - kArmijoC * t * gsq) {
                prev_a = cp.angles;
                prev_g = gth;
                has_prev = true;
                step = t;
                cp.angles = cand_angles;
                f = fc;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            rep.stop = StopReason::step_failure;
            break;
        }
        grad_angles(cp);
        ++since_switch_check;
    }
    cp.write_to(chain);
    rep.iterations = it;
    rep.final_energy = chain_energy(chain, p);
    rep.scaled_energy = rep.final_energy / scale;
    rep.breakdown = sandwich_terms_unchecked(chain, p);
    rep.breakdown.total = rep.scaled_energy;
    return {std::move(chain), rep};
}

std::pair<SpinField2D, MinimizeReport> minimize_2d(SpinField2D field, const ModelParams& p,
                                                   const PenaltySpec& pen,
                                                   const MinimizeOptions& options) {
    options.validate();
    p.validate();
    if (field.width < 3 || field.height < 2) throw DimensionError("minimize_2d grid too small");
    const double scale = p.energy_scale();
    const double j0 = p.j0_effective();
    const double l2 = p.lambda * p.lambda;
    const double pw = p.delta * p.delta * l2;  // 2D penalty weight
    field.renormalize();

    auto pinned = [&](std::size_t ix) {
        return options.pin_ends && (ix < 2 || ix + 2 >= field.width);
    };
    auto objective2d = [&](const SpinField2D& f) {
        return renormalized_2d_penalized(f, p, pen) / scale;
    };
    std::vector<Vec3> g(field.spins.size());
    auto eval_grad = [&](const SpinField2D& f) {
        std::fill(g.begin(), g.end(), Vec3{});
        for (std::size_t iy = 0; iy + 1 < f.height; ++iy)
            for (std::size_t ix = 0; ix + 2 < f.width; ++ix) {
                std::size_t i0 = iy * f.width + ix;
                Vec3 st = (f.spins[i0] - f.spins[i0 + 1] * (j0 / 2.0) + f.spins[i0 + 2]) * l2;
                g[i0] += st;
                g[i0 + 1] -= st * (j0 / 2.0);
                g[i0 + 2] += st;
                Vec3 dy = (f.spins[i0 + f.width] - f.spins[i0]) * (l2 * p.j2);
                g[i0] -= dy;
                g[i0 + f.width] += dy;
                Vec3 gg = pen.gradient(f.spins[i0].cross(f.spins[i0 + 1]));
                if (gg.norm2() != 0.0) {
                    g[i0] += f.spins[i0 + 1].cross(gg) * pw;
                    g[i0 + 1] += gg.cross(f.spins[i0]) * pw;
                }
            }
        for (std::size_t iy = 0; iy < f.height; ++iy)
            for (std::size_t ix = 0; ix < f.width; ++ix) {
                std::size_t i = iy * f.width + ix;
                if (pinned(ix)) {
                    g[i] = Vec3{};
                    continue;
                }
                g[i] = (g[i] - f.spins[i] * g[i].dot(f.spins[i])) / scale;
            }
    };

    MinimizeReport rep;
    rep.stop = StopReason::max_iters;
    double f = objective2d(field);
    eval_grad(field);
    DescentState bb;
    bb.step = options.step_init;
    SpinField2D cand = field;

    int it = 0;
    for (; it < options.max_iters; ++it) {
        double gn = 0.0, gsq = 0.0;
        for (const auto& v : g) {
            gn = std::max(gn, std::max(std::abs(v.x), std::max(std::abs(v.y), std::abs(v.z))));
            gsq += v.norm2();
        }
        rep.grad_norm = gn;
        if (gn <= options.grad_tol) {
            rep.converged = true;
            rep.stop = StopReason::grad_tol;
            break;
        }
        double t = bb.propose(field.spins, g);
        bool accepted = false;
        for (int bt = 0; bt < kMaxBacktracks; ++bt) {
            for (std::size_t i = 0; i < field.spins.size(); ++i)
                cand.spins[i] = (field.spins[i] - g[i] * t).normalized();
            double fc = objective2d(cand);
            if (fc <= f - kArmijoC * t * gsq) {
                bb.remember(field.spins, g);
                bb.step = t;
                field.spins.swap(cand.spins);
                f = fc;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            rep.stop = StopReason::step_failure;
            break;
        }
        eval_grad(field);
    }
    rep.iterations = it;
    rep.scaled_energy = f;
    rep.final_energy = f * scale;
    rep.breakdown.total = f;
    rep.breakdown.ferro_2d_term = 0.5 * p.j2 * y_variation(field) / scale;
    return {std::move(field), rep};
}

SpinChain anneal(SpinChain chain, const ModelParams& p, const MinimizeOptions& options) {
    options.validate();
    p.validate();
    if (chain.size() < 3) throw DimensionError("anneal needs N >= 3");
    AnnealOptions a = options.anneal.value_or(AnnealOptions{});
    const double scale = p.energy_scale();
    PinMask pins = pin_mask(chain, options);
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    chain.renormalize();

    const bool soft = options.mode.kind == MinimizeMode::Kind::soft;
    const bool hard = options.mode.kind == MinimizeMode::Kind::hard;
    const PenaltySpec* pen = options.mode.pen ? &*options.mode.pen : nullptr;
    auto local = [&](std::size_t j) {
        double e = local_energy(chain.spins, p, j);
        if (soft) {
            std::size_t lo = j >= 1 ? j - 1 : 0;
            for (std::size_t i = lo; i <= j && i + 2 < chain.size(); ++i)
                e += p.mu * p.lambda * (*pen)(chain.spins[i].cross(chain.spins[i + 1]));
        }
        return e / scale;
    };
    auto propose = [&](std::size_t j) {
        if (!hard) {
            Vec3 xi{gauss(rng), gauss(rng), gauss(rng)};
            return (chain.spins[j] + xi * a.step).normalized();
        }
        // hard mode moves within the spin's current circle
        std::size_t l = pen->nearest_circle(chain.spins[j]);
        Vec3 q = pen->axes()[l];
        Vec3 radial = chain.spins[j] - q * chain.spins[j].dot(q);
        Vec3 tang = q.cross(radial.normalized());
        double dth = a.step * gauss(rng);
        return (radial.normalized() * std::cos(dth) + tang * std::sin(dth)).normalized();
    };
    auto total = [&]() {
        return (soft ? penalized_chain_energy(chain, p, *pen) : chain_energy(chain, p)) / scale;
    };

    SpinChain best = chain;
    double best_e = total();
    double temp = a.t_init;
    std::uniform_int_distribution<std::size_t> site(0, chain.size() - 1);
    for (int tstep = 0; tstep < a.n_temps; ++tstep) {
        std::size_t moves = chain.size() * static_cast<std::size_t>(a.moves_per_site);
        for (std::size_t mv = 0; mv < moves; ++mv) {
            std::size_t j = site(rng);
            if (pins.pinned(j)) continue;
            Vec3 proposal = propose(j);
            double before = local(j);
            Vec3 saved = chain.spins[j];
            chain.spins[j] = proposal;
            double after = local(j);
            double de = after - before;
            bool accept = de < 0.0 || (temp > 0.0 && unif(rng) < std::exp(-de / temp));
            if (!accept) chain.spins[j] = saved;
        }
        double e = total();
        if (e < best_e) {
            best_e = e;
            best = chain;
        }
        temp *= a.t_factor;
    }
    return best;
}

SpinChain perturbed(const SpinChain& chain, double angle, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    SpinChain out = chain;
    for (auto& u : out.spins) {
        Vec3 xi{unif(rng), unif(rng), unif(rng)};
        Vec3 tangent = xi - u * xi.dot(u);
        if (tangent.norm() < 1e-12) continue;
        double a = angle * std::abs(unif(rng));
        u = (u * std::cos(a) + tangent.normalized() * std::sin(a)).normalized();
    }
    return out;
}

}  // namespace chiralab
