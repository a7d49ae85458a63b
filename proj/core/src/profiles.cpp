#include "chiralab/profiles.hpp"

#include <algorithm>
#include <cmath>

namespace chiralab {

namespace {

double log_cosh(double t) {
    double a = std::abs(t);
    if (a > 20.0) return a - std::log(2.0);  // avoid cosh overflow
    return std::log(std::cosh(a));
}

// In-frame rotation about e1 by angle g applied to (cos ph, sin ph, 0).
Vec3 rot_e1_circle(double g, double ph) {
    double c = std::cos(ph), s = std::sin(ph);
    return {c, s * std::cos(g), s * std::sin(g)};
}

Vec3 unit_or_throw(const Vec3& v, const char* what) {
    if (std::abs(v.norm() - 1.0) > 1e-9)
        throw ParameterError(std::string(what) + " must be a unit vector");
    return v.normalized();
}

struct Frame {
    Vec3 e1, e2, e3;
    Vec3 to_world(const Vec3& v) const { return e1 * v.x + e2 * v.y + e3 * v.z; }
    Vec3 to_frame(const Vec3& v) const { return {v.dot(e1), v.dot(e2), v.dot(e3)}; }
};

// Frame with e3 = a and e2 along the component of b orthogonal to a (the
// rotation a -> b is then about the frame e1, through angle -atan2(...)).
// Degenerate b (parallel to a) falls back to the deterministic axis rule.
Frame adapted_frame(const Vec3& a, const Vec3& b) {
    Frame f;
    f.e3 = a;
    Vec3 pr = b - a * b.dot(a);
    if (pr.norm() < 1e-12) {
        Vec3 ax = kE1 - a * a.dot(kE1);
        if (std::abs(a.dot(kE1)) > 0.9) ax = kE2 - a * a.dot(kE2);
        f.e2 = ax.normalized();
    } else {
        f.e2 = pr.normalized();
    }
    f.e1 = f.e2.cross(f.e3);
    return f;
}

void fill_samples(ContinuumProfile& p, std::size_t n) {
    p.u.resize(n);
    p.w.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        double t = p.t_at(j);
        p.u[j] = p.u_exact(t);
        p.w[j] = p.w_exact(t);
    }
}

// Deterministic sign convention for a unit vector defined up to +-:
// first nonnegative coordinate wins, ties broken by the next one.
Vec3 canonical_sign(const Vec3& v) {
    const double tol = 1e-14;
    if (v.x > tol) return v;
    if (v.x < -tol) return -v;
    if (v.y > tol) return v;
    if (v.y < -tol) return -v;
    return v.z >= 0 ? v : -v;
}

}  // namespace

CutoffRamp CutoffRamp::quintic() {
    CutoffRamp r;
    r.f = [](double s) {
        if (s <= 0.0) return 0.0;
        if (s >= 1.0) return 1.0;
        return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
    };
    r.df = [](double s) {
        if (s <= 0.0 || s >= 1.0) return 0.0;
        return s * s * (30.0 + s * (-60.0 + 30.0 * s));
    };
    r.d2f = [](double s) {
        if (s <= 0.0 || s >= 1.0) return 0.0;
        return s * (60.0 + s * (-180.0 + 120.0 * s));
    };
    return r;
}

Vec3 ContinuumProfile::eval_u(double t) const {
    if (u_exact) return u_exact(t);
    double x = (t - t_lo) / dt;
    if (x < -1e-9 || x > static_cast<double>(u.size() - 1) + 1e-9)
        throw ParameterError("profile span too small for requested sample time");
    x = std::clamp(x, 0.0, static_cast<double>(u.size() - 1));
    std::size_t j = std::min(static_cast<std::size_t>(x), u.size() - 2);
    double a = x - static_cast<double>(j);
    return (u[j] * (1.0 - a) + u[j + 1] * a).normalized();
}

std::vector<Vec3> ContinuumProfile::finite_difference_w() const {
    std::size_t n = u.size();
    std::vector<Vec3> out(n);
    if (n < 3) return out;
    for (std::size_t j = 1; j + 1 < n; ++j)
        out[j] = u[j].cross((u[j + 1] - u[j - 1]) / (2.0 * dt));
    out[0] = u[0].cross((u[1] * 4.0 - u[2] - u[0] * 3.0) / (2.0 * dt));
    out[n - 1] = u[n - 1].cross((u[n - 1] * 3.0 - u[n - 2] * 4.0 + u[n - 3]) / (2.0 * dt));
    return out;
}

ContinuumProfile ContinuumProfile::from_samples(double t_lo, double dt, std::vector<Vec3> u) {
    if (u.size() < 3) throw DimensionError("profile needs at least 3 samples");
    if (!(dt > 0.0)) throw ParameterError("profile step must be positive");
    ContinuumProfile p;
    p.t_lo = t_lo;
    p.dt = dt;
    p.u = std::move(u);
    for (auto& v : p.u) v = v.normalized();
    p.w = p.finite_difference_w();
    return p;
}

SpinChain ground_helix(double delta, const Rotation& axis_rotation, std::size_t n_sites,
                       double lambda) {
    if (!(delta > 0.0) || delta >= 1.0) throw ParameterError("ground helix needs delta in (0,1)");
    if (n_sites < 3) throw DimensionError("ground helix needs at least 3 sites");
    if (!(lambda > 0.0)) throw ParameterError("ground helix needs lambda > 0");
    double phi = safe_acos(1.0 - delta);
    SpinChain c;
    c.spacing = lambda;
    c.boundary = Boundary::periodic();
    c.spins.reserve(n_sites);
    for (std::size_t i = 0; i < n_sites; ++i) {
        double a = phi * static_cast<double>(i);
        c.spins.push_back(axis_rotation * Vec3{std::cos(a), std::sin(a), 0.0});
    }
    return c;
}

ContinuumProfile zero_cost_profile(const Vec3& z1_in, const Vec3& z2_in, double rho,
                                   const CutoffRamp& ramp) {
    Vec3 z1 = unit_or_throw(z1_in, "z1");
    Vec3 z2 = unit_or_throw(z2_in, "z2");
    if (!(rho >= 1.0)) throw ParameterError("zero-cost profile needs rho >= 1");

    Frame fr = adapted_frame(z1, z2);
    double mu_c = std::clamp(z1.dot(z2), -1.0, 1.0);
    double lam_c = (z2 - z1 * mu_c).norm();
    double phi = -std::atan2(lam_c, mu_c);

    auto g_of = [ramp, rho, phi](double t) { return ramp.f(t / rho) * phi; };
    auto dg_of = [ramp, rho, phi](double t) { return ramp.df(t / rho) * phi / rho; };

    ContinuumProfile p;
    double pad = 2.0;
    p.dt = std::min(2e-2, std::max(1e-3, rho / 4000.0));
    p.t_lo = -pad;
    std::size_t n = static_cast<std::size_t>(std::ceil((rho + 2.0 * pad) / p.dt)) + 1;

    p.u_exact = [fr, g_of](double t) { return fr.to_world(rot_e1_circle(g_of(t), t)); };
    p.w_exact = [fr, g_of, dg_of](double t) {
        double g = g_of(t), dg = dg_of(t);
        Vec3 qh = rot_e1_circle(g, t);
        Vec3 qe3{0.0, -std::sin(g), std::cos(g)};
        Vec3 wf = (Vec3{1.0, 0.0, 0.0} - qh * std::cos(t)) * dg + qe3;
        return fr.to_world(wf);
    };
    fill_samples(p, n);
    return p;
}

ContinuumProfile tanh_profile(const Vec3& qm_in, const Vec3& qp_in, double t_span, double dt) {
    Vec3 qm = unit_or_throw(qm_in, "q_minus");
    Vec3 qp = unit_or_throw(qp_in, "q_plus");
    if ((qm - qp).norm() < 1e-12)
        throw ParameterError("tanh profile needs distinct chirality endpoints");
    if (!(t_span > 1.0) || !(dt > 0.0)) throw ParameterError("tanh profile needs t_span > 1, dt > 0");

    Rotation rm = Rotation::between(kE3, -qm);
    Rotation rp;
    double t0 = 0.0, t1 = 0.0;
    if ((qm + qp).norm() < 1e-12) {
        rp = rm;  // antipodal: same circle, the lift stays planar
    } else {
        rp = Rotation::between(kE3, qp);
        Vec3 xstar = canonical_sign(qm.cross(qp).normalized());
        Vec3 a = rm.transposed() * xstar;
        Vec3 b = rp.transposed() * xstar;
        t0 = std::atan2(a.y, a.x);
        t1 = std::atan2(b.y, b.x);
    }

    ContinuumProfile p;
    std::size_t half = static_cast<std::size_t>(std::llround(t_span / dt));
    p.dt = dt;
    p.t_lo = -dt * static_cast<double>(half);  // node exactly at t = 0

    p.u_exact = [rm, rp, t0, t1](double t) {
        double g = log_cosh(t);
        if (t <= 0.0) return rm * Vec3{std::cos(g + t0), std::sin(g + t0), 0.0};
        return rp * Vec3{std::cos(g + t1), std::sin(g + t1), 0.0};
    };
    p.w_exact = [qm, qp](double t) {
        double v = std::abs(std::tanh(t));
        return (t <= 0.0 ? qm : qp) * v;
    };
    fill_samples(p, 2 * half + 1);
    return p;
}

ContinuumProfile soft_profile(const Vec3& q1_in, const Vec3& q2_in, double eps) {
    Vec3 q1 = unit_or_throw(q1_in, "q1");
    Vec3 q2 = unit_or_throw(q2_in, "q2");
    if ((q1 - q2).norm() < 1e-12)
        throw ParameterError("soft profile needs distinct chirality endpoints");
    if (!(eps > 0.0) || !(eps < 0.5)) throw ParameterError("soft profile needs eps in (0, 1/2)");

    double v0 = 1.0 - eps / 2.0;
    double te = 0.5 * std::log((1.0 + v0) / (1.0 - v0));  // artanh(v0)
    double s0 = 1.0 - v0 * v0;
    // cubic Hermite in tau = (t - te)/eps: p = v0 + eps*s0*tau + a*tau^2 + b*tau^3
    double dv = 1.0 - v0;
    double a = 3.0 * dv - 2.0 * eps * s0;
    double b = -2.0 * dv + eps * s0;

    auto speed = [=](double tt) {  // f(|t|)
        if (tt <= te) return std::tanh(tt);
        if (tt >= te + eps) return 1.0;
        double tau = (tt - te) / eps;
        return v0 + eps * s0 * tau + a * tau * tau + b * tau * tau * tau;
    };
    auto gamma = [=](double tt) {  // integral of f on [0,|t|]; gamma is even
        if (tt <= te) return log_cosh(tt);
        double base = log_cosh(te);
        double tau = std::min(1.0, (tt - te) / eps);
        double ip = v0 * tau + eps * s0 * tau * tau / 2.0 + a * tau * tau * tau / 3.0 +
                    b * tau * tau * tau * tau / 4.0;
        double g = base + eps * ip;
        if (tt > te + eps) g += tt - te - eps;
        return g;
    };

    Rotation r1 = Rotation::between(kE3, -q1);
    Rotation r2;
    double t0 = 0.0, t1 = 0.0;
    if ((q1 + q2).norm() < 1e-12) {
        r2 = r1;
    } else {
        r2 = Rotation::between(kE3, q2);
        Vec3 xstar = canonical_sign(q1.cross(q2).normalized());
        Vec3 av = r1.transposed() * xstar;
        Vec3 bv = r2.transposed() * xstar;
        t0 = std::atan2(av.y, av.x);
        t1 = std::atan2(bv.y, bv.x);
    }

    ContinuumProfile p;
    double span = te + eps + 4.0;
    p.dt = 1e-3;
    std::size_t half = static_cast<std::size_t>(std::llround(span / p.dt));
    p.t_lo = -p.dt * static_cast<double>(half);

    p.u_exact = [=](double t) {
        double g = gamma(std::abs(t));
        if (t <= 0.0) return r1 * Vec3{std::cos(g + t0), std::sin(g + t0), 0.0};
        return r2 * Vec3{std::cos(g + t1), std::sin(g + t1), 0.0};
    };
    p.w_exact = [=](double t) {
        double v = speed(std::abs(t));
        return (t <= 0.0 ? q1 : q2) * v;
    };
    fill_samples(p, 2 * half + 1);
    return p;
}

ContinuumProfile bridge(const Vec3& w0, const Vec3& w1, const Vec3& u0_in, const Vec3& u1_in,
                        double eta) {
    if (!(eta > 0.0) || eta > 0.25) throw ParameterError("bridge needs eta in (0, 0.25]");
    Vec3 u0 = unit_or_throw(u0_in, "u0");
    Vec3 u1 = unit_or_throw(u1_in, "u1");
    double n0 = w0.norm(), n1 = w1.norm();
    if (std::abs(n0 - 1.0) > eta + 1e-12 || std::abs(n1 - 1.0) > eta + 1e-12)
        throw ParameterError("bridge endpoints must have |w| within eta of 1");
    if ((w0 - w1).norm() > 2.0 * eta + 1e-12)
        throw ParameterError("bridge endpoints must lie within 2*eta of each other");
    if (std::abs(u0.dot(w0)) > 1e-9 * n0 || std::abs(u1.dot(w1)) > 1e-9 * n1)
        throw ParameterError("bridge needs u_i orthogonal to w_i");

    Vec3 h0 = w0 / n0, h1 = w1 / n1;
    Frame fr = adapted_frame(h0, h1);
    double mu_c = std::clamp(h0.dot(h1), -1.0, 1.0);
    double lam_c = (h1 - h0 * mu_c).norm();
    double phi = -std::atan2(lam_c, mu_c);
    Vec3 uf0 = fr.to_frame(u0);
    double t00 = std::atan2(uf0.y, uf0.x);
    double d0 = n0 - 1.0, d1 = n1 - 1.0;

    // seg1 speed ramp: gamma0(s) = d0 (s - 6 s^3 + 8 s^4 - 3 s^5)
    auto g0 = [d0](double s) { return d0 * (s + s * s * s * (-6.0 + s * (8.0 - 3.0 * s))); };
    auto dg0 = [d0](double s) { return d0 * (1.0 + s * s * (-18.0 + s * (32.0 - 15.0 * s))); };
    // seg3 speed ramp: gamma2(s) = d1 (s^3 - s^4/2)
    auto g2 = [d1](double s) { return d1 * s * s * s * (1.0 - 0.5 * s); };
    auto dg2 = [d1](double s) { return d1 * s * s * (3.0 - 2.0 * s); };
    CutoffRamp ramp = CutoffRamp::quintic();

    auto rot_frame_vec = [&](double g, const Vec3& v) {
        // world vector of in-frame coords rotated about frame e1 by g
        Vec3 r{v.x, v.y * std::cos(g) - v.z * std::sin(g), v.y * std::sin(g) + v.z * std::cos(g)};
        return fr.to_world(r);
    };
    Vec3 a1 = fr.to_frame(u1);
    // coordinates of u1 in the rotated frame: undo the e1-rotation by phi
    Vec3 a1r{a1.x, a1.y * std::cos(phi) + a1.z * std::sin(phi),
             -a1.y * std::sin(phi) + a1.z * std::cos(phi)};
    double theta_target = std::atan2(a1r.y, a1r.x);
    double psi3 = 3.0 + g2(1.0) + t00;
    double delta_phase = std::fmod(theta_target - psi3, 2.0 * M_PI);
    if (delta_phase < 0) delta_phase += 2.0 * M_PI;
    double speed1 = 1.0 + d1;
    double t_star = 3.0 + delta_phase / speed1;

    auto u_fn = [=](double t) {
        t = std::clamp(t, 0.0, t_star);
        if (t <= 1.0) {
            double ph = t + g0(t) + t00;
            return rot_frame_vec(0.0, {std::cos(ph), std::sin(ph), 0.0});
        }
        if (t <= 2.0) {
            double g = ramp.f(t - 1.0) * phi;
            double ph = t + t00;
            return rot_frame_vec(g, {std::cos(ph), std::sin(ph), 0.0});
        }
        double ph = (t <= 3.0) ? t + g2(t - 2.0) + t00 : t + g2(1.0) + d1 * (t - 3.0) + t00;
        return rot_frame_vec(phi, {std::cos(ph), std::sin(ph), 0.0});
    };
    auto w_fn = [=](double t) {
        t = std::clamp(t, 0.0, t_star);
        if (t <= 1.0) return fr.to_world(Vec3{0, 0, 1}) * (1.0 + dg0(t));
        if (t <= 2.0) {
            double g = ramp.f(t - 1.0) * phi;
            double dg = ramp.df(t - 1.0) * phi;
            double ph = t + t00;
            Vec3 qh = rot_e1_circle(g, ph);
            Vec3 qe3{0.0, -std::sin(g), std::cos(g)};
            return fr.to_world((Vec3{1, 0, 0} - qh * std::cos(ph)) * dg + qe3);
        }
        double dg = (t <= 3.0) ? dg2(t - 2.0) : d1;
        return rot_frame_vec(phi, {0, 0, 1}) * (1.0 + dg);
    };

    ContinuumProfile p;
    std::size_t n = std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(t_star / 1e-3)));
    p.t_lo = 0.0;
    p.dt = t_star / static_cast<double>(n);
    p.u_exact = u_fn;
    p.w_exact = w_fn;
    fill_samples(p, n + 1);
    return p;
}

SpinChain sample_chain(const ContinuumProfile& profile, double lambda, double delta,
                       double center) {
    if (!(lambda > 0.0) || !(delta > 0.0) || delta >= 1.0)
        throw ParameterError("sample_chain needs lambda > 0 and delta in (0,1)");
    double alpha = safe_acos(1.0 - delta) / std::sqrt(2.0 * delta);
    double factor = alpha * std::sqrt(2.0 * delta) / lambda;
    std::size_t n = static_cast<std::size_t>(std::floor(1.0 / lambda)) + 1;
    if (n < 3) throw ParameterError("sample_chain needs lambda small enough for 3 sites");

    SpinChain c;
    c.spacing = lambda;
    c.spins.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double t = factor * (lambda * static_cast<double>(i) - center);
        c.spins.push_back(profile.eval_u(t).normalized());
    }
    c.boundary = (c.boundary_residual() <= 1e-12) ? Boundary::periodic() : Boundary::free();
    return c;
}

SpinChain oscillating_chain(double eta, const ModelParams& p) {
    if (!(eta > 0.0) || eta >= 1.0) throw ParameterError("oscillating chain needs eta in (0,1)");
    p.validate();
    if (!(p.delta > 0.0)) throw ParameterError("oscillating chain needs delta > 0");

    std::size_t c = std::max<std::size_t>(3, static_cast<std::size_t>(std::llround(eta / p.lambda)));
    // cover a whole number of periods so the chirality averages out exactly
    std::size_t n_target = static_cast<std::size_t>(std::floor(1.0 / p.lambda)) + 1;
    std::size_t n_periods = std::max<std::size_t>(1, (n_target - 1) / (2 * c));
    c = std::max<std::size_t>(3, (n_target - 1) / (2 * n_periods));
    double step = p.alpha_n() * std::sqrt(2.0 * p.delta);
    double t_half = static_cast<double>(c) * step;
    auto k = std::max<long long>(1, std::llround(t_half / M_PI));
    double omega = M_PI * static_cast<double>(k) / t_half;  // closes the phase over a full period
    CutoffRamp ramp = CutoffRamp::quintic();
    double m = 0.05 * t_half, width = 0.9 * t_half;

    // The axis angle runs 0 -> pi -> 2pi over one period: the chirality flips
    // and flips back while the axis keeps circling one way, so the two ramps
    // cancel in the mean and the full turn keeps the lattice map periodic.
    auto gamma = [=](double tau) {
        if (tau <= t_half) return M_PI * ramp.f((tau - m) / width);
        return M_PI * (1.0 + ramp.f((tau - t_half - m) / width));
    };

    std::size_t n = 2 * c * n_periods + 1;
    SpinChain chain;
    chain.spacing = p.lambda;
    chain.boundary = Boundary::free();
    chain.spins.reserve(n);
    std::size_t period = 2 * c;
    for (std::size_t i = 0; i < n; ++i) {
        double tau = static_cast<double>(i % period) * step;
        double g = gamma(tau);
        chain.spins.push_back(rot_e1_circle(g, omega * tau));
    }
    chain.renormalize();
    return chain;
}

}  // namespace chiralab
