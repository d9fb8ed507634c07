#include "fdlab/estimates.hpp"

#include "fdlab/elliptic.hpp"
#include "fdlab/error.hpp"

#include <algorithm>
#include <cmath>

namespace fdlab {

double CutoffFamily::shape(double s)
{
    if (s <= 1.0)
        return 1.0;
    if (s >= 2.0)
        return 0.0;
    const double x = s - 1.0;
    return 1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
}

double CutoffFamily::shape_d1(double s)
{
    if (s <= 1.0 || s >= 2.0)
        return 0.0;
    const double x = s - 1.0;
    return -30.0 * x * x * (1.0 - x) * (1.0 - x);
}

double CutoffFamily::shape_d2(double s)
{
    if (s <= 1.0 || s >= 2.0)
        return 0.0;
    const double x = s - 1.0;
    return -60.0 * x * (1.0 - x) * (1.0 - 2.0 * x);
}

double CutoffFamily::laplacian(const Profile& p, double r) const
{
    const double s = r / R;
    return shape_d2(s) / (R * R) + (p.dim() - 1) * p.log_derivative(r) * shape_d1(s) / R;
}

double kappa_m(double m)
{
    if (!(m > 0.0 && m < 1.0))
        throw ValidationError("m", "must be in (0,1)");
    // 2/(1-m) is an integer for m = 1/2, 0.8, ...; do not let round-off push k up
    const double k = std::ceil(2.0 / (1.0 - m) - 1e-9);
    return (1.0 - m) * std::pow(2.0, 1.0 - m) * k * (k - 1.0);
}

HpConstantParts hp_constant_parts(const Profile& p, double m, double R, int samples)
{
    if (!(R > 0.0))
        throw ValidationError("R", "must be positive");
    if (samples < 2)
        throw ValidationError("samples", "must be >= 2");
    if (2.0 * R > p.max_radius())
        throw ValidationError("R", "2R exceeds the profile's tabulated range");
    HpConstantParts parts;
    parts.kappa = kappa_m(m);
    const CutoffFamily phi{R};
    for (int i = 0; i < samples; ++i) {
        const double r = R + R * i / (samples - 1.0);
        const double g = phi.gradient_norm(r);
        parts.sup_term = std::max(parts.sup_term, g * g + std::abs(phi.laplacian(p, r)));
    }
    parts.annulus_volume = shell_volume(p, R, 2.0 * R);
    parts.value = parts.kappa * parts.sup_term * std::pow(parts.annulus_volume, 1.0 - m);
    return parts;
}

double hp_constant(const Profile& p, double m, double R, int samples)
{
    return hp_constant_parts(p, m, R, samples).value;
}

namespace {

void check_pair(const SpaceTimeField& u, const SpaceTimeField& v, double R)
{
    if (!same_grid(u.grid, v.grid))
        throw ValidationError("v", "solutions must share a grid");
    if (u.times.size() != v.times.size())
        throw ValidationError("v", "solutions must share a time mesh");
    for (std::size_t k = 0; k < u.times.size(); ++k)
        if (std::abs(u.times[k] - v.times[k]) > 1e-12 * std::max(1.0, u.times[k]))
            throw ValidationError("v", "solutions must share a time mesh");
    if (2.0 * R > u.grid->radius() * (1.0 + 1e-12))
        throw ValidationError("R", "grid must cover [0, 2R]");
}

std::vector<double> difference(const RadialField& a, const RadialField& b, bool absolute)
{
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        d[i] = absolute ? std::abs(a[i] - b[i]) : a[i] - b[i];
    return d;
}

HpReport finish(double lhs_mass, double rhs_mass, double m, double H_R, double dt, double rel_tol)
{
    HpReport rep;
    rep.rel_tol = rel_tol;
    rep.H_R = H_R;
    rep.lhs = std::pow(std::max(lhs_mass, 0.0), 1.0 - m);
    rep.rhs = std::pow(std::max(rhs_mass, 0.0), 1.0 - m) + H_R * dt;
    rep.slack = rep.rhs - rep.lhs;
    rep.pass = rep.slack >= -rel_tol * rep.rhs;
    return rep;
}

HpReport check_hp_pair(const SpaceTimeField& u, const SpaceTimeField& v, const Profile& p, double m, double R,
                       double t, double s, double rel_tol, bool absolute)
{
    check_pair(u, v, R);
    const std::size_t kt = u.time_index(t), ks = u.time_index(s);
    const RadialGrid& g = *u.grid;
    const auto dt_ = difference(u.states[kt], v.states[kt], absolute);
    const auto ds_ = difference(u.states[ks], v.states[ks], absolute);
    const double H_R = hp_constant(p, m, R);
    return finish(ball_integral(p, g, dt_, R), ball_integral(p, g, ds_, 2.0 * R), m, H_R, std::abs(t - s), rel_tol);
}

}  // namespace

HpReport check_hp_ordered(const SpaceTimeField& u, const SpaceTimeField& v, const Profile& p, double m, double R,
                          double t, double s, double rel_tol)
{
    check_pair(u, v, R);
    const double viol = order_violation(v, u);
    if (viol > 1e-8)
        throw ValidationError("u", "check_hp_ordered needs u >= v (violated by " + std::to_string(viol) +
                                       "); use check_hp_strong");
    return check_hp_pair(u, v, p, m, R, t, s, rel_tol, false);
}

HpReport check_hp_strong(const SpaceTimeField& u, const SpaceTimeField& v, const Profile& p, double m, double R,
                         double t, double s, double rel_tol)
{
    return check_hp_pair(u, v, p, m, R, t, s, rel_tol, true);
}

HpReport check_hp_against_datum(const SpaceTimeField& u, const RadialField& datum, const Profile& p, double m,
                                double R, double t, double rel_tol)
{
    if (!same_grid(u.grid, datum.grid_ptr()))
        throw ValidationError("datum", "datum must live on the solution grid");
    if (2.0 * R > u.grid->radius() * (1.0 + 1e-12))
        throw ValidationError("R", "grid must cover [0, 2R]");
    const RadialField& ut = u.at(t);
    const double H_R = hp_constant(p, m, R);
    return finish(ball_integral(p, *u.grid, ut.values(), R), ball_integral(p, *u.grid, datum.values(), 2.0 * R), m,
                  H_R, t, rel_tol);
}

RadialField contraction_functional(const SpaceTimeField& u, const SpaceTimeField& v, double m, double t0)
{
    if (!(m > 0.0 && m < 1.0))
        throw ValidationError("m", "must be in (0,1)");
    if (!same_grid(u.grid, v.grid))
        throw ValidationError("v", "mesh mismatch: solutions must share a grid");
    if (u.times.size() != v.times.size())
        throw ValidationError("v", "mesh mismatch: solutions must share a time mesh");
    for (std::size_t k = 0; k < u.times.size(); ++k)
        if (std::abs(u.times[k] - v.times[k]) > 1e-12 * std::max(1.0, u.times[k]))
            throw ValidationError("v", "mesh mismatch: solutions must share a time mesh");
    if (!(t0 >= 0.0) || t0 > u.times.back() * (1.0 + 1e-12))
        throw ValidationError("t0", "must lie in [0, common horizon]");

    const std::size_t n = u.grid->size();
    auto integrand = [&](std::size_t k, std::size_t i) {
        return std::abs(mobility_power(u.states[k][i], m, 0.0) - mobility_power(v.states[k][i], m, 0.0)) *
               std::exp(-u.times[k]);
    };
    std::vector<double> W(n, 0.0);
    for (std::size_t k = 0; k + 1 < u.times.size() && u.times[k] < t0; ++k) {
        const double a = u.times[k], b_full = u.times[k + 1];
        const double b = std::min(b_full, t0);
        const double frac = (b - a) / (b_full - a);
        for (std::size_t i = 0; i < n; ++i) {
            const double fa = integrand(k, i), fb_full = integrand(k + 1, i);
            const double fb = fa + frac * (fb_full - fa);
            W[i] += 0.5 * (b - a) * (fa + fb);
        }
    }
    return RadialField(u.grid, std::move(W));
}

double probe_alpha(double m, double t0)
{
    if (!(m > 0.0 && m < 1.0))
        throw ValidationError("m", "must be in (0,1)");
    if (!(t0 > 0.0))
        throw ValidationError("t0", "must be positive");
    return std::pow(2.0 - 2.0 * std::exp(-t0), -(1.0 - m) / m);
}

ProbeReport uniqueness_probe(const SpaceTimeField& u, const SpaceTimeField& v, const Profile& p, double m,
                             double t0, double probe_radius, std::optional<double> alpha_override)
{
    if (!(m >= 0.05 && m < 1.0))
        throw ValidationError("m", "uniqueness probe needs m in [0.05, 1) so that 1/m stays moderate");
    if (!(probe_radius > 0.0) || probe_radius >= u.grid->radius())
        throw ValidationError("probe_radius", "must be in (0, grid radius)");

    ProbeReport rep{.W = contraction_functional(u, v, m, t0)};
    rep.t0 = t0;
    rep.probe_radius = probe_radius;
    rep.alpha = alpha_override ? *alpha_override : probe_alpha(m, t0);
    if (!(rep.alpha > 0.0))
        throw ValidationError("alpha", "must be positive");

    const RadialField& W = rep.W;
    const std::size_t last = u.grid->last_node_at_or_below(probe_radius);
    for (std::size_t i = 0; i <= last; ++i)
        rep.sup_w = std::max(rep.sup_w, W[i]);
    rep.exact_uniqueness = W.max() == 0.0;

    const LaplacianResult lap = radial_laplacian(p, W);
    rep.min_defect = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < W.size(); ++i)
        rep.min_defect = std::min(rep.min_defect, lap.values[i] - rep.alpha * std::pow(W[i], 1.0 / m));
    if (rep.exact_uniqueness)
        rep.min_defect = 0.0;

    const BarrierSpec spec = BarrierSpec::with_default_constant(1.0 / m, rep.alpha, u.grid->radius());
    rep.barrier_bound = eval_barrier(p, spec, probe_radius);
    rep.within_barrier = rep.sup_w <= rep.barrier_bound;
    return rep;
}

}  // namespace fdlab
