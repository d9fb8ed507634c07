#include "fdlab/geometry.hpp"

#include "fdlab/error.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace fdlab {

namespace {

struct Integral {
    double value = 0.0;
    double error = 0.0;
};

using GK15 = boost::math::quadrature::gauss_kronrod<double, 15>;

// Boost's recursive driver compares the error of the rule on [-1, 1] with a
// tolerance in the units of [a, b], which never terminates on short intervals.
// Recurse here with both sides in the same units.
template <class F>
void bisect(F& f, double a, double b, double abs_tol, unsigned depth, Integral& out)
{
    double err = 0.0;
    const double v = GK15::integrate(f, a, b, 0, 0.0, &err);
    err *= 0.5 * (b - a);
    // the rule reports at least 2 eps |v|; below a small multiple of that,
    // halving further cannot help
    if (depth == 0 || err <= abs_tol || err <= 100.0 * std::numeric_limits<double>::epsilon() * std::abs(v)) {
        out.value += v;
        out.error += err;
        return;
    }
    const double mid = 0.5 * (a + b);
    bisect(f, a, mid, 0.5 * abs_tol, depth - 1, out);
    bisect(f, mid, b, 0.5 * abs_tol, depth - 1, out);
}

/// `scale` is a known magnitude of the whole integral this piece belongs to;
/// it keeps negligible pieces from being refined to their own precision.
template <class F>
Integral adaptive(F&& f, double a, double b, const QuadratureControl& quad, double scale = 0.0)
{
    Integral out;
    if (b <= a)
        return out;
    double err = 0.0, L1 = 0.0;
    GK15::integrate(f, a, b, 0, 0.0, &err, &L1);
    bisect(f, a, b, quad.rel_tol * std::max(L1 * 0.5 * (b - a), scale), quad.max_depth, out);
    return out;
}

void require_converged(const Integral& I, const QuadratureControl& quad, const char* what, double r)
{
    // Kronrod error estimates stall near round-off; accept a small multiple.
    const double allowed = 100.0 * quad.rel_tol * std::abs(I.value) + 1e-300;
    if (!std::isfinite(I.value) || I.error > allowed) {
        std::ostringstream os;
        os << what << " did not converge at r=" << r << ": estimated error " << I.error << " > " << allowed;
        throw QuadratureError(os.str(), I.error, allowed);
    }
}

// The integrand of the outer H integral is itself a quadrature result with
// relative noise near quad.rel_tol, so the outer rule asks for less.
QuadratureControl outer_control(const QuadratureControl& quad)
{
    return {std::max(100.0 * quad.rel_tol, 1e-12), std::min(quad.max_depth, 20u)};
}

}  // namespace

double volume_density(const Profile& p, double r)
{
    if (r <= 0.0)
        return 0.0;
    return std::pow(p.psi(r), p.dim() - 1);
}

double sphere_area(int n)
{
    const double half = 0.5 * n;
    return 2.0 * std::pow(std::numbers::pi, half) / boost::math::tgamma(half);
}

double shell_volume(const Profile& p, double r0, double r1, const QuadratureControl& quad)
{
    if (!std::isfinite(volume_density(p, r1))) {
        std::ostringstream os;
        os << "volume density overflows double precision at r=" << r1;
        throw NumericalFailure(os.str(), "shell_volume");
    }
    auto f = [&](double r) { return volume_density(p, r); };
    const Integral I = adaptive(f, r0, r1, quad);
    require_converged(I, quad, "shell volume", r1);
    return sphere_area(p.dim()) * I.value;
}

double eval_dH(const Profile& p, double r, const QuadratureControl& quad)
{
    if (r <= 0.0)
        return 0.0;
    const int n = p.dim();
    // removable singularity: H'(r) = r/n + O(r^3)
    if (r < 1e-8)
        return r / n;

    auto ratio = [&](double z) {
        if (z <= 0.0)
            return 0.0;
        return std::exp((n - 1) * p.log_psi_ratio(z, r));
    };

    // The integrand (psi(z)/psi(r))^(n-1) concentrates in a layer of width
    // ~ 1/((n-1) psi'/psi) below z = r; panels double in width away from r.
    const double width = std::min(r, 1.0 / ((n - 1) * std::max(p.log_derivative(r), 1.0 / r)));
    Integral total;
    double hi = r;
    double step = width;
    while (hi > 0.0) {
        const double lo = std::max(0.0, r - step);
        const Integral I = adaptive(ratio, lo, hi, quad, total.value);
        total.value += I.value;
        total.error += I.error;
        hi = lo;
        step *= 2.0;
    }
    require_converged(total, quad, "H'", r);
    return total.value;
}

double eval_H(const Profile& p, double r, const QuadratureControl& quad)
{
    if (r <= 0.0)
        return 0.0;
    auto f = [&](double rho) { return eval_dH(p, rho, quad); };
    const QuadratureControl outer = outer_control(quad);
    const Integral I = adaptive(f, 0.0, r, outer);
    require_converged(I, outer, "H", r);
    return I.value;
}

std::vector<double> eval_H(const Profile& p, std::span<const double> radii, const QuadratureControl& quad)
{
    std::vector<double> out(radii.size());
    auto f = [&](double rho) { return eval_dH(p, rho, quad); };
    const QuadratureControl outer = outer_control(quad);
    double prev_r = 0.0, acc = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double r = radii[i];
        if (r < prev_r)
            throw std::invalid_argument("eval_H: radii must be nondecreasing");
        if (r > prev_r) {
            const Integral I = adaptive(f, prev_r, r, outer);
            require_converged(I, outer, "H", r);
            if (!(I.value > 0.0))
                throw NumericalFailure("H is not strictly increasing on sampled radii", "eval_H");
            acc += I.value;
        }
        out[i] = acc;
        prev_r = r;
    }
    return out;
}

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::complete: return "complete";
    case Verdict::incomplete: return "incomplete";
    case Verdict::undetermined: return "undetermined";
    }
    return "undetermined";
}

CompletenessReport classify_completeness(const Profile& p, double horizon, int samples, double eps_fit,
                                         double max_fit_rms, const QuadratureControl& quad)
{
    if (!(horizon >= 10.0))
        throw ValidationError("horizon", "must be >= 10");
    if (samples < 20)
        throw ValidationError("samples", "must be >= 20");
    if (!(eps_fit > 0.0))
        throw ValidationError("eps_fit", "must be positive");
    if (horizon > p.max_radius())
        throw ValidationError("horizon", "exceeds the profile's tabulated range");

    CompletenessReport rep;
    rep.eps_fit = eps_fit;
    rep.horizon = horizon;
    rep.r.resize(samples);
    const double a = 0.5 * horizon;
    for (int i = 0; i < samples; ++i)
        rep.r[i] = a + (horizon - a) * i / (samples - 1.0);
    rep.r.back() = horizon;
    rep.H = eval_H(p, rep.r, quad);
    rep.dH.resize(samples);
    for (int i = 0; i < samples; ++i)
        rep.dH[i] = eval_dH(p, rep.r[i], quad);
    rep.H_horizon = rep.H.back();

    for (int i = 0; i < samples; ++i)
        if (!std::isfinite(rep.H[i]) || !std::isfinite(rep.dH[i]) || !(rep.dH[i] > 0.0))
            throw NumericalFailure("non-finite H sample at r=" + std::to_string(rep.r[i]), "classify_completeness");

    // least squares: log H' = log c - sigma log r
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < samples; ++i) {
        const double x = std::log(rep.r[i]), y = std::log(rep.dH[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double N = samples;
    const double slope = (N * sxy - sx * sy) / (N * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / N;
    double ss = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double res = std::log(rep.dH[i]) - (intercept + slope * std::log(rep.r[i]));
        ss += res * res;
    }
    rep.sigma = -slope;
    rep.c = std::exp(intercept);
    rep.fit_rms = std::sqrt(ss / N);

    if (rep.fit_rms > max_fit_rms)
        rep.verdict = Verdict::undetermined;
    else if (rep.sigma <= 1.0 - eps_fit)
        rep.verdict = Verdict::complete;
    else if (rep.sigma >= 1.0 + eps_fit)
        rep.verdict = Verdict::incomplete;
    else
        rep.verdict = Verdict::undetermined;
    return rep;
}

std::string to_string(StencilKind k)
{
    switch (k) {
    case StencilKind::symmetry_origin: return "symmetry_origin";
    case StencilKind::central: return "central";
    case StencilKind::upwind: return "upwind";
    case StencilKind::one_sided_boundary: return "one_sided_boundary";
    }
    return "unknown";
}

std::vector<std::vector<double>> finite_difference_weights(double x0, std::span<const double> x, int max_order)
{
    const int n = static_cast<int>(x.size()) - 1;
    std::vector<std::vector<double>> c(max_order + 1, std::vector<double>(x.size(), 0.0));
    double c1 = 1.0, c4 = x[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i <= n; ++i) {
        const int mn = std::min(i, max_order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    return c;
}

LaplacianResult radial_laplacian(const Profile& p, const RadialField& f)
{
    const RadialGrid& g = f.grid();
    if (g.cells() < 4)
        throw ValidationError("grid", "radial_laplacian needs at least 4 cells");
    const std::size_t N = g.cells();
    const int n = p.dim();
    std::vector<double> out(N + 1);
    std::vector<StencilKind> kind(N + 1, StencilKind::central);

    const RadialOperator op = assemble_radial_operator(p, g, StencilPolicy::central);
    for (std::size_t i = 0; i < N; ++i) {
        out[i] = op.apply_row(i, f.values());
        kind[i] = op.stencil[i];
    }

    const double nodes[4] = {g[N], g[N - 1], g[N - 2], g[N - 3]};
    const auto w = finite_difference_weights(g[N], nodes, 2);
    double d1 = 0.0, d2 = 0.0;
    for (int j = 1; j < 4; ++j) {
        d1 += w[1][j] * (f[N - j] - f[N]);
        d2 += w[2][j] * (f[N - j] - f[N]);
    }
    out[N] = d2 + (n - 1) * p.log_derivative(g[N]) * d1;
    kind[N] = StencilKind::one_sided_boundary;
    return {RadialField(f.grid_ptr(), std::move(out)), std::move(kind)};
}

double RadialOperator::apply_row(std::size_t i, std::span<const double> f) const
{
    // rows sum to zero; differencing keeps constants in the kernel exactly
    double v = upper[i] * (f[i + 1] - f[i]);
    if (i > 0)
        v += lower[i] * (f[i - 1] - f[i]);
    return v;
}

RadialOperator assemble_radial_operator(const Profile& p, const RadialGrid& g, StencilPolicy policy)
{
    const std::size_t N = g.cells();
    const int n = p.dim();
    RadialOperator op;
    op.lower.assign(N, 0.0);
    op.diag.assign(N, 0.0);
    op.upper.assign(N, 0.0);
    op.stencil.assign(N, StencilKind::central);

    // symmetric extension f(-h) = f(h): Lf(0) = n f''(0) = 2n (f_1 - f_0)/h^2
    const double h1 = g.spacing(0);
    op.diag[0] = -2.0 * n / (h1 * h1);
    op.upper[0] = 2.0 * n / (h1 * h1);
    op.stencil[0] = StencilKind::symmetry_origin;

    for (std::size_t i = 1; i < N; ++i) {
        const double hl = g.spacing(i - 1), hr = g.spacing(i);
        const double drift = (n - 1) * p.log_derivative(g[i]);
        const double a2 = 2.0 / (hl * (hl + hr)), c2 = 2.0 / (hr * (hl + hr));
        double a = a2 - drift * hr / (hl * (hl + hr));
        double c = c2 + drift * hl / (hr * (hl + hr));
        if (policy == StencilPolicy::monotone && a < 0.0) {
            a = a2;
            c = c2 + drift / hr;
            op.stencil[i] = StencilKind::upwind;
        }
        op.lower[i] = a;
        op.diag[i] = -(a + c);
        op.upper[i] = c;
    }
    return op;
}

double ball_integral(const Profile& p, const RadialGrid& g, std::span<const double> values, double R)
{
    if (values.size() != g.size())
        throw std::invalid_argument("ball_integral: value count does not match grid");
    if (R > g.radius() * (1.0 + 1e-12))
        throw std::invalid_argument("ball_integral: radius exceeds grid");
    R = std::min(R, g.radius());
    using GL = boost::math::quadrature::gauss<double, 8>;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < g.size() && g[i] < R; ++i) {
        const double a = g[i], b = std::min(g[i + 1], R), h = g.spacing(i);
        const double fa = values[i], fb = values[i + 1];
        auto integrand = [&](double r) {
            const double t = (r - a) / h;
            return ((1.0 - t) * fa + t * fb) * volume_density(p, r);
        };
        acc += GL::integrate(integrand, a, b);
    }
    return sphere_area(p.dim()) * acc;
}

}  // namespace fdlab
