#include "fdlab/parabolic.hpp"

#include "fdlab/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fdlab {

void FdeConfig::validate() const
{
    if (!(m > 0.0 && m < 1.0))
        throw ValidationError("m", "must be in (0,1)");
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ValidationError("dt", "must be positive");
    if (!(t_end > 0.0) || !std::isfinite(t_end))
        throw ValidationError("t_end", "must be positive");
    if (dt > t_end)
        throw ValidationError("dt", "must not exceed t_end");
    if (!(newton.tol > 0.0))
        throw ValidationError("newton_tol", "must be positive");
    if (newton.max_iter < 1)
        throw ValidationError("newton_max", "must be >= 1");
    if (!(mobility_floor >= 0.0) || !std::isfinite(mobility_floor))
        throw ValidationError("delta", "must be >= 0");
    if (store_every < 1)
        throw ValidationError("store_every", "must be >= 1");
}

double mobility_power(double s, double m, double delta)
{
    if (delta > 0.0)
        return s * std::pow(s * s + delta * delta, 0.5 * (m - 1.0));
    return std::copysign(std::pow(std::abs(s), m), s);
}

double mobility_power_derivative(double s, double m, double delta)
{
    if (delta > 0.0) {
        const double q = s * s + delta * delta;
        return std::pow(q, 0.5 * (m - 3.0)) * (delta * delta + m * s * s);
    }
    return m * std::pow(std::abs(s), m - 1.0);
}

std::size_t SpaceTimeField::time_index(double t) const
{
    for (std::size_t k = 0; k < times.size(); ++k)
        if (std::abs(times[k] - t) <= 1e-9 * std::max(1.0, std::abs(t)))
            return k;
    std::ostringstream os;
    os << "time " << t << " is not a stored time";
    throw ValidationError("t", os.str());
}

SpaceTimeField solve_fde(const Profile& prof, const FdeConfig& cfg, const GridPtr& grid, const RadialField& u0,
                         double boundary, const Forcing& forcing)
{
    cfg.validate();
    if (!same_grid(u0.grid_ptr(), grid))
        throw ValidationError("u0", "datum is not sampled on the solve grid");
    if (!std::isfinite(boundary))
        throw ValidationError("boundary", "must be finite");
    if (grid->radius() > prof.max_radius())
        throw ValidationError("grid.R", "exceeds the profile's tabulated range");

    const RadialGrid& g = *grid;
    const std::size_t N = g.cells();
    const double m = cfg.m, delta = cfg.mobility_floor;
    const bool regularized = delta > 0.0;

    auto admissible = [&](std::span<const double> x, double sign) {
        if (regularized)
            return true;
        return std::all_of(x.begin(), x.end(), [sign](double v) { return v * sign > 0.0; });
    };

    std::vector<double> u(u0.values().begin(), u0.values().begin() + static_cast<std::ptrdiff_t>(N));
    double sign = boundary >= 0.0 ? 1.0 : -1.0;
    if (!regularized && (boundary == 0.0 || !admissible(u, sign) || u0[N] * sign < 0.0))
        throw ValidationError("delta", "state crosses or touches 0; use delta > 0 (mobility_floor) for this run");

    const RadialOperator L = assemble_radial_operator(prof, g, StencilPolicy::monotone);
    const double phi_b = mobility_power(boundary, m, delta);
    const double dt = cfg.dt;
    const long nsteps = static_cast<long>(std::ceil(cfg.t_end / dt - 1e-9));

    SpaceTimeField out;
    out.grid = grid;
    auto store = [&](double t) {
        std::vector<double> full(u);
        full.push_back(boundary);
        out.times.push_back(t);
        out.states.emplace_back(grid, std::move(full));
    };
    // the stored initial state carries the boundary value at r = R
    out.times.push_back(0.0);
    out.states.push_back(u0);

    std::vector<double> u_old(N), phi(N), source(N, 0.0);
    double t = 0.0;
    double step_dt = dt;

    TridiagonalSystem sys;
    sys.residual = [&](std::span<const double> x, std::span<double> F) {
        if (!admissible(x, sign))
            return false;
        for (std::size_t i = 0; i < N; ++i)
            phi[i] = mobility_power(x[i], m, delta);
        for (std::size_t i = 0; i < N; ++i) {
            double lap = L.diag[i] * phi[i];
            if (i > 0)
                lap += L.lower[i] * phi[i - 1];
            lap += L.upper[i] * (i + 1 < N ? phi[i + 1] : phi_b);
            F[i] = x[i] - u_old[i] - step_dt * (lap + source[i]);
        }
        return true;
    };
    sys.jacobian = [&](std::span<const double> x, Tridiagonal& J) {
        for (std::size_t i = 0; i < N; ++i) {
            const double d = mobility_power_derivative(x[i], m, delta);
            J.diag[i] = 1.0 - step_dt * L.diag[i] * d;
            if (i + 1 < N)
                J.lower[i + 1] = -step_dt * L.lower[i + 1] * d;
            if (i > 0)
                J.upper[i - 1] = -step_dt * L.upper[i - 1] * d;
        }
    };
    sys.scale = [&](std::span<const double>) {
        double s = std::abs(boundary);
        for (double v : u_old)
            s = std::max(s, std::abs(v));
        return s;
    };
    sys.roundoff = [&](std::span<const double> x) {
        double s = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double pr = mobility_power(i + 1 < N ? x[i + 1] : boundary, m, delta);
            const double pc = mobility_power(x[i], m, delta);
            double t = std::abs(L.diag[i] * pc) + std::abs(L.upper[i] * pr);
            if (i > 0)
                t += std::abs(L.lower[i] * mobility_power(x[i - 1], m, delta));
            s = std::max(s, std::abs(x[i]) + std::abs(u_old[i]) + step_dt * (t + std::abs(source[i])));
        }
        return 64.0 * std::numeric_limits<double>::epsilon() * s;
    };

    for (long step = 1; step <= nsteps; ++step) {
        step_dt = std::min(dt, cfg.t_end - t);
        if (step == nsteps)
            step_dt = cfg.t_end - t;
        const double t_new = step == nsteps ? cfg.t_end : t + step_dt;
        u_old = u;
        if (forcing)
            for (std::size_t i = 0; i < N; ++i)
                source[i] = forcing(g[i], t_new);
        try {
            damped_newton(sys, u, cfg.newton, "solve_fde");
        } catch (const NumericalFailure& e) {
            std::string msg = std::string(e.what()) + " at time step " + std::to_string(step);
            if (!regularized)
                msg += " (if the state approaches 0, rerun with delta > 0)";
            throw NumericalFailure(msg, "solve_fde", step, e.residual_history(), e.line_search_exhausted());
        }
        t = t_new;
        if (step % cfg.store_every == 0 || step == nsteps)
            store(t);
    }
    return out;
}

void LiftedProblem::validate() const
{
    if (!(ell > 0.0) || !std::isfinite(ell))
        throw ValidationError("ell", "must be positive");
    if (!(beta > 0.0))
        throw ValidationError("beta", "must be positive");
    for (std::size_t i = 0; i < u0.size(); ++i)
        if (!(u0[i] >= 0.0))
            throw ValidationError("u0", "datum must be nonnegative (node " + std::to_string(i) + ")");
}

SpaceTimeField solve_lifted(const Profile& prof, const FdeConfig& cfg, const LiftedProblem& prob)
{
    prob.validate();
    const GridPtr& grid = prob.u0.grid_ptr();
    std::vector<double> start(prob.u0.size());
    for (std::size_t i = 0; i < start.size(); ++i)
        start[i] = prob.ell + std::min(prob.u0[i], prob.beta);
    start.back() = prob.ell;

    SpaceTimeField out = solve_fde(prof, cfg, grid, RadialField(grid, std::move(start)), prob.ell);

    constexpr double slack = 1e-8;
    const double lo = prob.ell, hi = prob.ell + prob.beta;
    for (std::size_t k = 0; k < out.steps(); ++k) {
        for (std::size_t i = 0; i < grid->size(); ++i) {
            const double v = out.states[k][i];
            if (v < lo - slack || v > hi + slack) {
                std::ostringstream os;
                os << "lifted solution left [ell, ell+beta] = [" << lo << ", " << hi << "]: u=" << v << " at r="
                   << (*grid)[i] << ", t=" << out.times[k];
                throw NumericalFailure(os.str(), "solve_lifted", static_cast<long>(k));
            }
        }
    }
    return out;
}

Datum Datum::constant(double c)
{
    return {"constant", [c](double) { return c; }, Sampling::pointwise, std::abs(c)};
}

Datum Datum::tent(double height, double radius)
{
    if (!(radius > 0.0))
        throw ValidationError("datum.radius", "must be positive");
    return {"tent", [height, radius](double r) { return std::max(0.0, height * (1.0 - r / radius)); },
            Sampling::pointwise, std::abs(height)};
}

Datum Datum::gaussian(double amplitude, double width)
{
    if (!(width > 0.0))
        throw ValidationError("datum.width", "must be positive");
    return {"gaussian", [amplitude, width](double r) { return amplitude * std::exp(-r * r / (width * width)); },
            Sampling::pointwise, std::abs(amplitude)};
}

Datum Datum::power(double amplitude, double exponent)
{
    if (!(exponent > 0.0))
        throw ValidationError("datum.exponent", "must be positive");
    return {"power",
            [amplitude, exponent](double r) { return r > 0.0 ? amplitude * std::pow(r, -exponent) : HUGE_VAL; },
            Sampling::cell_average, std::numeric_limits<double>::infinity()};
}

RadialField sample_datum(const Profile& prof, const Datum& datum, const GridPtr& grid)
{
    const RadialGrid& g = *grid;
    std::vector<double> v(g.size());
    if (datum.sampling == Datum::Sampling::pointwise) {
        for (std::size_t i = 0; i < g.size(); ++i)
            v[i] = datum.f(g[i]);
    } else {
        using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double a = i == 0 ? 0.0 : 0.5 * (g[i - 1] + g[i]);
            const double b = i + 1 == g.size() ? g[i] : 0.5 * (g[i] + g[i + 1]);
            auto num = [&](double r) { return datum.f(r) * volume_density(prof, r); };
            auto den = [&](double r) { return volume_density(prof, r); };
            const double top = GK::integrate(num, a, b, 30, 1e-10);
            const double bottom = GK::integrate(den, a, b, 30, 1e-12);
            v[i] = top / bottom;
        }
    }
    for (std::size_t i = 0; i < v.size(); ++i)
        if (!std::isfinite(v[i]))
            throw ValidationError("datum", "non-finite sample at r=" + std::to_string(g[i]) +
                                               " (use cell averaging for singular data)");
    return RadialField(grid, std::move(v));
}

RadialField extend_by_zero(const RadialField& f, const GridPtr& larger)
{
    const double R_old = f.grid().radius();
    if (larger->radius() < R_old * (1.0 - 1e-12))
        throw ValidationError("larger_grid", "extension target must contain the old radius");
    std::vector<double> v(larger->size(), 0.0);
    const double seam = R_old * (1.0 + 1e-12);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double r = (*larger)[i];
        if (r <= seam)
            v[i] = f.interpolate(std::min(r, R_old));
    }
    return RadialField(larger, std::move(v));
}

SpaceTimeField extend_by_zero(const SpaceTimeField& f, const GridPtr& larger)
{
    SpaceTimeField out;
    out.grid = larger;
    out.times = f.times;
    out.states.reserve(f.states.size());
    for (const auto& s : f.states)
        out.states.push_back(extend_by_zero(s, larger));
    return out;
}

double probe_sup_difference(const SpaceTimeField& a, const SpaceTimeField& b, double radius)
{
    if (a.times.size() != b.times.size())
        throw std::invalid_argument("probe_sup_difference: time meshes differ");
    const std::size_t na = a.grid->last_node_at_or_below(radius);
    const std::size_t nb = b.grid->last_node_at_or_below(radius);
    const std::size_t n = std::min(na, nb);
    double sup = 0.0;
    for (std::size_t k = 0; k < a.times.size(); ++k)
        for (std::size_t i = 0; i <= n; ++i)
            sup = std::max(sup, std::abs(a.states[k][i] - b.states[k][i]));
    return sup;
}

double order_violation(const SpaceTimeField& a, const SpaceTimeField& b)
{
    if (a.times.size() != b.times.size())
        throw std::invalid_argument("order_violation: time meshes differ");
    const std::size_t n = std::min(a.grid->size(), b.grid->size());
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < a.times.size(); ++k)
        for (std::size_t i = 0; i < n; ++i)
            worst = std::max(worst, a.states[k][i] - b.states[k][i]);
    return worst;
}

}  // namespace fdlab
