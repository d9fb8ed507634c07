#include "fdlab/elliptic.hpp"

#include "fdlab/error.hpp"

#include <algorithm>
#include <cmath>

namespace fdlab {

double default_barrier_constant(double p)
{
    if (!(p > 1.0) || !std::isfinite(p))
        throw ValidationError("p", "must be in (1, inf)");
    return std::pow(2.0 * (3.0 * p + 1.0) / ((p - 1.0) * (p - 1.0)), 1.0 / (p - 1.0));
}

BarrierSpec BarrierSpec::with_default_constant(double p, double alpha, double R)
{
    BarrierSpec s{p, alpha, R, default_barrier_constant(p)};
    s.validate();
    return s;
}

void BarrierSpec::validate() const
{
    if (!(p > 1.0) || !std::isfinite(p))
        throw ValidationError("p", "must be in (1, inf)");
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw ValidationError("alpha", "must be in (0, inf)");
    if (!(R > 0.0) || !std::isfinite(R))
        throw ValidationError("R", "must be in (0, inf)");
    if (!(C >= default_barrier_constant(p) * (1.0 - 1e-12)))
        throw ValidationError("C", "must be >= [2(3p+1)/(p-1)^2]^(1/(p-1))");
}

namespace {

double barrier_from_H(const BarrierSpec& s, double HR, double Hr)
{
    const double e = 1.0 / (s.p - 1.0);
    return std::pow(s.alpha, -e) * s.C * std::pow(HR, e) / std::pow(HR - Hr, 2.0 * e);
}

}  // namespace

double eval_barrier(const Profile& prof, const BarrierSpec& spec, double r, const QuadratureControl& quad)
{
    spec.validate();
    if (r < 0.0)
        throw ValidationError("r", "must be nonnegative");
    if (r >= spec.R)
        throw ValidationError("r", "barrier blows up at r = R; need r < R");
    const double radii[2] = {r, spec.R};
    const auto H = eval_H(prof, radii, quad);
    return barrier_from_H(spec, H[1], H[0]);
}

RadialField barrier_field(const Profile& prof, const BarrierSpec& spec, const GridPtr& grid,
                          const QuadratureControl& quad)
{
    spec.validate();
    if (grid->radius() >= spec.R)
        throw ValidationError("grid.R", "barrier grid must stay strictly inside B_R");
    std::vector<double> radii(grid->nodes().begin(), grid->nodes().end());
    radii.push_back(spec.R);
    const auto H = eval_H(prof, radii, quad);
    const double HR = H.back();
    std::vector<double> w(grid->size());
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = barrier_from_H(spec, HR, H[i]);
    return RadialField(grid, std::move(w));
}

SupersolutionReport verify_supersolution(const Profile& prof, const RadialField& W, const BarrierSpec& spec,
                                         double tol)
{
    spec.validate();
    const std::size_t N = W.grid().cells();
    for (std::size_t i = 0; i < N; ++i)
        if (!(W[i] > 0.0))
            throw ValidationError("W", "supersolution candidate must be positive (node " + std::to_string(i) + ")");
    if (W.grid().radius() >= spec.R)
        throw ValidationError("grid.R", "grid must stay strictly inside B_R");

    const LaplacianResult lap = radial_laplacian(prof, W);
    SupersolutionReport rep;
    rep.tolerance_used = tol;
    rep.residual.assign(N + 1, 0.0);
    rep.max_violation = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < N; ++i) {
        const double v = lap.values[i] - spec.alpha * std::pow(W[i], spec.p);
        rep.residual[i] = v;
        if (v > rep.max_violation) {
            rep.max_violation = v;
            rep.node_of_max = i;
        }
    }
    rep.pass = rep.max_violation <= tol;
    return rep;
}

SemilinearSolution solve_semilinear(const Profile& prof, const BarrierSpec& spec, const GridPtr& grid,
                                    double boundary_value, const NewtonControl& newton)
{
    spec.validate();
    if (!(boundary_value >= 0.0) || !std::isfinite(boundary_value))
        throw ValidationError("boundary_value", "must be finite and >= 0");
    const RadialGrid& g = *grid;
    const std::size_t N = g.cells();
    const RadialOperator L = assemble_radial_operator(prof, g, StencilPolicy::monotone);
    const double p = spec.p, alpha = spec.alpha;

    auto odd_power = [p](double w) { return std::copysign(std::pow(std::abs(w), p), w); };

    // unknowns are nodes 0..N-1; W_N is the Dirichlet value
    TridiagonalSystem sys;
    sys.residual = [&](std::span<const double> x, std::span<double> F) {
        for (std::size_t i = 0; i < N; ++i) {
            double lap = L.diag[i] * x[i];
            if (i > 0)
                lap += L.lower[i] * x[i - 1];
            lap += L.upper[i] * (i + 1 < N ? x[i + 1] : boundary_value);
            F[i] = alpha * odd_power(x[i]) - lap;
        }
        return true;
    };
    sys.jacobian = [&](std::span<const double> x, Tridiagonal& J) {
        for (std::size_t i = 0; i < N; ++i) {
            J.lower[i] = i > 0 ? -L.lower[i] : 0.0;
            J.diag[i] = alpha * p * std::pow(std::abs(x[i]), p - 1.0) - L.diag[i];
            J.upper[i] = i + 1 < N ? -L.upper[i] : 0.0;
        }
    };
    sys.scale = [&](std::span<const double> x) {
        double s = 1.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double right = i + 1 < N ? x[i + 1] : boundary_value;
            double t = std::abs(L.diag[i] * x[i]) + std::abs(L.upper[i] * right) + alpha * std::pow(std::abs(x[i]), p);
            if (i > 0)
                t += std::abs(L.lower[i] * x[i - 1]);
            s = std::max(s, t);
        }
        return s;
    };

    std::vector<double> x(N);
    for (std::size_t i = 0; i < N; ++i)
        x[i] = boundary_value * g[i] / g.radius();

    NewtonStats stats;
    if (boundary_value > 0.0)
        stats = damped_newton(sys, x, newton, "solve_semilinear");

    std::vector<double> w(x);
    w.push_back(boundary_value);
    const double floor = -1e-12 * std::max(1.0, boundary_value);
    for (std::size_t i = 0; i < w.size(); ++i)
        if (w[i] < floor)
            throw NumericalFailure("discrete solution went negative at node " + std::to_string(i) +
                                       " for nonnegative boundary data (monotonicity broken)",
                                   "solve_semilinear");
    return {RadialField(grid, std::move(w)), std::move(stats)};
}

std::vector<DecayRow> nonexistence_experiment(const Profile& prof, double p, double alpha,
                                              const std::vector<double>& R_list, double probe_radius,
                                              const NonexistenceOptions& opt)
{
    if (R_list.empty())
        throw ValidationError("R_list", "must not be empty");
    for (std::size_t i = 1; i < R_list.size(); ++i)
        if (!(R_list[i] > R_list[i - 1]))
            throw ValidationError("R_list", "must be strictly increasing");
    if (!(probe_radius > 0.0) || !(probe_radius < 0.5 * R_list.front()))
        throw ValidationError("probe_radius", "must be in (0, min(R_list)/2)");

    std::vector<DecayRow> rows;
    for (double R : R_list) {
        DecayRow row;
        row.R = R;
        try {
            const BarrierSpec spec = BarrierSpec::with_default_constant(p, alpha, R);
            row.sup_barrier = eval_barrier(prof, spec, probe_radius);  // barrier increases in r
            const double scale = eval_barrier(prof, spec, 0.0);
            auto grid = share(RadialGrid::graded(R, opt.cells, opt.grading));
            const SemilinearSolution sol = solve_semilinear(prof, spec, grid, opt.boundary_factor * scale, opt.newton);
            const std::size_t last = grid->last_node_at_or_below(probe_radius);
            double sup = 0.0;
            for (std::size_t i = 0; i <= last; ++i)
                sup = std::max(sup, sol.W[i]);
            row.sup_solution = sup;
            row.newton_iters = sol.newton.iterations;
            row.residual = sol.newton.residual;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace fdlab
