#include "fdlab/newton.hpp"

#include "fdlab/error.hpp"

#include <algorithm>
#include <sstream>

namespace fdlab {

void solve_tridiagonal(const Tridiagonal& A, std::span<double> rhs)
{
    const std::size_t n = A.size();
    if (rhs.size() != n)
        throw std::invalid_argument("solve_tridiagonal: size mismatch");
    if (n == 0)
        return;
    std::vector<double> c(n, 0.0);
    double pivot = A.diag[0];
    if (pivot == 0.0)
        throw NumericalFailure("zero pivot in tridiagonal solve", "solve_tridiagonal", 0);
    c[0] = n > 1 ? A.upper[0] / pivot : 0.0;
    rhs[0] /= pivot;
    for (std::size_t i = 1; i < n; ++i) {
        pivot = A.diag[i] - A.lower[i] * c[i - 1];
        if (pivot == 0.0 || !std::isfinite(pivot))
            throw NumericalFailure("zero pivot in tridiagonal solve", "solve_tridiagonal", static_cast<long>(i));
        c[i] = i + 1 < n ? A.upper[i] / pivot : 0.0;
        rhs[i] = (rhs[i] - A.lower[i] * rhs[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;)
        rhs[i] -= c[i] * rhs[i + 1];
}

namespace {

double norm2(std::span<const double> v)
{
    double s = 0.0;
    for (double x : v)
        s += x * x;
    return std::sqrt(s);
}

double norm_inf(std::span<const double> v)
{
    double s = 0.0;
    for (double x : v)
        s = std::max(s, std::abs(x));
    return s;
}

}  // namespace

NewtonStats damped_newton(const TridiagonalSystem& sys, std::vector<double>& x, const NewtonControl& ctl,
                          const std::string& context)
{
    const std::size_t n = x.size();
    std::vector<double> F(n), Ftrial(n), dx(n), trial(n);
    Tridiagonal J(n);
    NewtonStats stats;

    if (!sys.residual(x, F))
        throw NumericalFailure("initial Newton iterate is inadmissible", context);

    auto scaled = [&](std::span<const double> r, std::span<const double> at) {
        return norm_inf(r) / std::max(1.0, sys.scale(at));
    };

    auto converged = [&](std::span<const double> r, std::span<const double> at) {
        if (scaled(r, at) <= ctl.tol)
            return true;
        return sys.roundoff && norm_inf(r) <= sys.roundoff(at);
    };

    double res = scaled(F, x);
    stats.history.push_back(res);
    while (!converged(F, x)) {
        if (stats.iterations >= ctl.max_iter || !std::isfinite(res)) {
            std::ostringstream os;
            os << "Newton did not converge after " << stats.iterations << " iterations (residual " << res << ")";
            throw NumericalFailure(os.str(), context, -1, stats.history, false);
        }
        sys.jacobian(x, J);
        for (std::size_t i = 0; i < n; ++i)
            dx[i] = -F[i];
        solve_tridiagonal(J, dx);

        const double f0 = norm2(F);
        double lambda = 1.0;
        bool accepted = false;
        while (lambda >= ctl.min_step) {
            for (std::size_t i = 0; i < n; ++i)
                trial[i] = x[i] + lambda * dx[i];
            if (sys.residual(trial, Ftrial)) {
                const double f1 = norm2(Ftrial);
                if (std::isfinite(f1) && f1 <= (1.0 - 1e-4 * lambda) * f0) {
                    accepted = true;
                    break;
                }
                // Already at round-off level: a full step that does not
                // increase the residual is as good as it gets.
                if (std::isfinite(f1) && f1 <= f0 && converged(Ftrial, trial)) {
                    accepted = true;
                    break;
                }
            }
            lambda *= ctl.damping;
        }
        ++stats.iterations;
        if (!accepted) {
            std::ostringstream os;
            os << "backtracking line search exhausted (step < " << ctl.min_step << ") at residual " << res;
            throw NumericalFailure(os.str(), context, -1, stats.history, true);
        }
        x.swap(trial);
        F.swap(Ftrial);
        res = scaled(F, x);
        stats.history.push_back(res);
    }
    stats.residual = res;
    return stats;
}

}  // namespace fdlab
