#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace fdlab {

/// Tridiagonal matrix with sub-diagonal `lower` (lower[0] unused), `diag` and
/// super-diagonal `upper` (upper[n-1] unused).
struct Tridiagonal {
    std::vector<double> lower, diag, upper;

    explicit Tridiagonal(std::size_t n = 0) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}
    std::size_t size() const noexcept { return diag.size(); }
};

/// Thomas algorithm; overwrites rhs with the solution. Throws on a zero pivot.
void solve_tridiagonal(const Tridiagonal& A, std::span<double> rhs);

struct NewtonControl {
    double tol = 1e-12;          ///< on the scaled max-norm of the residual
    int max_iter = 60;
    double damping = 0.5;        ///< backtracking factor
    double min_step = 0x1p-20;   ///< smallest admissible step length
};

struct NewtonStats {
    int iterations = 0;
    double residual = 0.0;  ///< final scaled max-norm residual
    std::vector<double> history;
};

/// Nonlinear system with a tridiagonal Jacobian.
struct TridiagonalSystem {
    /// Fills F(x); returns false when x is outside the admissible set (for
    /// example a sign change the nonlinearity cannot handle).
    std::function<bool(std::span<const double> x, std::span<double> F)> residual;
    std::function<void(std::span<const double> x, Tridiagonal& J)> jacobian;
    /// Magnitude used to make the convergence test relative; at least 1.
    std::function<double(std::span<const double> x)> scale;
    /// Optional absolute residual level set by floating-point cancellation
    /// (for example eps times the size of the summed terms); a residual at or
    /// below it counts as converged.
    std::function<double(std::span<const double> x)> roundoff;
};

/// Damped Newton with backtracking on the l2 residual. Throws NumericalFailure
/// (with the residual history) on divergence or line-search exhaustion.
NewtonStats damped_newton(const TridiagonalSystem& sys, std::vector<double>& x, const NewtonControl& ctl,
                          const std::string& context);

}  // namespace fdlab
