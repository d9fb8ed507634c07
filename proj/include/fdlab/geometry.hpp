#pragma once

#include "fdlab/grid.hpp"
#include "fdlab/profile.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fdlab {

struct QuadratureControl {
    double rel_tol = 1e-13;
    unsigned max_depth = 24;
};

/// psi(r)^(n-1), the density of the Riemannian volume in the radial coordinate
/// (up to the area of the unit (n-1)-sphere).
double volume_density(const Profile& p, double r);

/// Area of the unit (n-1)-sphere in R^n.
double sphere_area(int n);

/// Riemannian volume of the annulus r0 < r(x) < r1.
double shell_volume(const Profile& p, double r0, double r1, const QuadratureControl& quad = {});

/// H'(r) = (int_0^r psi^(n-1)) / psi(r)^(n-1), computed in log space.
double eval_dH(const Profile& p, double r, const QuadratureControl& quad = {});

/// H(r) = int_0^r H'(rho) d rho.
double eval_H(const Profile& p, double r, const QuadratureControl& quad = {});

/// H at every (nondecreasing) radius in `radii`, accumulated panel by panel.
/// Throws if the returned samples are not strictly increasing where the radii are.
std::vector<double> eval_H(const Profile& p, std::span<const double> radii, const QuadratureControl& quad = {});

enum class Verdict { complete, incomplete, undetermined };

std::string to_string(Verdict v);

struct CompletenessReport {
    Verdict verdict = Verdict::undetermined;
    double sigma = 0.0;     ///< fitted decay exponent of H'(r) ~ c r^(-sigma)
    double c = 0.0;
    double fit_rms = 0.0;   ///< rms residual of the log-log fit
    double eps_fit = 0.1;
    double horizon = 0.0;
    double H_horizon = 0.0;
    std::vector<double> r, H, dH;
};

/// Decides whether int_0^inf H'(r) dr diverges from the tail of H' on
/// [horizon/2, horizon].
CompletenessReport classify_completeness(const Profile& p, double horizon, int samples, double eps_fit = 0.1,
                                         double max_fit_rms = 0.05, const QuadratureControl& quad = {});

enum class StencilKind : std::uint8_t { symmetry_origin, central, upwind, one_sided_boundary };

std::string to_string(StencilKind k);

struct LaplacianResult {
    RadialField values;
    std::vector<StencilKind> stencil;
};

/// f'' + (n-1)(psi'/psi) f' with central differences inside, n f''(0) at the
/// origin and a four-point one-sided stencil at r = R.
LaplacianResult radial_laplacian(const Profile& p, const RadialField& f);

enum class StencilPolicy {
    central,   ///< always central differences for the drift term
    monotone,  ///< central unless that gives a negative neighbour weight, then upwind
};

/// Tridiagonal radial Laplacian on rows 0..N-1 (the Dirichlet node N only
/// appears through upper[N-1]).
struct RadialOperator {
    std::vector<double> lower, diag, upper;
    std::vector<StencilKind> stencil;

    std::size_t rows() const noexcept { return diag.size(); }
    /// (L f)_i for i < N using all N+1 values of f.
    double apply_row(std::size_t i, std::span<const double> f) const;
};

RadialOperator assemble_radial_operator(const Profile& p, const RadialGrid& grid,
                                        StencilPolicy policy = StencilPolicy::monotone);

/// Integral over the geodesic ball B_R of a nodal field interpolated linearly,
/// i.e. sphere_area(n) * int_0^R f psi^(n-1) dr with Gauss-Legendre on each cell.
double ball_integral(const Profile& p, const RadialGrid& grid, std::span<const double> values, double R);

/// Fornberg weights for derivatives 0..max_order at x0 from the given nodes;
/// result[k][j] multiplies f(nodes[j]) for the k-th derivative.
std::vector<std::vector<double>> finite_difference_weights(double x0, std::span<const double> nodes, int max_order);

}  // namespace fdlab
