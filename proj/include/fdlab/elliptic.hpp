#pragma once

#include "fdlab/geometry.hpp"
#include "fdlab/grid.hpp"
#include "fdlab/newton.hpp"
#include "fdlab/profile.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fdlab {

/// [2(3p+1)/(p-1)^2]^(1/(p-1)): the smallest constant for which the explicit
/// barrier is a supersolution of Delta W = W^p.
double default_barrier_constant(double p);

/// Parameters of the blow-up barrier for Delta W = alpha W^p on B_R.
struct BarrierSpec {
    double p = 2.0;
    double alpha = 1.0;
    double R = 1.0;
    double C = 14.0;

    /// A BarrierSpec with C = default_barrier_constant(p).
    static BarrierSpec with_default_constant(double p, double alpha, double R);
    void validate() const;
};

/// alpha^(-1/(p-1)) C H(R)^(1/(p-1)) / [H(R) - H(r)]^(2/(p-1)), for 0 <= r < R.
double eval_barrier(const Profile& prof, const BarrierSpec& spec, double r, const QuadratureControl& quad = {});

/// The barrier sampled on a grid with grid.radius() < spec.R.
RadialField barrier_field(const Profile& prof, const BarrierSpec& spec, const GridPtr& grid,
                          const QuadratureControl& quad = {});

struct SupersolutionReport {
    double max_violation = 0.0;  ///< max over interior nodes of Delta_h W - alpha W^p
    std::size_t node_of_max = 0;
    double tolerance_used = 0.0;
    bool pass = false;
    std::vector<double> residual;  ///< per node; the last (boundary) node is not checked
};

SupersolutionReport verify_supersolution(const Profile& prof, const RadialField& W, const BarrierSpec& spec,
                                         double tol);

struct SemilinearSolution {
    RadialField W;
    NewtonStats newton;
};

/// Solves Delta_h W = alpha |W|^(p-1) W on the grid with W'(0) = 0 and
/// W(R_grid) = boundary_value.
SemilinearSolution solve_semilinear(const Profile& prof, const BarrierSpec& spec, const GridPtr& grid,
                                    double boundary_value, const NewtonControl& newton = {});

struct NonexistenceOptions {
    double boundary_factor = 1e3;  ///< boundary data = factor * barrier value at the origin
    std::size_t cells = 2000;
    double grading = 20.0;         ///< h_max/h_min, finer toward the boundary
    NewtonControl newton{1e-11, 200};
};

struct DecayRow {
    double R = 0.0;
    double sup_barrier = 0.0;
    double sup_solution = 0.0;
    int newton_iters = 0;
    double residual = 0.0;
    std::optional<std::string> error;
};

/// For each R, the sup over B_probe of the barrier on B_R and of the
/// semilinear solution with very large boundary data on B_R.
std::vector<DecayRow> nonexistence_experiment(const Profile& prof, double p, double alpha,
                                              const std::vector<double>& R_list, double probe_radius,
                                              const NonexistenceOptions& opt = {});

}  // namespace fdlab
