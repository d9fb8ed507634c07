#pragma once

#include "fdlab/geometry.hpp"
#include "fdlab/grid.hpp"
#include "fdlab/newton.hpp"
#include "fdlab/profile.hpp"

#include <functional>
#include <string>
#include <vector>

namespace fdlab {

struct FdeConfig {
    double m = 0.5;
    double dt = 1e-2;
    double t_end = 1.0;
    NewtonControl newton{1e-12, 60};
    /// delta in phi_delta(s) = s (s^2 + delta^2)^((m-1)/2); 0 means sign(s)|s|^m
    double mobility_floor = 0.0;
    int store_every = 1;

    void validate() const;
};

/// phi_delta(s): the (regularized) signed power s^m.
double mobility_power(double s, double m, double delta);
/// d phi_delta / ds
double mobility_power_derivative(double s, double m, double delta);

/// Snapshots u(., t_k) of a radial solution, all on one grid.
struct SpaceTimeField {
    GridPtr grid;
    std::vector<double> times;
    std::vector<RadialField> states;

    std::size_t steps() const noexcept { return times.size(); }
    /// Index of the stored time equal to t (relative tolerance 1e-9); throws otherwise.
    std::size_t time_index(double t) const;
    const RadialField& at(double t) const { return states[time_index(t)]; }
};

/// Source term f(r, t) added to the right-hand side (manufactured solutions).
using Forcing = std::function<double(double r, double t)>;

/// Backward Euler for u_t = Delta phi_delta(u) + f on B_R with u'(0) = 0 and
/// u(R) = boundary; each step is solved by damped Newton.
SpaceTimeField solve_fde(const Profile& prof, const FdeConfig& cfg, const GridPtr& grid, const RadialField& u0,
                         double boundary, const Forcing& forcing = {});

/// Boundary lift ell, datum truncation beta, on the ball of radius R.
struct LiftedProblem {
    double ell = 0.1;
    double beta = 1.0;
    RadialField u0;  ///< nonnegative datum sampled on the solve grid

    void validate() const;
};

/// Solves with datum ell + min(u0, beta) and boundary value ell; checks that
/// ell <= u <= ell + beta holds at every stored time.
SpaceTimeField solve_lifted(const Profile& prof, const FdeConfig& cfg, const LiftedProblem& prob);

/// A nonnegative (or signed, for solve_fde) radial initial datum.
struct Datum {
    enum class Sampling { pointwise, cell_average };

    std::string name;
    std::function<double(double r)> f;
    Sampling sampling = Sampling::pointwise;
    double sup_hint = 1.0;  ///< scale used for default tolerances; infinity for unbounded data

    static Datum constant(double c);
    /// max(0, height (1 - r/radius))
    static Datum tent(double height, double radius);
    static Datum gaussian(double amplitude, double width);
    /// amplitude * r^(-exponent): locally integrable for exponent < n, cell averaged
    static Datum power(double amplitude, double exponent);
};

/// Datum on a grid: pointwise values or psi^(n-1)-weighted averages over the
/// dual cells [r_{i-1/2}, r_{i+1/2}].
RadialField sample_datum(const Profile& prof, const Datum& datum, const GridPtr& grid);

/// Zero beyond the old radius, linear interpolation inside; the seam at the
/// old boundary is kept as a jump.
SpaceTimeField extend_by_zero(const SpaceTimeField& f, const GridPtr& larger);
RadialField extend_by_zero(const RadialField& f, const GridPtr& larger);

/// Approximation ladder: domains R_k (increasing), lifts ell_j (decreasing),
/// truncations beta_i (increasing).
struct LiftSchedule {
    std::vector<double> radii;
    std::vector<double> lifts;
    std::vector<double> truncations;
    double cell_size = 0.02;     ///< uniform spacing shared by all domains, so grids nest
    double probe_radius = 0.5;
    double tolerance = 1e-4;

    /// R_k = 2^k R0, ell_j = 4^-j ell0, beta_i = 2^i beta0, probe R0/2,
    /// tolerance 1e-4 max(datum_sup, 1).
    static LiftSchedule geometric(double R0, int n_radii, double ell0, int n_lifts, double beta0, int n_truncations,
                                  double cell_size, double datum_sup);
    void validate() const;
};

struct LadderEntry {
    enum class Sweep { truncation, lift, radius };
    Sweep sweep;
    int k = 0, j = 0, i = 0;
    double increment = 0.0;           ///< sup over the probe ball and stored times
    double ordering_violation = 0.0;  ///< max amount by which the expected order fails (<= 0 is fine)
};

std::string to_string(LadderEntry::Sweep s);

struct MinimalSolutionResult {
    SpaceTimeField field;
    RadialField datum;               ///< u0 sampled on the final grid
    std::vector<LadderEntry> ladder_log;
    bool converged = false;
    double final_lift = 0.0;
    double final_truncation = 0.0;
    double final_radius = 0.0;
    double max_ordering_violation = 0.0;
};

/// beta up, then ell down, then R_k up; each sweep stops once successive
/// increments on the probe ball fall below the ladder tolerance.
MinimalSolutionResult minimal_solution(const Profile& prof, const FdeConfig& cfg, const Datum& datum,
                                       const LiftSchedule& ladder);

/// Max violation of each family of the ordering chain on the full (k, ell, beta)
/// lattice of a ladder.
struct OrderingChainReport {
    double lower_bound = 0.0;        ///< ell - u
    double upper_bound = 0.0;        ///< u - (ell + beta)
    double domain_order = 0.0;       ///< u_k - u_{k+1} on common nodes
    double extended_order = 0.0;     ///< ext(u_k) - u_{k+1} on the larger grid
    double lift_order = 0.0;         ///< u_{ell} - u_{ell'} for ell < ell'
    double truncation_order = 0.0;   ///< u_{beta} - u_{beta'} for beta < beta'
    int solves = 0;

    double worst() const;
};

OrderingChainReport check_ordering_chain(const Profile& prof, const FdeConfig& cfg, const Datum& datum,
                                         const LiftSchedule& ladder);

/// sup over stored times and nodes with r <= radius of |a - b|; shared nodes
/// are matched by index (grids of a ladder nest).
double probe_sup_difference(const SpaceTimeField& a, const SpaceTimeField& b, double radius);

/// max over stored times and common nodes of (a - b), i.e. how much a <= b fails.
double order_violation(const SpaceTimeField& a, const SpaceTimeField& b);

}  // namespace fdlab
