#pragma once

#include "fdlab/geometry.hpp"
#include "fdlab/parabolic.hpp"
#include "fdlab/profile.hpp"

#include <optional>

namespace fdlab {

/// phi_R(r) = phi(r/R) with phi = 1 on [0,1], 0 on [2,inf) and the quintic
/// smoothstep bridge in between (C^2).
struct CutoffFamily {
    double R = 1.0;

    static double shape(double s);
    static double shape_d1(double s);
    static double shape_d2(double s);

    double value(double r) const { return shape(r / R); }
    /// |grad phi_R|(r)
    double gradient_norm(double r) const { return std::abs(shape_d1(r / R)) / R; }
    /// Delta phi_R on the model manifold
    double laplacian(const Profile& p, double r) const;
};

/// kappa_m = (1-m) 2^(1-m) k(k-1) with k = ceil(2/(1-m)).
double kappa_m(double m);

struct HpConstantParts {
    double kappa = 0.0;
    double sup_term = 0.0;        ///< sup over the annulus of |grad phi_R|^2 + |Delta phi_R|
    double annulus_volume = 0.0;  ///< mu(B_2R \ B_R)
    double value = 0.0;           ///< kappa * sup_term * annulus_volume^(1-m)
};

HpConstantParts hp_constant_parts(const Profile& p, double m, double R, int samples = 4001);
double hp_constant(const Profile& p, double m, double R, int samples = 4001);

struct HpReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double H_R = 0.0;
    double slack = 0.0;
    bool pass = false;
    double rel_tol = 0.02;
};

/// [int_{B_R}(u-v)(t)]^(1-m) <= [int_{B_2R}(u-v)(s)]^(1-m) + H_R |t-s| for u >= v.
HpReport check_hp_ordered(const SpaceTimeField& u, const SpaceTimeField& v, const Profile& p, double m, double R,
                          double t, double s, double rel_tol = 0.02);

/// Same estimate with |u - v|, no ordering required.
HpReport check_hp_strong(const SpaceTimeField& u, const SpaceTimeField& v, const Profile& p, double m, double R,
                         double t, double s, double rel_tol = 0.02);

/// [int_{B_R} u(t)]^(1-m) <= [int_{B_2R} datum]^(1-m) + H_R t for a nonnegative
/// solution against the datum it started from.
HpReport check_hp_against_datum(const SpaceTimeField& u, const RadialField& datum, const Profile& p, double m,
                                double R, double t, double rel_tol = 0.02);

/// W(r) = int_0^t0 |u^m - v^m| e^(-s) ds by the trapezoid rule on stored times.
RadialField contraction_functional(const SpaceTimeField& u, const SpaceTimeField& v, double m, double t0);

/// (2 - 2 e^(-t0))^(-(1-m)/m)
double probe_alpha(double m, double t0);

struct ProbeReport {
    double sup_w = 0.0;          ///< sup of W on the probe ball
    double min_defect = 0.0;     ///< min over interior nodes of Delta_h W - alpha W^(1/m)
    double alpha = 0.0;
    double t0 = 0.0;
    double probe_radius = 0.0;
    double barrier_bound = 0.0;  ///< barrier with p = 1/m on the grid ball, at the probe radius
    bool within_barrier = false;
    bool exact_uniqueness = false;  ///< W vanishes identically
    RadialField W;
};

ProbeReport uniqueness_probe(const SpaceTimeField& u, const SpaceTimeField& v, const Profile& p, double m,
                             double t0, double probe_radius, std::optional<double> alpha_override = {});

}  // namespace fdlab
