#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace fdlab {

enum class ProfileKind { euclidean, hyperbolic, power_exponential, table };

std::string to_string(ProfileKind kind);

/// Declarative description of a warping function, as read from a scenario file.
struct ProfileDescriptor {
    ProfileKind kind = ProfileKind::euclidean;
    int dim = 3;
    double curvature_scale = 1.0;  ///< hyperbolic: psi(r) = sinh(a r)/a
    double exponent = 2.0;         ///< power_exponential: psi(r) = r exp(r^q/q)
    std::vector<double> table_r;   ///< table: strictly increasing, starting at 0
    std::vector<double> table_psi;
    std::vector<double> table_dpsi;  ///< optional; empty means monotone slopes are estimated
};

class TableWarp;

/// Warping function psi of a model manifold dr^2 + psi(r)^2 g_{S^{n-1}}, together
/// with the dimension n. Immutable and cheap to copy.
class Profile {
public:
    static Profile euclidean(int dim);
    static Profile hyperbolic(int dim, double a);
    static Profile power_exponential(int dim, double q);
    static Profile table(int dim, std::vector<double> r, std::vector<double> psi,
                         std::vector<double> dpsi = {});

    ProfileKind kind() const noexcept { return kind_; }
    int dim() const noexcept { return dim_; }
    double curvature_scale() const noexcept { return a_; }
    double exponent() const noexcept { return q_; }

    double psi(double r) const;
    double dpsi(double r) const;
    double d2psi(double r) const;
    /// log psi(r); finite for large r where psi itself overflows.
    double log_psi(double r) const;
    /// log(psi(z)/psi(r)) without the cancellation of log_psi(z) - log_psi(r).
    double log_psi_ratio(double z, double r) const;
    /// psi'(r)/psi(r), the mean-curvature factor of geodesic spheres (up to n-1).
    double log_derivative(double r) const;

    /// Largest radius at which psi can be evaluated (infinity except for tables).
    double max_radius() const;

    std::string describe() const;

private:
    Profile() = default;

    ProfileKind kind_ = ProfileKind::euclidean;
    int dim_ = 3;
    double a_ = 1.0;
    double q_ = 2.0;
    std::shared_ptr<const TableWarp> table_;
};

Profile make_profile(const ProfileDescriptor& spec);

/// Reads a table profile from CSV with a header row and columns r, psi[, dpsi].
Profile read_table_profile(std::istream& in, int dim);

}  // namespace fdlab
