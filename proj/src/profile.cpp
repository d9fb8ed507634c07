#include "fdlab/profile.hpp"

#include "fdlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <sstream>

namespace fdlab {

std::string to_string(ProfileKind kind)
{
    switch (kind) {
    case ProfileKind::euclidean: return "euclidean";
    case ProfileKind::hyperbolic: return "hyperbolic";
    case ProfileKind::power_exponential: return "power_exponential";
    case ProfileKind::table: return "table";
    }
    return "unknown";
}

/// Piecewise cubic Hermite interpolant with Fritsch-Carlson limited slopes, so a
/// nondecreasing table gives a nondecreasing psi.
class TableWarp {
public:
    TableWarp(std::vector<double> r, std::vector<double> psi, std::vector<double> dpsi)
        : r_(std::move(r)), y_(std::move(psi)), d_(std::move(dpsi))
    {
        const std::size_t n = r_.size();
        std::vector<double> secant(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i)
            secant[i] = (y_[i + 1] - y_[i]) / (r_[i + 1] - r_[i]);

        if (d_.empty()) {
            // PCHIP slopes: weighted harmonic mean of neighbouring secants.
            d_.assign(n, 0.0);
            d_[0] = secant[0];
            d_[n - 1] = secant[n - 2];
            for (std::size_t i = 1; i + 1 < n; ++i) {
                const double s0 = secant[i - 1], s1 = secant[i];
                if (s0 * s1 <= 0.0) {
                    d_[i] = 0.0;
                } else {
                    const double h0 = r_[i] - r_[i - 1], h1 = r_[i + 1] - r_[i];
                    const double w0 = 2.0 * h1 + h0, w1 = h1 + 2.0 * h0;
                    d_[i] = (w0 + w1) / (w0 / s0 + w1 / s1);
                }
            }
        }

        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double s = secant[i];
            if (s == 0.0) {
                d_[i] = 0.0;
                d_[i + 1] = 0.0;
                continue;
            }
            const double a = d_[i] / s, b = d_[i + 1] / s;
            const double norm2 = a * a + b * b;
            if (norm2 > 9.0) {
                const double tau = 3.0 / std::sqrt(norm2);
                d_[i] = tau * a * s;
                d_[i + 1] = tau * b * s;
            }
        }
    }

    double max_radius() const { return r_.back(); }

    // order 0, 1, 2 derivative of the interpolant
    double eval(double x, int order) const
    {
        if (x < 0.0 || x > r_.back() * (1.0 + 1e-14))
            throw std::domain_error("table profile evaluated outside its hull at r=" + std::to_string(x));
        x = std::min(x, r_.back());
        auto it = std::upper_bound(r_.begin(), r_.end(), x);
        std::size_t i = it == r_.begin() ? 0 : static_cast<std::size_t>(it - r_.begin()) - 1;
        i = std::min(i, r_.size() - 2);
        const double h = r_[i + 1] - r_[i];
        const double t = (x - r_[i]) / h;
        const double y0 = y_[i], y1 = y_[i + 1], m0 = d_[i] * h, m1 = d_[i + 1] * h;
        switch (order) {
        case 0: {
            const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
            const double h10 = t * (1 - t) * (1 - t);
            const double h01 = t * t * (3 - 2 * t);
            const double h11 = t * t * (t - 1);
            return h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1;
        }
        case 1: {
            const double d00 = 6 * t * t - 6 * t;
            const double d10 = 3 * t * t - 4 * t + 1;
            const double d01 = -6 * t * t + 6 * t;
            const double d11 = 3 * t * t - 2 * t;
            return (d00 * y0 + d10 * m0 + d01 * y1 + d11 * m1) / h;
        }
        default: {
            const double e00 = 12 * t - 6;
            const double e10 = 6 * t - 4;
            const double e01 = -12 * t + 6;
            const double e11 = 6 * t - 2;
            return (e00 * y0 + e10 * m0 + e01 * y1 + e11 * m1) / (h * h);
        }
        }
    }

private:
    std::vector<double> r_, y_, d_;
};

namespace {

void check_dim(int dim)
{
    if (dim < 2)
        throw ValidationError("profile.n", "dimension must be an integer >= 2");
}

}  // namespace

Profile Profile::euclidean(int dim)
{
    check_dim(dim);
    Profile p;
    p.kind_ = ProfileKind::euclidean;
    p.dim_ = dim;
    return p;
}

Profile Profile::hyperbolic(int dim, double a)
{
    check_dim(dim);
    if (!(a > 0.0) || !std::isfinite(a))
        throw ValidationError("profile.a", "curvature scale must be in (0, inf)");
    Profile p;
    p.kind_ = ProfileKind::hyperbolic;
    p.dim_ = dim;
    p.a_ = a;
    return p;
}

Profile Profile::power_exponential(int dim, double q)
{
    check_dim(dim);
    if (!(q > 1.0) || !std::isfinite(q))
        throw ValidationError("profile.q", "exponent must be in (1, inf)");
    Profile p;
    p.kind_ = ProfileKind::power_exponential;
    p.dim_ = dim;
    p.q_ = q;
    return p;
}

Profile Profile::table(int dim, std::vector<double> r, std::vector<double> psi, std::vector<double> dpsi)
{
    check_dim(dim);
    if (r.size() < 3 || psi.size() != r.size())
        throw ValidationError("profile.table", "need at least 3 rows with matching r and psi columns");
    if (!dpsi.empty() && dpsi.size() != r.size())
        throw ValidationError("profile.table", "dpsi column length does not match r");
    if (r.front() != 0.0)
        throw ValidationError("profile.table", "first node must be r = 0");
    if (psi.front() != 0.0)
        throw ValidationError("profile.table", "psi(0) must be 0");
    for (std::size_t i = 1; i < r.size(); ++i) {
        if (!(r[i] > r[i - 1]))
            throw ValidationError("profile.table", "r must be strictly increasing (row " + std::to_string(i) + ")");
        if (!(psi[i] > 0.0))
            throw ValidationError("profile.table", "psi must be positive for r > 0 (row " + std::to_string(i) + ")");
        if (psi[i] < psi[i - 1])
            throw ValidationError("profile.table", "psi must be nondecreasing (row " + std::to_string(i) + ")");
    }
    for (std::size_t i = 0; i < dpsi.size(); ++i)
        if (dpsi[i] < 0.0)
            throw ValidationError("profile.table", "dpsi must be nonnegative (row " + std::to_string(i) + ")");

    Profile p;
    p.kind_ = ProfileKind::table;
    p.dim_ = dim;
    p.table_ = std::make_shared<const TableWarp>(std::move(r), std::move(psi), std::move(dpsi));
    return p;
}

double Profile::psi(double r) const
{
    switch (kind_) {
    case ProfileKind::euclidean: return r;
    case ProfileKind::hyperbolic: return std::sinh(a_ * r) / a_;
    case ProfileKind::power_exponential: return r * std::exp(std::pow(r, q_) / q_);
    case ProfileKind::table: return table_->eval(r, 0);
    }
    return 0.0;
}

double Profile::dpsi(double r) const
{
    switch (kind_) {
    case ProfileKind::euclidean: return 1.0;
    case ProfileKind::hyperbolic: return std::cosh(a_ * r);
    case ProfileKind::power_exponential: {
        const double rq = std::pow(r, q_);
        return std::exp(rq / q_) * (1.0 + rq);
    }
    case ProfileKind::table: return table_->eval(r, 1);
    }
    return 0.0;
}

double Profile::d2psi(double r) const
{
    switch (kind_) {
    case ProfileKind::euclidean: return 0.0;
    case ProfileKind::hyperbolic: return a_ * std::sinh(a_ * r);
    case ProfileKind::power_exponential: {
        const double rq = std::pow(r, q_);
        return std::exp(rq / q_) * std::pow(r, q_ - 1.0) * (1.0 + q_ + rq);
    }
    case ProfileKind::table: return table_->eval(r, 2);
    }
    return 0.0;
}

double Profile::log_psi(double r) const
{
    if (r <= 0.0)
        return -std::numeric_limits<double>::infinity();
    switch (kind_) {
    case ProfileKind::euclidean: return std::log(r);
    case ProfileKind::hyperbolic: {
        const double x = a_ * r;
        if (x < 20.0)
            return std::log(std::sinh(x) / a_);
        return x - std::log(2.0 * a_) + std::log1p(-std::exp(-2.0 * x));
    }
    case ProfileKind::power_exponential: return std::log(r) + std::pow(r, q_) / q_;
    case ProfileKind::table: return std::log(table_->eval(r, 0));
    }
    return 0.0;
}

double Profile::log_psi_ratio(double z, double r) const
{
    if (z <= 0.0)
        return -std::numeric_limits<double>::infinity();
    // z - r is exact near z = r, where r^q amplifies any error in log(z/r)
    const double lz = std::log1p((z - r) / r);
    switch (kind_) {
    case ProfileKind::euclidean: return lz;
    case ProfileKind::hyperbolic: {
        const double x = a_ * z, y = a_ * r;
        if (y < 20.0)
            return std::log(std::sinh(x) / std::sinh(y));
        // sinh(x)/sinh(y) = e^(x-y) (1 - e^-2x)/(1 - e^-2y)
        return (x - y) + std::log1p(-std::exp(-2.0 * x)) - std::log1p(-std::exp(-2.0 * y));
    }
    case ProfileKind::power_exponential:
        // (z^q - r^q)/q = r^q/q * expm1(q log(z/r))
        return lz + std::pow(r, q_) / q_ * std::expm1(q_ * lz);
    case ProfileKind::table: return std::log(table_->eval(z, 0) / table_->eval(r, 0));
    }
    return 0.0;
}

double Profile::log_derivative(double r) const
{
    switch (kind_) {
    case ProfileKind::euclidean: return 1.0 / r;
    case ProfileKind::hyperbolic: return a_ / std::tanh(a_ * r);
    case ProfileKind::power_exponential: return (1.0 + std::pow(r, q_)) / r;
    case ProfileKind::table: return table_->eval(r, 1) / table_->eval(r, 0);
    }
    return 0.0;
}

double Profile::max_radius() const
{
    if (kind_ == ProfileKind::table)
        return table_->max_radius();
    return std::numeric_limits<double>::infinity();
}

std::string Profile::describe() const
{
    std::ostringstream os;
    os << to_string(kind_);
    if (kind_ == ProfileKind::hyperbolic)
        os << "(a=" << a_ << ")";
    else if (kind_ == ProfileKind::power_exponential)
        os << "(q=" << q_ << ")";
    os << ", n=" << dim_;
    return os.str();
}

Profile make_profile(const ProfileDescriptor& spec)
{
    switch (spec.kind) {
    case ProfileKind::euclidean: return Profile::euclidean(spec.dim);
    case ProfileKind::hyperbolic: return Profile::hyperbolic(spec.dim, spec.curvature_scale);
    case ProfileKind::power_exponential: return Profile::power_exponential(spec.dim, spec.exponent);
    case ProfileKind::table: return Profile::table(spec.dim, spec.table_r, spec.table_psi, spec.table_dpsi);
    }
    throw ValidationError("profile.kind", "unknown profile kind");
}

Profile read_table_profile(std::istream& in, int dim)
{
    std::string line;
    if (!std::getline(in, line))
        throw ValidationError("profile.table", "empty CSV (header row required)");
    std::vector<double> r, psi, dpsi;
    int columns = -1;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r")
            continue;
        std::vector<double> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                cells.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                throw ValidationError("profile.table", "non-numeric cell on row " + std::to_string(row));
            }
        }
        const int c = static_cast<int>(cells.size());
        if (c != 2 && c != 3)
            throw ValidationError("profile.table", "expected 2 or 3 columns on row " + std::to_string(row));
        if (columns >= 0 && c != columns)
            throw ValidationError("profile.table", "inconsistent column count on row " + std::to_string(row));
        columns = c;
        r.push_back(cells[0]);
        psi.push_back(cells[1]);
        if (c == 3)
            dpsi.push_back(cells[2]);
    }
    return Profile::table(dim, std::move(r), std::move(psi), std::move(dpsi));
}

}  // namespace fdlab
