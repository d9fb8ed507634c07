#pragma once

#include "fdlab/profile.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fdlab {

struct DemoOptions {
    double cell_size = 0.02;
    double dt = 1e-2;
    double delta = 1e-8;  ///< mobility floor; u0 = 0 needs delta > 0
    double boundary = 1.0;
};

struct DemoRow {
    double R = 0.0;
    double u_complete = 0.0;
    double u_incomplete = 0.0;
    std::optional<std::string> error_complete;
    std::optional<std::string> error_incomplete;
};

struct DemoResult {
    std::vector<DemoRow> rows;
    /// u_incomplete / u_complete at the largest R (NaN if either failed)
    double contrast = 0.0;
    bool complete_nonincreasing = false;
};

/// u(o, t*) for u0 = 0 and boundary value 1 on B_R, for both profiles on the
/// same uniform grid per R.  Per-R solver failures are recorded and skipped.
DemoResult demo_nonuniqueness(const Profile& complete, const Profile& incomplete, double m,
                              const std::vector<double>& R_list, double t_star, const DemoOptions& opt = {});

}  // namespace fdlab
