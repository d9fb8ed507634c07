#include "fdlab/demo.hpp"

#include "fdlab/error.hpp"
#include "fdlab/parabolic.hpp"

#include <cmath>
#include <limits>

namespace fdlab {

DemoResult demo_nonuniqueness(const Profile& complete, const Profile& incomplete, double m,
                              const std::vector<double>& R_list, double t_star, const DemoOptions& opt)
{
    if (R_list.empty())
        throw ValidationError("R_list", "must be nonempty");
    for (std::size_t k = 0; k < R_list.size(); ++k)
        if (!(R_list[k] > 0.0) || (k > 0 && !(R_list[k] > R_list[k - 1])))
            throw ValidationError("R_list", "must be positive and strictly increasing");
    if (!(t_star > 0.0))
        throw ValidationError("t_star", "must be positive");
    if (!(opt.cell_size > 0.0))
        throw ValidationError("cell_size", "must be positive");

    FdeConfig cfg;
    cfg.m = m;
    cfg.dt = std::min(opt.dt, t_star);
    cfg.t_end = t_star;
    cfg.mobility_floor = opt.delta;
    cfg.store_every = std::numeric_limits<int>::max();
    cfg.validate();
    if (!(opt.delta > 0.0))
        throw ValidationError("delta", "u0 = 0 needs delta > 0");

    auto run = [&](const Profile& p, const GridPtr& grid, double& value, std::optional<std::string>& error) {
        value = std::numeric_limits<double>::quiet_NaN();
        try {
            const SpaceTimeField u = solve_fde(p, cfg, grid, RadialField(grid), opt.boundary);
            value = u.states.back()[0];
        } catch (const NumericalFailure& e) {
            error = e.what();
        }
    };

    DemoResult res;
    for (double R : R_list) {
        const auto cells = static_cast<std::size_t>(std::max<long long>(std::llround(R / opt.cell_size), 8));
        const GridPtr grid = share(RadialGrid::uniform(R, cells));
        DemoRow row;
        row.R = R;
        run(complete, grid, row.u_complete, row.error_complete);
        run(incomplete, grid, row.u_incomplete, row.error_incomplete);
        res.rows.push_back(std::move(row));
    }

    const DemoRow& last = res.rows.back();
    res.contrast = last.u_incomplete / last.u_complete;
    res.complete_nonincreasing = true;
    for (std::size_t k = 0; k < res.rows.size(); ++k) {
        const double v = res.rows[k].u_complete;
        if (!std::isfinite(v) || (k > 0 && v > res.rows[k - 1].u_complete))
            res.complete_nonincreasing = false;
    }
    return res;
}

}  // namespace fdlab
