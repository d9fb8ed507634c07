#include "fdlab/error.hpp"
#include "fdlab/parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

namespace fdlab {

namespace {

// hard-failure threshold for violations of the comparison ordering
constexpr double ordering_slack = 1e-7;

GridPtr ladder_grid(const LiftSchedule& ladder, double R)
{
    const auto cells = static_cast<std::size_t>(std::llround(R / ladder.cell_size));
    return share(RadialGrid::uniform(cells * ladder.cell_size, cells));
}

void require_order(double violation, const char* what, int k, int j, int i)
{
    if (violation > ordering_slack) {
        std::ostringstream os;
        os << what << " ordering violated by " << violation << " at (k=" << k << ", j=" << j << ", i=" << i << ")";
        throw NumericalFailure(os.str(), "minimal_solution");
    }
}

}  // namespace

std::string to_string(LadderEntry::Sweep s)
{
    switch (s) {
    case LadderEntry::Sweep::truncation: return "beta";
    case LadderEntry::Sweep::lift: return "ell";
    case LadderEntry::Sweep::radius: return "R";
    }
    return "?";
}

LiftSchedule LiftSchedule::geometric(double R0, int n_radii, double ell0, int n_lifts, double beta0,
                                     int n_truncations, double cell_size, double datum_sup)
{
    LiftSchedule s;
    for (int k = 0; k < n_radii; ++k)
        s.radii.push_back(std::ldexp(R0, k));
    for (int j = 0; j < n_lifts; ++j)
        s.lifts.push_back(ell0 * std::pow(4.0, -j));
    for (int i = 0; i < n_truncations; ++i)
        s.truncations.push_back(std::ldexp(beta0, i));
    s.cell_size = cell_size;
    s.probe_radius = 0.5 * R0;
    s.tolerance = 1e-4 * std::max(std::isfinite(datum_sup) ? datum_sup : 1.0, 1.0);
    s.validate();
    return s;
}

void LiftSchedule::validate() const
{
    if (radii.empty() || lifts.empty() || truncations.empty())
        throw ValidationError("ladder", "radii, lifts and truncations must be nonempty");
    if (!(cell_size > 0.0))
        throw ValidationError("ladder.cell_size", "must be positive");
    for (std::size_t k = 0; k < radii.size(); ++k) {
        if (!(radii[k] > 0.0) || (k > 0 && !(radii[k] > radii[k - 1])))
            throw ValidationError("ladder.radii", "must be positive and strictly increasing");
        const double cells = radii[k] / cell_size;
        if (std::abs(cells - std::round(cells)) > 1e-9 * cells)
            throw ValidationError("ladder.radii", "each radius must be a multiple of cell_size");
    }
    for (std::size_t j = 0; j < lifts.size(); ++j)
        if (!(lifts[j] > 0.0) || (j > 0 && !(lifts[j] < lifts[j - 1])))
            throw ValidationError("ladder.lifts", "must be positive and strictly decreasing");
    for (std::size_t i = 0; i < truncations.size(); ++i)
        if (!(truncations[i] > 0.0) || (i > 0 && !(truncations[i] > truncations[i - 1])))
            throw ValidationError("ladder.truncations", "must be positive and strictly increasing");
    if (!(probe_radius > 0.0) || !(probe_radius <= radii.front()))
        throw ValidationError("ladder.probe_radius", "must be in (0, R_0]");
    if (!(tolerance > 0.0))
        throw ValidationError("ladder.tolerance", "must be positive");
}

MinimalSolutionResult minimal_solution(const Profile& prof, const FdeConfig& cfg, const Datum& datum,
                                       const LiftSchedule& ladder)
{
    cfg.validate();
    ladder.validate();

    struct Rung {
        SpaceTimeField field;
        int j = 0, i = 0;
    };

    MinimalSolutionResult result;
    auto log = [&](LadderEntry::Sweep s, int k, int j, int i, double inc, double viol) {
        result.ladder_log.push_back({s, k, j, i, inc, viol});
        result.max_ordering_violation = std::max(result.max_ordering_violation, viol);
    };

    std::optional<Rung> prev_domain;
    int i_floor = 0, j_floor = 0;
    bool all_inner_converged = true;
    bool radius_converged = false;
    RadialField datum_field(ladder_grid(ladder, ladder.radii.front()));

    const int nk = static_cast<int>(ladder.radii.size());
    const int nj = static_cast<int>(ladder.lifts.size());
    const int ni = static_cast<int>(ladder.truncations.size());

    for (int k = 0; k < nk; ++k) {
        const GridPtr grid = ladder_grid(ladder, ladder.radii[k]);
        datum_field = sample_datum(prof, datum, grid);
        for (std::size_t n = 0; n < datum_field.size(); ++n)
            if (datum_field[n] < 0.0)
                throw ValidationError("datum", "minimal solution requires a nonnegative datum");

        std::optional<Rung> prev_lift;  // u_{k, ell_{j-1}} at its final beta
        bool lift_converged = false;
        for (int j = 0; j < nj; ++j) {
            std::optional<SpaceTimeField> prev_trunc;
            bool trunc_converged = false;
            int i = 0;
            for (; i < ni; ++i) {
                SpaceTimeField u = solve_lifted(prof, cfg, {ladder.lifts[j], ladder.truncations[i], datum_field});

                double inc = 0.0, viol = 0.0;
                if (prev_trunc) {
                    viol = order_violation(*prev_trunc, u);
                    require_order(viol, "truncation (beta)", k, j, i);
                    inc = probe_sup_difference(u, *prev_trunc, ladder.probe_radius);
                }
                if (prev_lift && i == prev_lift->i) {
                    const double lv = order_violation(u, prev_lift->field);
                    require_order(lv, "lift (ell)", k, j, i);
                    viol = std::max(viol, lv);
                }
                if (prev_domain && j == prev_domain->j && i == prev_domain->i) {
                    const double dv = order_violation(prev_domain->field, u);
                    require_order(dv, "domain (R_k)", k, j, i);
                    viol = std::max(viol, dv);
                }
                log(LadderEntry::Sweep::truncation, k, j, i, inc, viol);

                const bool anchors_done = (!prev_lift || i >= prev_lift->i) &&
                                          (!prev_domain || j != prev_domain->j || i >= prev_domain->i);
                prev_trunc = std::move(u);
                if (i > 0 && inc < ladder.tolerance && i >= i_floor && anchors_done) {
                    trunc_converged = true;
                    break;
                }
            }
            if (i == ni)
                i = ni - 1;
            all_inner_converged = all_inner_converged && trunc_converged;
            i_floor = std::max(i_floor, i);

            double inc = 0.0;
            if (prev_lift)
                inc = probe_sup_difference(*prev_trunc, prev_lift->field, ladder.probe_radius);
            log(LadderEntry::Sweep::lift, k, j, i, inc, 0.0);
            prev_lift = Rung{std::move(*prev_trunc), j, i};
            if (j > 0 && inc < ladder.tolerance && j >= j_floor) {
                lift_converged = true;
                break;
            }
        }
        all_inner_converged = all_inner_converged && lift_converged;
        j_floor = std::max(j_floor, prev_lift->j);

        double inc = 0.0;
        if (prev_domain) {
            const SpaceTimeField ext = extend_by_zero(prev_domain->field, grid);
            inc = probe_sup_difference(prev_lift->field, ext, ladder.probe_radius);
        }
        log(LadderEntry::Sweep::radius, k, prev_lift->j, prev_lift->i, inc, 0.0);
        prev_domain = std::move(prev_lift);
        if (k > 0 && inc < ladder.tolerance) {
            radius_converged = true;
            break;
        }
    }

    result.final_lift = ladder.lifts[prev_domain->j];
    result.final_truncation = ladder.truncations[prev_domain->i];
    result.field = std::move(prev_domain->field);
    result.final_radius = result.field.grid->radius();
    result.datum = datum_field;
    result.converged = all_inner_converged && radius_converged;
    return result;
}

double OrderingChainReport::worst() const
{
    return std::max({lower_bound, upper_bound, domain_order, extended_order, lift_order, truncation_order});
}

OrderingChainReport check_ordering_chain(const Profile& prof, const FdeConfig& cfg, const Datum& datum,
                                         const LiftSchedule& ladder)
{
    cfg.validate();
    ladder.validate();
    const int nk = static_cast<int>(ladder.radii.size());
    const int nj = static_cast<int>(ladder.lifts.size());
    const int ni = static_cast<int>(ladder.truncations.size());

    OrderingChainReport rep;
    rep.lower_bound = rep.upper_bound = rep.domain_order = rep.extended_order = rep.lift_order =
        rep.truncation_order = -std::numeric_limits<double>::infinity();

    // runs[k][j][i]
    std::vector<std::vector<std::vector<SpaceTimeField>>> runs(nk);
    for (int k = 0; k < nk; ++k) {
        const GridPtr grid = ladder_grid(ladder, ladder.radii[k]);
        const RadialField u0 = sample_datum(prof, datum, grid);
        runs[k].resize(nj);
        for (int j = 0; j < nj; ++j) {
            for (int i = 0; i < ni; ++i) {
                const double ell = ladder.lifts[j], beta = ladder.truncations[i];
                // the bound check inside solve_lifted is a hard failure; measure
                // the bounds here without it so the report shows the margins
                std::vector<double> start(u0.size());
                for (std::size_t n = 0; n < start.size(); ++n)
                    start[n] = ell + std::min(u0[n], beta);
                start.back() = ell;
                SpaceTimeField u = solve_fde(prof, cfg, grid, RadialField(grid, std::move(start)), ell);
                ++rep.solves;
                for (const auto& s : u.states) {
                    rep.lower_bound = std::max(rep.lower_bound, ell - s.min());
                    rep.upper_bound = std::max(rep.upper_bound, s.max() - (ell + beta));
                }
                runs[k][j].push_back(std::move(u));
            }
        }
    }
    for (int k = 0; k < nk; ++k) {
        for (int j = 0; j < nj; ++j) {
            for (int i = 0; i < ni; ++i) {
                const SpaceTimeField& u = runs[k][j][i];
                if (k + 1 < nk) {
                    const SpaceTimeField& bigger = runs[k + 1][j][i];
                    rep.domain_order = std::max(rep.domain_order, order_violation(u, bigger));
                    rep.extended_order =
                        std::max(rep.extended_order, order_violation(extend_by_zero(u, bigger.grid), bigger));
                }
                if (j > 0)  // lifts decrease: ell_j < ell_{j-1}
                    rep.lift_order = std::max(rep.lift_order, order_violation(u, runs[k][j - 1][i]));
                if (i > 0)
                    rep.truncation_order = std::max(rep.truncation_order, order_violation(runs[k][j][i - 1], u));
            }
        }
    }
    auto fix = [](double& v) {
        if (!std::isfinite(v))
            v = 0.0;
    };
    fix(rep.domain_order);
    fix(rep.extended_order);
    fix(rep.lift_order);
    fix(rep.truncation_order);
    return rep;
}

}  // namespace fdlab
