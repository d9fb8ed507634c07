#include "fdlab/error.hpp"
#include "fdlab/estimates.hpp"

#include <doctest.h>

#include <cmath>

using namespace fdlab;
using doctest::Approx;

namespace {

FdeConfig config(double m, double t_end = 1.0)
{
    FdeConfig cfg;
    cfg.m = m;
    cfg.dt = 5e-2;
    cfg.t_end = t_end;
    return cfg;
}

SpaceTimeField constant_trajectory(const GridPtr& g, double c, int steps, double dt)
{
    SpaceTimeField f{g, {}, {}};
    for (int k = 0; k <= steps; ++k) {
        f.times.push_back(k * dt);
        f.states.emplace_back(g, std::vector<double>(g->size(), c));
    }
    return f;
}

}  // namespace

TEST_CASE("cut-off shape")
{
    CHECK(CutoffFamily::shape(0.5) == 1.0);
    CHECK(CutoffFamily::shape(1.0) == 1.0);
    CHECK(CutoffFamily::shape(2.0) == 0.0);
    CHECK(CutoffFamily::shape(1.5) == Approx(0.5));
    for (double s = 1.0; s <= 2.0; s += 0.01) {
        CHECK(CutoffFamily::shape(s) >= 0.0);
        CHECK(CutoffFamily::shape(s) <= 1.0);
        CHECK(CutoffFamily::shape_d1(s) <= 0.0);
        const double h = 1e-6;
        if (s > 1.0 + h && s < 2.0 - h)
            CHECK(CutoffFamily::shape_d1(s) ==
                  Approx((CutoffFamily::shape(s + h) - CutoffFamily::shape(s - h)) / (2 * h)).epsilon(1e-6).scale(1.0));
    }
    // C^2 at the junctions
    CHECK(CutoffFamily::shape_d1(1.0 + 1e-9) == Approx(0.0).scale(1.0));
    CHECK(CutoffFamily::shape_d2(2.0 - 1e-9) == Approx(0.0).scale(1.0));
}

TEST_CASE("kappa_m")
{
    CHECK(kappa_m(0.5) == Approx(8.48528137423857).epsilon(1e-14));
    // 2/(1-m) = 10 exactly: k = 10, not 11
    CHECK(kappa_m(0.8) == Approx(0.2 * std::pow(2.0, 0.2) * 90.0).epsilon(1e-14));
    CHECK_THROWS_AS(kappa_m(1.0), ValidationError);
}

TEST_CASE("Herrero-Pierre constant")
{
    const Profile e = Profile::euclidean(3);
    CHECK(hp_constant(e, 0.5, 2.0) / hp_constant(e, 0.5, 1.0) == Approx(std::pow(2.0, -0.5)).epsilon(1e-12));
    const HpConstantParts parts = hp_constant_parts(Profile::hyperbolic(3, 1.0), 0.3, 1.5);
    CHECK(parts.value == Approx(parts.kappa * parts.sup_term * std::pow(parts.annulus_volume, 0.7)).epsilon(1e-12));
    for (const Profile& p : {e, Profile::hyperbolic(3, 1.0), Profile::power_exponential(3, 3.0)})
        for (double R : {1.0, 2.0, 10.0}) {
            // pe(3) on [10, 20]: psi^2 ~ exp(2 r^3 / 3) is far beyond double range
            if (p.kind() == ProfileKind::power_exponential && R == 10.0) {
                CHECK_THROWS_AS(hp_constant(p, 0.5, R), NumericalFailure);
                continue;
            }
            const double H = hp_constant(p, 0.5, R);
            CHECK(H > 0.0);
            CHECK(std::isfinite(H));
        }
}

TEST_CASE("trivial HP cases")
{
    const Profile e = Profile::euclidean(3);
    const GridPtr g = share(RadialGrid::uniform(2.5, 50));
    const SpaceTimeField u = solve_lifted(e, config(0.5), {0.1, 1.0, sample_datum(e, Datum::tent(1.0, 1.0), g)});

    const HpReport same = check_hp_ordered(u, u, e, 0.5, 1.0, 1.0, 0.5);
    CHECK(same.lhs == 0.0);
    CHECK(same.slack == Approx(same.H_R * 0.5));
    CHECK(same.pass);

    const SpaceTimeField c = constant_trajectory(g, 0.05, 20, 5e-2);
    const HpReport equal_times = check_hp_ordered(u, c, e, 0.5, 1.0, 0.5, 0.5);
    CHECK(equal_times.pass);
    CHECK(equal_times.slack >= 0.0);

    const HpReport strong = check_hp_strong(u, u, e, 0.5, 1.0, 1.0, 0.5);
    CHECK(strong.lhs == 0.0);
    CHECK(strong.pass);
}

TEST_CASE("HP estimate on ordered lifted solutions")
{
    const Profile e = Profile::euclidean(3);
    const GridPtr g = share(RadialGrid::uniform(2.5, 125));
    const RadialField u0 = sample_datum(e, Datum::tent(2.0, 1.0), g);
    const SpaceTimeField lo = solve_lifted(e, config(0.5), {0.05, 0.5, u0});
    const SpaceTimeField hi = solve_lifted(e, config(0.5), {0.05, 1.5, u0});
    const HpReport rep = check_hp_ordered(hi, lo, e, 0.5, 1.0, 1.0, 0.5);
    CHECK(rep.pass);
    CHECK(rep.slack >= 0.0);
    CHECK(rep.H_R == Approx(hp_constant(e, 0.5, 1.0)));
    // the wrong order is refused
    CHECK_THROWS_AS(check_hp_ordered(lo, hi, e, 0.5, 1.0, 1.0, 0.5), ValidationError);
    // grid must cover B_2R
    CHECK_THROWS_AS(check_hp_ordered(hi, lo, e, 0.5, 1.5, 1.0, 0.5), ValidationError);
}

TEST_CASE("strong HP estimate on crossing data")
{
    const Profile e = Profile::euclidean(3);
    const GridPtr g = share(RadialGrid::uniform(2.0, 80));
    std::vector<double> a(g->size(), 1.0), b(g->size());
    for (std::size_t i = 0; i < g->size(); ++i)
        b[i] = std::max(2.0 - (*g)[i], 1e-3);
    const SpaceTimeField u = solve_fde(e, config(0.5), g, RadialField(g, a), 1.0);
    const SpaceTimeField v = solve_fde(e, config(0.5), g, RadialField(g, b), 1e-3);
    const HpReport uv = check_hp_strong(u, v, e, 0.5, 1.0, 1.0, 0.5);
    const HpReport vu = check_hp_strong(v, u, e, 0.5, 1.0, 1.0, 0.5);
    CHECK(uv.pass);
    CHECK(uv.lhs == vu.lhs);
    CHECK(uv.rhs == vu.rhs);
}

TEST_CASE("contraction functional")
{
    const GridPtr g = share(RadialGrid::uniform(1.0, 10));
    const SpaceTimeField one = constant_trajectory(g, 1.0, 40, 5e-2);
    const SpaceTimeField zero = constant_trajectory(g, 0.0, 40, 5e-2);

    const RadialField same = contraction_functional(one, one, 0.5, 1.0);
    CHECK(same.max() == 0.0);

    // trapezoid on a 0.05 mesh: 1 - 1/e up to h^2/12 of the integrand
    const RadialField W = contraction_functional(one, zero, 0.5, 1.0);
    for (double w : W.values())
        CHECK(w == Approx(1.0 - std::exp(-1.0)).epsilon(3e-4));

    const RadialField W2 = contraction_functional(one, zero, 0.5, 2.0);
    for (std::size_t i = 0; i < g->size(); ++i)
        CHECK(W2[i] >= W[i]);

    // a t0 between stored times is integrated up to t0 exactly
    const RadialField Wmid = contraction_functional(one, zero, 0.5, 0.525);
    CHECK(Wmid[0] == Approx(1.0 - std::exp(-0.525)).epsilon(3e-4));

    // Lipschitz in sup|u^m - v^m|
    const SpaceTimeField pert = constant_trajectory(g, std::pow(1.0 + 0.01, 2.0), 40, 5e-2);
    const RadialField Wp = contraction_functional(pert, zero, 0.5, 1.0);
    for (std::size_t i = 0; i < g->size(); ++i)
        CHECK(std::abs(Wp[i] - W[i]) <= (1.0 - std::exp(-1.0)) * 0.01 * (1.0 + 1e-3));

    const SpaceTimeField other = constant_trajectory(share(RadialGrid::uniform(1.0, 12)), 0.0, 40, 5e-2);
    CHECK_THROWS_AS(contraction_functional(one, other, 0.5, 1.0), ValidationError);
    CHECK_THROWS_AS(contraction_functional(one, zero, 0.5, 3.0), ValidationError);
}

TEST_CASE("uniqueness probe")
{
    CHECK(probe_alpha(0.5, 1.0) == Approx(1.0 / (2.0 - 2.0 * std::exp(-1.0))).epsilon(1e-15));
    CHECK(probe_alpha(0.5, 1.0) == Approx(0.79098835343466321).epsilon(1e-14));

    const Profile e = Profile::euclidean(3);
    const GridPtr g = share(RadialGrid::uniform(2.0, 40));
    const SpaceTimeField u = solve_lifted(e, config(0.5), {0.1, 1.0, sample_datum(e, Datum::tent(1.0, 1.0), g)});
    const ProbeReport same = uniqueness_probe(u, u, e, 0.5, 1.0, 1.0);
    CHECK(same.exact_uniqueness);
    CHECK(same.sup_w == 0.0);
    CHECK(same.min_defect == 0.0);
    CHECK(same.within_barrier);

    const SpaceTimeField v = solve_lifted(e, config(0.5), {0.2, 1.0, sample_datum(e, Datum::tent(1.0, 1.0), g)});
    const ProbeReport diff = uniqueness_probe(u, v, e, 0.5, 1.0, 1.0);
    CHECK_FALSE(diff.exact_uniqueness);
    CHECK(diff.sup_w > 0.0);
    CHECK(diff.alpha == Approx(probe_alpha(0.5, 1.0)));
    CHECK(uniqueness_probe(u, v, e, 0.5, 1.0, 1.0, 2.0).alpha == 2.0);

    CHECK_THROWS_AS(uniqueness_probe(u, v, e, 0.01, 1.0, 1.0), ValidationError);
    CHECK_THROWS_AS(uniqueness_probe(u, v, e, 0.5, 1.0, 2.0), ValidationError);
}
