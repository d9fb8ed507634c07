#include "fdlab/elliptic.hpp"
#include "fdlab/error.hpp"

#include <doctest.h>

#include <cmath>

using namespace fdlab;
using doctest::Approx;

TEST_CASE("default barrier constant")
{
    CHECK(default_barrier_constant(2.0) == 14.0);
    CHECK(default_barrier_constant(3.0) == Approx(std::sqrt(5.0)).epsilon(1e-15));
    // for large p the constant sits just below 1 and creeps up toward it
    const double c10 = default_barrier_constant(10.0), c100 = default_barrier_constant(100.0);
    CHECK(c10 < c100);
    CHECK(c100 < 1.0);
    CHECK(c10 == Approx(std::pow(62.0 / 81.0, 1.0 / 9.0)));
    CHECK_THROWS_AS(default_barrier_constant(1.0), ValidationError);
    CHECK_THROWS_AS(BarrierSpec({2.0, 1.0, 1.0, 13.9}).validate(), ValidationError);
}

TEST_CASE("barrier values")
{
    const Profile e = Profile::euclidean(3);
    const BarrierSpec s = BarrierSpec::with_default_constant(2.0, 1.0, 1.0);
    CHECK(eval_barrier(e, s, 0.0) == Approx(84.0).epsilon(1e-12));
    // H(R) - H(r) = 1e-4 on the euclidean ball: r^2 = 1 - 6e-4
    CHECK(eval_barrier(e, s, std::sqrt(1.0 - 6e-4)) > 1e4);
    CHECK_THROWS_AS(eval_barrier(e, s, 1.0), ValidationError);

    BarrierSpec s16 = s;
    s16.alpha = 16.0;
    for (double r : {0.0, 0.3, 0.8})
        CHECK(eval_barrier(e, s16, r) / eval_barrier(e, s, r) == Approx(1.0 / 16.0).epsilon(1e-14));

    // mpmath oracle values (tools/oracle/h_oracle.py)
    CHECK(eval_barrier(e, BarrierSpec::with_default_constant(2.0, 1.0, 20.0), 1.0) ==
          Approx(0.21105395066613903).epsilon(1e-11));
    CHECK(eval_barrier(Profile::power_exponential(3, 3.0), BarrierSpec::with_default_constant(2.0, 1.0, 10.0), 1.0) ==
          Approx(48.76464328825325).epsilon(1e-10));
    CHECK(eval_barrier(Profile::hyperbolic(3, 1.0), BarrierSpec::with_default_constant(3.0, 1.0, 2.0), 0.5) ==
          Approx(3.3024178574689157).epsilon(1e-10));
}

TEST_CASE("barrier is increasing in r and nonincreasing in R")
{
    for (const Profile& p : {Profile::euclidean(3), Profile::hyperbolic(3, 1.0)})
        for (double r : {0.0, 0.5, 0.9}) {
            double prev = INFINITY;
            for (double R : {1.0, 1.5, 2.0, 4.0}) {
                const double v = eval_barrier(p, BarrierSpec::with_default_constant(2.5, 1.0, R), r);
                CHECK(v <= prev);
                prev = v;
            }
            CHECK(eval_barrier(p, BarrierSpec::with_default_constant(2.5, 1.0, 1.0), r + 0.05) >
                  eval_barrier(p, BarrierSpec::with_default_constant(2.5, 1.0, 1.0), r));
        }
}

TEST_CASE("discrete supersolution check")
{
    const Profile e = Profile::euclidean(3);
    const BarrierSpec s = BarrierSpec::with_default_constant(2.0, 1.0, 1.0);
    const GridPtr g = share(RadialGrid::uniform(0.9, 900));
    const RadialField W = barrier_field(e, s, g);
    const SupersolutionReport rep = verify_supersolution(e, W, s, 1e-2 * std::pow(W.max(), 2.0));
    CHECK(rep.pass);
    CHECK(rep.max_violation <= rep.tolerance_used);

    const RadialField c(g, std::vector<double>(g->size(), 3.0));
    const SupersolutionReport rc = verify_supersolution(e, c, s, 0.0);
    CHECK(rc.pass);
    CHECK(rc.max_violation == Approx(-9.0));

    // p > 1: scaling up keeps the inequality, scaling down breaks it at the
    // origin, where Delta W / W^p = (p-1)/(3p+1) = 1/7 > 1/10
    RadialField up = W, down = W;
    for (std::size_t i = 0; i < W.size(); ++i) {
        up[i] *= 10.0;
        down[i] *= 0.1;
    }
    CHECK(verify_supersolution(e, up, s, 0.0).pass);
    const SupersolutionReport rd = verify_supersolution(e, down, s, 0.0);
    CHECK_FALSE(rd.pass);
    CHECK(rd.residual[0] > 0.0);

    RadialField neg = c;
    neg[3] = -1.0;
    CHECK_THROWS_AS(verify_supersolution(e, neg, s, 0.0), ValidationError);
    CHECK_THROWS_AS(barrier_field(e, s, share(RadialGrid::uniform(1.0, 10))), ValidationError);
}

TEST_CASE("semilinear solves")
{
    const Profile e = Profile::euclidean(3);
    const BarrierSpec s = BarrierSpec::with_default_constant(2.0, 1.0, 1.0);
    const GridPtr g = share(RadialGrid::uniform(0.9, 180));

    const SemilinearSolution zero = solve_semilinear(e, s, g, 0.0);
    CHECK(zero.W.max() == 0.0);
    CHECK(zero.W.min() == 0.0);

    const SemilinearSolution b5 = solve_semilinear(e, s, g, 5.0);
    CHECK(b5.W.max() <= 5.0 + 1e-12);
    CHECK(b5.W.min() >= 0.0);

    // comparison with the barrier when the data match it at r = 0.9
    const double b = eval_barrier(e, s, 0.9);
    const SemilinearSolution sb = solve_semilinear(e, s, g, b);
    const RadialField Wbar = barrier_field(e, s, g);
    for (std::size_t i = 0; i < g->size(); ++i)
        CHECK(sb.W[i] <= Wbar[i] + 1e-6);

    // discrete comparison in the boundary value
    const SemilinearSolution b2 = solve_semilinear(e, s, g, 2.0), b3 = solve_semilinear(e, s, g, 3.0);
    for (std::size_t i = 0; i < g->size(); ++i)
        CHECK(b2.W[i] <= b3.W[i] + 1e-8);

    CHECK_THROWS_AS(solve_semilinear(e, s, g, -1.0), ValidationError);
}

TEST_CASE("alpha scaling of the semilinear problem")
{
    const Profile h = Profile::hyperbolic(3, 1.0);
    const double p = 3.0, alpha = 4.0, b = 2.0;
    BarrierSpec s1 = BarrierSpec::with_default_constant(p, 1.0, 2.0), sa = s1;
    sa.alpha = alpha;
    const GridPtr g = share(RadialGrid::uniform(1.5, 150));
    const SemilinearSolution wa = solve_semilinear(h, sa, g, b);
    const SemilinearSolution w1 = solve_semilinear(h, s1, g, std::pow(alpha, 1.0 / (p - 1.0)) * b);
    const double k = std::pow(alpha, -1.0 / (p - 1.0));
    for (std::size_t i = 0; i < g->size(); ++i)
        CHECK(wa.W[i] == Approx(k * w1.W[i]).epsilon(1e-9));
}

TEST_CASE("Newton failure is reported with its history")
{
    const Profile e = Profile::euclidean(3);
    const BarrierSpec s = BarrierSpec::with_default_constant(2.0, 1.0, 1.0);
    const GridPtr g = share(RadialGrid::uniform(0.9, 100));
    try {
        solve_semilinear(e, s, g, 1e6, NewtonControl{1e-12, 2});
        FAIL("expected a NumericalFailure");
    } catch (const NumericalFailure& f) {
        CHECK(f.residual_history().size() >= 2);
    }
}

TEST_CASE("nonexistence sweep")
{
    const auto eu = nonexistence_experiment(Profile::euclidean(3), 2.0, 1.0, {5.0, 10.0, 20.0}, 1.0);
    REQUIRE(eu.size() == 3);
    CHECK(eu[2].sup_barrier == Approx(0.21105395066613903).epsilon(1e-10));
    CHECK(eu[2].sup_solution <= 0.2112);
    CHECK(eu[0].sup_solution > eu[1].sup_solution);
    CHECK(eu[1].sup_solution > eu[2].sup_solution);
    for (const DecayRow& r : eu) {
        CHECK_FALSE(r.error.has_value());
        CHECK(r.sup_solution <= r.sup_barrier);
    }
    CHECK_THROWS_AS(nonexistence_experiment(Profile::euclidean(3), 2.0, 1.0, {1.5, 3.0}, 1.0), ValidationError);
    CHECK_THROWS_AS(nonexistence_experiment(Profile::euclidean(3), 2.0, 1.0, {3.0, 2.0}, 0.5), ValidationError);
}
