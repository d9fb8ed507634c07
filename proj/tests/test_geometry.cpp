#include "fdlab/error.hpp"
#include "fdlab/geometry.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace fdlab;
using doctest::Approx;

// Reference values below come from tools/oracle/h_oracle.py (mpmath, 40 digits)
// and are frozen here.

TEST_CASE("profile values at the origin and at r = 1")
{
    const Profile e = Profile::euclidean(3);
    CHECK(e.psi(1.0) == 1.0);
    CHECK(e.dpsi(1.0) == 1.0);
    CHECK(Profile::hyperbolic(2, 1.0).psi(1.0) == Approx(1.1752011936438014).epsilon(1e-14));
    for (const Profile& p : {e, Profile::hyperbolic(3, 2.0), Profile::power_exponential(3, 3.0)}) {
        CHECK(p.psi(0.0) == 0.0);
        CHECK(p.psi(1e-8) == Approx(1e-8).epsilon(1e-6));
        CHECK(p.dpsi(1e-8) == Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("profile parameters out of range are rejected")
{
    CHECK_THROWS_AS(Profile::power_exponential(3, 1.0), ValidationError);
    CHECK_THROWS_AS(Profile::hyperbolic(3, 0.0), ValidationError);
    CHECK_THROWS_AS(Profile::euclidean(1), ValidationError);
    CHECK_THROWS_AS(Profile::table(3, {0.0, 1.0, 2.0}, {0.1, 1.0, 2.0}), ValidationError);
    CHECK_THROWS_AS(Profile::table(3, {0.0, 2.0, 1.0}, {0.0, 2.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(Profile::table(3, {0.0, 1.0, 2.0}, {0.0, 2.0, 1.0}), ValidationError);
}

TEST_CASE("log_psi_ratio agrees with the direct difference")
{
    for (const Profile& p : {Profile::euclidean(3), Profile::hyperbolic(3, 1.0), Profile::power_exponential(3, 3.0)})
        for (double r : {0.5, 3.0})
            for (double z : {0.1 * r, 0.9 * r, r})
                CHECK(p.log_psi_ratio(z, r) == Approx(p.log_psi(z) - p.log_psi(r)).epsilon(1e-12).scale(1.0));
}

TEST_CASE("volume density")
{
    CHECK(volume_density(Profile::euclidean(3), 2.0) == 4.0);
    CHECK(volume_density(Profile::hyperbolic(2, 1.0), 1.0) == Approx(1.1752011936438014));
    CHECK(volume_density(Profile::power_exponential(3, 3.0), 0.0) == 0.0);
    CHECK(shell_volume(Profile::euclidean(3), 1.0, 2.0) == Approx(29.321531433504737).epsilon(1e-12));
    CHECK(sphere_area(2) == Approx(2.0 * std::numbers::pi));
}

TEST_CASE("H closed forms")
{
    CHECK(eval_H(Profile::euclidean(3), 2.0) == Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(eval_H(Profile::hyperbolic(3, 1.0), 0.0) == 0.0);
    CHECK(eval_H(Profile::hyperbolic(2, 1.0), 2.0) == Approx(0.86756166096605437).epsilon(1e-12));
    CHECK(eval_H(Profile::hyperbolic(3, 1.0), 1.5) == Approx(0.32859354473688393).epsilon(1e-11));
    // removable singularity: H'(r) = r/n near 0
    CHECK(eval_dH(Profile::hyperbolic(3, 1.0), 1e-9) == Approx(1e-9 / 3.0));
}

TEST_CASE("H on the power-exponential profile")
{
    const Profile p = Profile::power_exponential(3, 3.0);
    CHECK(eval_H(p, 1.0) == Approx(0.14719262966904884).epsilon(1e-11));
    CHECK(eval_H(p, 2.0) == Approx(0.34152734948326331).epsilon(1e-11));
    CHECK(eval_H(p, 5.0) == Approx(0.49146548941593714).epsilon(1e-11));
    // n = 3, q = 3: H'(r) = (1 - exp(-2r^3/3)) / (2 r^2)
    for (double r : {0.3, 1.0, 4.0, 20.0, 40.0})
        CHECK(eval_dH(p, r) == Approx((1.0 - std::exp(-2.0 * r * r * r / 3.0)) / (2.0 * r * r)).epsilon(1e-12));
    // tail: H(40) - H(20) = 1/40 - 1/80 up to exp(-5000)
    CHECK(eval_H(p, 40.0) - eval_H(p, 20.0) == Approx(0.0125).epsilon(1e-9));
}

TEST_CASE("H sampled at many radii is increasing and matches pointwise values")
{
    const Profile p = Profile::hyperbolic(3, 1.0);
    const std::vector<double> r{0.0, 0.5, 0.5, 1.0, 3.0};
    const std::vector<double> H = eval_H(p, r);
    CHECK(H[0] == 0.0);
    CHECK(H[1] == H[2]);
    CHECK(H[3] > H[2]);
    CHECK(H[4] == Approx(eval_H(p, 3.0)).epsilon(1e-11));
    CHECK_THROWS(eval_H(p, std::vector<double>{1.0, 0.5}));
}

TEST_CASE("H identities")
{
    for (const Profile& p : {Profile::euclidean(3), Profile::hyperbolic(3, 1.0), Profile::power_exponential(3, 3.0)})
        for (double r : {0.05, 0.7, 2.0, 6.0}) {
            const double H = eval_H(p, r), d1 = eval_dH(p, r);
            CHECK(d1 * d1 <= 2.0 * H * (1.0 + 1e-6));
            const double h = 1e-3 * r;
            const double d2 = (eval_dH(p, r + h) - eval_dH(p, r - h)) / (2.0 * h);
            CHECK(d2 + (p.dim() - 1) * p.log_derivative(r) * d1 == Approx(1.0).epsilon(1e-4));
        }
}

TEST_CASE("table profile reproduces the euclidean H")
{
    std::vector<double> r, psi;
    for (int i = 0; i <= 200; ++i) {
        r.push_back(0.02 * i);
        psi.push_back(0.02 * i);
    }
    const Profile t = Profile::table(3, r, psi);
    CHECK(eval_H(t, 3.0) == Approx(1.5).epsilon(1e-8));
    std::istringstream csv("r,psi\n0,0\n1,1\n2,2\n3,3\n");
    CHECK(read_table_profile(csv, 3).psi(1.5) == Approx(1.5));
    std::istringstream bad("r,psi\n0,0\n1,x\n");
    CHECK_THROWS_AS(read_table_profile(bad, 3), ValidationError);
}

TEST_CASE("completeness classifier")
{
    const CompletenessReport e = classify_completeness(Profile::euclidean(3), 50.0, 200);
    CHECK(e.verdict == Verdict::complete);
    CHECK(e.sigma == Approx(-1.0).epsilon(1e-3));
    CHECK(classify_completeness(Profile::hyperbolic(3, 1.0), 50.0, 200).verdict == Verdict::complete);
    const CompletenessReport q3 = classify_completeness(Profile::power_exponential(3, 3.0), 20.0, 200);
    CHECK(q3.verdict == Verdict::incomplete);
    CHECK(q3.sigma == Approx(2.0).epsilon(0.02));
    CHECK(classify_completeness(Profile::power_exponential(3, 2.0), 50.0, 200).verdict != Verdict::incomplete);
    CHECK_THROWS_AS(classify_completeness(Profile::euclidean(3), 5.0, 200), ValidationError);
    CHECK_THROWS_AS(classify_completeness(Profile::euclidean(3), 50.0, 10), ValidationError);
}

TEST_CASE("grid invariants")
{
    CHECK_THROWS_AS(RadialGrid::uniform(1.0, 4), ValidationError);
    CHECK_THROWS_AS(RadialGrid::graded(1.0, 100, 2e3), ValidationError);
    CHECK_THROWS_AS(RadialGrid({0.0, 0.1, 0.1, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8}), ValidationError);
    const RadialGrid g = RadialGrid::graded(2.0, 100, 20.0);
    CHECK(g.radius() == 2.0);
    CHECK(g.spacing(0) / g.spacing(99) == Approx(20.0));
    CHECK(g.last_node_at_or_below(-1.0) == 0);
}

TEST_CASE("radial Laplacian")
{
    const Profile e = Profile::euclidean(3);
    const GridPtr g = share(RadialGrid::uniform(1.0, 50));
    std::vector<double> sq(g->size()), c(g->size(), 4.2);
    for (std::size_t i = 0; i < g->size(); ++i)
        sq[i] = (*g)[i] * (*g)[i];
    const LaplacianResult lap = radial_laplacian(e, RadialField(g, sq));
    for (std::size_t i = 0; i < g->size(); ++i)
        CHECK(lap.values[i] == Approx(6.0).epsilon(1e-10));
    CHECK(lap.stencil.front() == StencilKind::symmetry_origin);
    CHECK(lap.stencil.back() == StencilKind::one_sided_boundary);
    const LaplacianResult zero = radial_laplacian(e, RadialField(g, c));
    for (double v : zero.values.values())
        CHECK(v == 0.0);

    // hyperbolic n = 2: Delta cosh r = 2 cosh r, second order
    const Profile h = Profile::hyperbolic(2, 1.0);
    double err[2];
    for (int k = 0; k < 2; ++k) {
        const GridPtr gk = share(RadialGrid::uniform(2.0, 40u << k));
        std::vector<double> f(gk->size());
        for (std::size_t i = 0; i < f.size(); ++i)
            f[i] = std::cosh((*gk)[i]);
        const LaplacianResult L = radial_laplacian(h, RadialField(gk, f));
        err[k] = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i)
            err[k] = std::max(err[k], std::abs(L.values[i] - 2.0 * std::cosh((*gk)[i])));
    }
    CHECK(std::log2(err[0] / err[1]) == Approx(2.0).epsilon(0.15));
}

TEST_CASE("ball integral of a constant is the ball volume")
{
    const Profile e = Profile::euclidean(3);
    const GridPtr g = share(RadialGrid::uniform(2.0, 40));
    const std::vector<double> one(g->size(), 1.0);
    CHECK(ball_integral(e, *g, one, 1.0) == Approx(4.0 * std::numbers::pi / 3.0).epsilon(1e-12));
    CHECK(ball_integral(e, *g, one, 1.03) == Approx(4.0 * std::numbers::pi * std::pow(1.03, 3) / 3.0).epsilon(1e-12));
}

TEST_CASE("finite difference weights")
{
    const std::vector<double> x{-1.0, 0.0, 1.0};
    const auto w = finite_difference_weights(0.0, x, 2);
    CHECK(w[2][0] == Approx(1.0));
    CHECK(w[2][1] == Approx(-2.0));
    CHECK(w[1][2] == Approx(0.5));
}
