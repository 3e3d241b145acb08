#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "glmlab/catalog.hpp"
#include "glmlab/optimizer.hpp"

using namespace glmlab;

namespace {

OptimizationProblem pinned_bdf2()
{
    const CatalogEntry e = get("BDF2-Pre-Post-3");
    OptimizationProblem p = OptimizationProblem::standard(core_bdf2(), 4, 3);
    p.d1 = e.recipe->pre.d1;
    p.theta = e.recipe->post.theta;
    p.bhat = e.recipe->post.bhat;
    p.b = e.recipe->post.b;
    p.free.d1.assign(4, false);
    p.free.theta.assign(4, false);
    p.free.bhat.assign(3, false);
    p.free.b.assign(p.b.size(), false);
    return p;
}

OptimizerConfig cheap(std::uint64_t seed)
{
    OptimizerConfig c;
    c.seed = seed;
    c.multistarts = 2;
    c.max_evals = 80;
    c.restart_evals = 40;
    c.r_max = 4.0;
    c.r_tol = 0.25;
    c.rays = 12;
    c.moduli = 20;
    return c;
}

}  // namespace

TEST_CASE("roots inside a circle")
{
    CVec c(3);
    // (x - 0.5)(x + 0.25)
    c << -0.125, -0.25, 1.0;
    CHECK(roots_inside(c, 1.0));
    CHECK_FALSE(roots_inside(c, 0.4));
    // (x - 1)^2 touches the circle
    c << 1.0, -2.0, 1.0;
    CHECK_FALSE(roots_inside(c, 1.0));
    CHECK(roots_inside(c, 1.01));
    CVec q(2);
    q << cplx(0.0, -0.9), 1.0;
    CHECK(roots_inside(q, 1.0));
}

TEST_CASE("a problem without free coefficients reports the fixed method")
{
    OptimizationProblem p = OptimizationProblem::standard(core_implicit_euler(), 1, 1);
    p.free.d1.assign(1, false);
    p.free.theta.assign(1, false);
    p.free.b.assign(p.b.size(), false);
    CHECK(p.free_count() == 0);
    const OptimizationResult r = optimize_filters(p);
    CHECK(r.feasible);
    CHECK(r.achieved_alpha_deg == doctest::Approx(90.0).epsilon(0.05 / 90));
}

TEST_CASE("published BDF2 filters verify")
{
    const OptimizationResult r = optimize_filters(pinned_bdf2());
    CHECK(r.feasible);
    CHECK(r.order_report.order >= 3);
    CHECK(std::abs(r.achieved_alpha_deg - 89.59) <= 0.25);
    const Verification v = verify_result(r, 3);
    CHECK(v.feasible);
    CHECK(v.order.order >= 3);

    // the rebuilt tableau is the catalog method
    const GlmTableau cat = get("BDF2-Pre-Post-3").tableau;
    REQUIRE(r.tableau.s == cat.s);
    CHECK((r.tableau.D - cat.D).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((r.tableau.theta - cat.theta).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("a corrupted filter fails verification")
{
    OptimizationResult r = optimize_filters(pinned_bdf2());
    OptimizationProblem p = pinned_bdf2();
    Vec theta = p.theta;
    theta(0) += 1e-2;
    r.tableau = build_filtered(p, p.d1, theta, p.bhat, p.b);
    const Verification v = verify_result(r, 3);
    CHECK_FALSE(v.feasible);
    // the oldest step sits at offset -3
    CHECK(std::abs(v.order.at("tau11")) == doctest::Approx(3e-2).epsilon(1e-6));
}

TEST_CASE("an A-stable catalog method verifies on a wide wedge")
{
    OptimizationResult r;
    r.tableau = get("RK22-Pre-Post-3").tableau;
    r.achieved_r = 50.0;
    const Verification v = verify_result(r, 3);
    CHECK(v.feasible);
    CHECK(v.stability.a_stable);
}

TEST_CASE("fixed seed gives a fixed result")
{
    const OptimizationProblem p = OptimizationProblem::standard(core_bdf2(), 3, 3);
    const OptimizationResult a = optimize_filters(p, cheap(7));
    const OptimizationResult b = optimize_filters(p, cheap(7));
    CHECK(a.achieved_r == b.achieved_r);
    CHECK(a.d1 == b.d1);
    CHECK(a.theta == b.theta);
    CHECK(a.evaluations == b.evaluations);
    CHECK(a.seed == 7);
    if (a.feasible) {
        CHECK(a.order_report.order >= 3);
        CHECK(verify_result(a, 3).order.order >= 3);
    }
}

TEST_CASE("unreachable order raises with the best residuals")
{
    const OptimizationProblem p = OptimizationProblem::standard(core_implicit_euler(), 1, 3);
    try {
        optimize_filters(p, cheap(1));
        FAIL("expected an infeasible problem");
    } catch (const InfeasibleError& e) {
        CHECK_FALSE(e.best.residuals.empty());
    }
}

TEST_CASE("problem files")
{
    const json j = json::parse(R"({"core":"BDF2","k":4,"order":3,"objective":"a_alpha","seed":3})");
    const OptimizationProblem p = problem_from_json(j);
    CHECK(p.k == 4);
    CHECK(p.target_order == 3);
    CHECK(p.free_count() == 4 + 4 + 1);

    const json pin = json::parse(R"({"core":"BDF2","k":4,"order":3,"free":{"theta":[true,false,false,false]}})");
    const OptimizationProblem q = problem_from_json(pin);
    CHECK(q.free_count() == 1);

    CHECK_THROWS(problem_from_json(json::parse(R"({"core":"BDF9","k":4,"order":3})")));
    CHECK_THROWS(objective_from_string("sideways"));
    CHECK(objective_from_string("imag_axis") == Objective::ImagAxis);

    const json out = to_json(optimize_filters(pinned_bdf2()));
    CHECK(out.contains("tableau"));
    CHECK(out["feasible"] == true);
}
