#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "glmlab/catalog.hpp"
#include "glmlab/glm.hpp"

using namespace glmlab;

namespace {

GlmTableau implicit_euler()
{
    return make_tableau("IE", 1, 1, Mat::Constant(1, 1, 1.0), Mat::Constant(1, 1, 1.0), Vec::Constant(1, 1.0),
                        Vec::Constant(1, 1.0));
}

GlmTableau ie_pre_post_3()
{
    Mat D(1, 3);
    D << -0.5, 1.0, 0.5;
    Vec th(3);
    th << 2.0 / 11, -9.0 / 11, 18.0 / 11;
    return make_tableau("IE-Pre-Post-3", 3, 1, Mat::Constant(1, 1, 1.0), D, th, Vec::Constant(1, 6.0 / 11));
}

}  // namespace

TEST_CASE("implicit Euler compact form")
{
    const CompactGlm c = to_compact(implicit_euler());
    CHECK(c.Atilde.rows() == 1);
    CHECK(c.Atilde(0, 0) == 1.0);
    CHECK(c.Dtilde(0, 0) == 1.0);
    CHECK(c.btilde(0) == 1.0);
    const StepOffsets so = abscissas(c);
    CHECK(so.c(0) == doctest::Approx(1.0));
}

TEST_CASE("three-step compact form places blocks without arithmetic")
{
    const GlmTableau t = ie_pre_post_3();
    const CompactGlm c = to_compact(t);
    REQUIRE(c.Atilde.rows() == 3);
    CHECK(c.Atilde.topRows(2).cwiseAbs().maxCoeff() == 0.0);
    CHECK(c.Atilde(2, 2) == 1.0);
    CHECK(c.Dtilde.topLeftCorner(2, 2) == Mat::Identity(2, 2));
    CHECK(c.Dtilde.col(2).head(2).cwiseAbs().maxCoeff() == 0.0);
    CHECK(c.Dtilde.row(2) == t.D.row(0));
    CHECK(c.btilde.size() == 3);
    CHECK(c.btilde(2) == 6.0 / 11);

    // reading back the blocks is bit-exact
    CHECK(c.Atilde.bottomRightCorner(1, 1) == t.A);
    CHECK(c.Atilde.bottomLeftCorner(1, 2) == t.Ahat);
    CHECK(c.Dtilde.bottomRows(1) == t.D);
}

TEST_CASE("abscissas of the filtered implicit Euler")
{
    const StepOffsets so = abscissas(to_compact(ie_pre_post_3()));
    CHECK(so.ell(0) == -2.0);
    CHECK(so.ell(1) == -1.0);
    CHECK(so.ell(2) == 0.0);
    CHECK(so.c(0) == -2.0);
    CHECK(so.c(1) == -1.0);
    // -1/2*(-2) + 1*(-1) + 1/2*0 + 1
    CHECK(so.c(2) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("abscissa rows of the step copies equal the offsets for every catalog method")
{
    for (const auto& e : list()) {
        const CompactGlm c = to_compact(e.tableau);
        const StepOffsets so = abscissas(c);
        for (int i = 0; i + 1 < c.k; ++i) CHECK(so.c(i) == so.ell(i));
        const Vec cc = c.Atilde * so.e + c.Dtilde * so.ell;
        CHECK((cc - so.c).cwiseAbs().maxCoeff() <= 1e-14);
    }
}

TEST_CASE("error-inhibiting method samples its first solve at two thirds of the step")
{
    const CatalogEntry e = get("IE-EIS-3");
    const StepOffsets so = abscissas(to_compact(e.tableau));
    bool found = false;
    for (int i = 0; i < so.c.size(); ++i)
        if (std::abs(so.c(i) - 2.0 / 3) < 1e-14) found = true;
    CHECK(found);
}

TEST_CASE("dimension errors name the block")
{
    GlmTableau t = ie_pre_post_3();
    t.Ahat = Mat::Zero(1, 3);
    try {
        to_compact(t);
        FAIL("expected a structural error");
    } catch (const StructuralError& err) {
        CHECK(std::string(err.what()).find("Ahat") != std::string::npos);
    }
    GlmTableau u = ie_pre_post_3();
    u.theta = Vec::Zero(2);
    CHECK_THROWS_AS(to_compact(u), StructuralError);
}

TEST_CASE("consistency report")
{
    const ConsistencyReport ie = validate(to_compact(implicit_euler()), 1e-14);
    CHECK(ie.pass);
    CHECK(ie.theta_residual == 0.0);
    CHECK(ie.row_sum_residual == 0.0);

    CHECK(validate(to_compact(get("BDF2-Pre-Post-3").tableau), 1e-9).pass);

    GlmTableau t = ie_pre_post_3();
    t.D.row(0) *= 0.9;
    const ConsistencyReport bad = validate(to_compact(t), 1e-9);
    CHECK_FALSE(bad.pass);
    CHECK(bad.row_sum_residual == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("every catalog method is consistent")
{
    for (const auto& e : list()) CHECK_MESSAGE(validate(to_compact(e.tableau), 1e-9).pass, e.name);
}

TEST_CASE("method JSON round trip")
{
    for (const auto& e : list()) {
        const json j = to_json(e.tableau);
        const GlmTableau back = tableau_from_json(j);
        CHECK(back.k == e.tableau.k);
        CHECK(back.s == e.tableau.s);
        CHECK(back.A == e.tableau.A);
        CHECK(back.D == e.tableau.D);
        CHECK(back.theta == e.tableau.theta);
        CHECK(back.b == e.tableau.b);
        CHECK(back.offsets() == e.tableau.offsets());
        CHECK(back.history.size() == e.tableau.history.size());
    }
}

TEST_CASE("JSON for a one-step method may omit the derivative blocks")
{
    const json j = json::parse(R"({"name":"IE","k":1,"s":1,"A":[[1]],"D":[[1]],"Theta":[1],"b":[1]})");
    const GlmTableau t = tableau_from_json(j);
    CHECK(t.Ahat.cols() == 0);
    CHECK(t.bhat.size() == 0);
    const json bad = json::parse(R"({"name":"x","k":2,"s":1,"A":[[1]],"D":[[0,1]],"Theta":[0,1],"b":[1]})");
    CHECK_THROWS(tableau_from_json(bad));
}
