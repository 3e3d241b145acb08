#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "glmlab/catalog.hpp"
#include "glmlab/filter.hpp"
#include "glmlab/order.hpp"

using namespace glmlab;

namespace {

GlmTableau rk4()
{
    Mat A = Mat::Zero(4, 4);
    A(1, 0) = 0.5;
    A(2, 1) = 0.5;
    A(3, 2) = 1.0;
    Vec b(4);
    b << 1.0 / 6, 1.0 / 3, 1.0 / 3, 1.0 / 6;
    return make_tableau("RK4", 1, 4, A, Mat::Ones(4, 1), Vec::Ones(1), b);
}

}  // namespace

TEST_CASE("implicit Euler residuals")
{
    const OrderResidualReport r = tau_residuals(to_compact(get("IE").tableau));
    CHECK(r.at("tau11") == 0.0);
    CHECK(r.at("tau21") == doctest::Approx(0.5));
    CHECK(order_of(to_compact(get("IE").tableau)) == 1);
}

TEST_CASE("filtered implicit Euler is third order and not fourth")
{
    const OrderResidualReport r = order_report(to_compact(get("IE-Pre-Post-3").tableau), 1e-14);
    CHECK(r.max_through(3) <= 1e-14);
    double q4 = 0.0;
    for (const char* l : {"tau41", "tau42", "tau43", "tau44"}) q4 = std::max(q4, std::abs(r.at(l)));
    CHECK(q4 > 1e-3);
    CHECK(r.order == 3);
}

TEST_CASE("explicit RK4 as a one-step GLM")
{
    const OrderResidualReport r = order_report(to_compact(rk4()), 1e-14);
    CHECK(r.max_through(4) <= 1e-14);
    CHECK(r.order == 4);
}

TEST_CASE("order classification examples")
{
    CHECK(order_of(to_compact(get("IE-Pre-2").tableau), 1e-12) == 2);
    CHECK(order_of(to_compact(get("IE-EIS-3").tableau), 1e-12) == 2);
    CHECK(order_of(to_compact(get("MP-Pre-Post-4").tableau), 1e-9) == 4);
}

TEST_CASE("inconsistent methods report order -1")
{
    GlmTableau t = get("BDF2").tableau;
    t.theta(0) += 0.1;
    CHECK(order_of(to_compact(t)) == -1);
}

TEST_CASE("every catalog method has its declared order")
{
    for (const auto& e : list()) {
        const OrderResidualReport r = order_report(to_compact(e.tableau), 1e-9);
        CHECK_MESSAGE(r.order == e.declared_order, e.name);
        // classification invariant: the next group fails
        if (r.order >= 0 && r.order < 4) {
            double next = 0.0;
            for (size_t i = 0; i < r.residuals.size(); ++i)
                if (kTauOrder[i] == r.order + 1) next = std::max(next, std::abs(r.residuals[i].second));
            CHECK(next > 1e-9);
        }
    }
}

TEST_CASE("order is unchanged by a redundant stage")
{
    const CatalogEntry e = get("MP-Pre-Post-3");
    REQUIRE(e.recipe);
    const GlmTableau full = apply_filters(e.recipe->core, e.recipe->pre, e.recipe->post);
    CHECK(full.s > e.tableau.s);
    CHECK(order_of(to_compact(full), 1e-9) >= 3);
    CHECK(order_of(to_compact(e.tableau), 1e-9) >= 3);
}

TEST_CASE("scaling the weights perturbs tau11 by eps times their sum")
{
    const double eps = 1e-3;
    for (const char* name : {"BDF2-Post-3", "MP-Pre-Post-4", "RK22"}) {
        const GlmTableau t = get(name).tableau;
        GlmTableau u = t;
        u.b *= 1.0 + eps;
        u.bhat *= 1.0 + eps;
        const CompactGlm c = to_compact(t);
        const double shift = tau_residuals(to_compact(u)).at("tau11") - tau_residuals(c).at("tau11");
        CHECK(shift == doctest::Approx(eps * c.btilde.sum()).epsilon(1e-9));
    }
}

TEST_CASE("report JSON shape")
{
    const json j = to_json(order_report(to_compact(get("MP").tableau), 1e-9));
    CHECK(j["order"] == 2);
    CHECK(j["tol"] == 1e-9);
    CHECK(j["residuals"].size() == 10);
    CHECK(j["residuals"].contains("tau44"));
}
