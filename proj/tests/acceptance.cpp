// One line per acceptance criterion. Exit status is zero iff the set of
// failing criteria equals the --expect-fail list (default empty).
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "glmlab/catalog.hpp"
#include "glmlab/integrator.hpp"
#include "glmlab/optimizer.hpp"
#include "glmlab/order.hpp"
#include "glmlab/stability.hpp"

using namespace glmlab;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void fail(const std::string& what)
    {
        pass = false;
        detail << " [" << what << "]";
    }
};

std::string fmt(double v, int prec = 3)
{
    std::ostringstream s;
    s.precision(prec);
    s << std::fixed << v;
    return s.str();
}

const std::vector<double> kFiltGrid{0.0, 0.25, 0.5, 0.75, 1.0};

std::vector<CatalogEntry> catalog_with_grid()
{
    std::vector<CatalogEntry> all = list();
    for (double d : kFiltGrid) all.push_back(get_parametric("IE-Filt", d));
    return all;
}

Outcome order_oracle()
{
    Outcome o;
    const std::set<std::string> decimal{"BDF2-Pre-Post-3", "RK22-Pre-Post-3", "IE-Filt((3-sqrt(3))/3)"};
    double worst_rational = 0.0, worst_decimal = 0.0;
    for (const auto& e : catalog_with_grid()) {
        const OrderResidualReport r = order_report(to_compact(e.tableau), 1e-9);
        if (r.order != e.declared_order) o.fail(e.name + " order " + std::to_string(r.order));
        const double m = r.max_through(e.declared_order);
        if (decimal.count(e.name)) {
            worst_decimal = std::max(worst_decimal, m);
            if (m > 1e-8) o.fail(e.name + " residual " + fmt(m, 17));
        } else {
            worst_rational = std::max(worst_rational, m);
            if (m > 1e-13) o.fail(e.name + " residual " + fmt(m, 17));
        }
    }
    o.detail << " max residual rational " << worst_rational << ", decimal " << worst_decimal;
    return o;
}

Outcome angles()
{
    Outcome o;
    const std::vector<std::pair<std::string, double>> want{{"IE-Pre-Post-3", 71.51},
                                                           {"MP-Pre-Post-3", 79.4},
                                                           {"MP-Pre-Post-4", 70.64},
                                                           {"BDF2-Post-3", 83.89},
                                                           {"BDF2-Pre-Post-3", 89.59}};
    for (const auto& [name, alpha] : want) {
        const double got = a_alpha_angle(to_compact(get(name).tableau)).alpha_deg;
        o.detail << " " << name << "=" << fmt(got);
        if (std::abs(got - alpha) > 0.25) o.fail(name + " vs " + fmt(alpha, 2));
    }
    return o;
}

Outcome a_stability()
{
    Outcome o;
    std::vector<std::string> stable{"IE", "MP", "MP-Pre-Post-2", "IE-EIS-3", "RK22-Pre-Post-3"};
    for (double d : kFiltGrid) stable.push_back(get_parametric("IE-Filt", d).name);
    for (const auto& n : stable) {
        const CatalogEntry e = n.rfind("IE-Filt(", 0) == 0 ? get_parametric("IE-Filt", std::stod(n.substr(8))) : get(n);
        const StabilityReport r = a_alpha_angle(to_compact(e.tableau));
        if (!r.a_stable || r.alpha_deg < 90.0 - 0.05) o.fail(n + " alpha " + fmt(r.alpha_deg));
    }
    for (const char* n : {"IE-Pre-Post-3", "MP-Pre-Post-3", "MP-Pre-Post-4", "BDF2-Post-3", "BDF2-Pre-Post-3"}) {
        const StabilityReport r = a_alpha_angle(to_compact(get(n).tableau));
        if (r.a_stable || r.alpha_deg >= 90.0) o.fail(std::string(n) + " reported A-stable");
    }
    o.detail << " " << stable.size() << " A-stable, 5 not";
    return o;
}

Outcome l_stability()
{
    Outcome o;
    for (const auto& [name, want] :
         std::vector<std::pair<std::string, bool>>{{"IE", true}, {"IE-Pre-2", true}, {"RK22-Pre-Post-3", false}, {"MP", false}}) {
        const bool got = is_L_stable(to_compact(get(name).tableau));
        o.detail << " " << name << "=" << (got ? "L" : "not L");
        if (got != want) o.fail(name);
    }
    return o;
}

Outcome decay_slopes()
{
    Outcome o;
    const std::vector<std::pair<std::string, double>> want{
        {"IE", 1},           {"IE-Pre-2", 2},      {"IE-Pre-Post-3", 3}, {"IE-EIS-3", 3},
        {"MP", 2},           {"MP-Pre-Post-3", 3}, {"MP-Pre-Post-4", 4}, {"BDF2", 2},
        {"BDF2-Post-3", 3},  {"BDF2-Pre-Post-3", 3}, {"RK22-Pre-Post-3", 3}};
    const OdeProblem p = make_problem("decay_forced");
    for (const auto& [name, slope] : want) {
        const double got = observed_order(p, get(name), halving(0.2, 5)).slope;
        o.detail << " " << name << "=" << fmt(got);
        if (!(std::abs(got - slope) <= 0.2)) o.fail(name + " expected " + fmt(slope, 0));
    }
    return o;
}

Outcome special_filter()
{
    Outcome o;
    const CatalogEntry e = get("IE-Filt((3-sqrt(3))/3)");
    const double lin = observed_order(make_problem("dahlquist(-1)"), e, halving(0.2, 5)).slope;
    const double cub = observed_order(make_problem("cubic_dissipative"), e, halving(0.2, 5)).slope;
    o.detail << " linear " << fmt(lin) << ", cubic " << fmt(cub);
    if (!(std::abs(lin - 3) <= 0.2)) o.fail("linear slope");
    if (!(std::abs(cub - 2) <= 0.2)) o.fail("cubic slope");
    return o;
}

Outcome energy()
{
    Outcome o;
    OdeProblem p = make_problem("stiff_linear");
    SolveConfig cfg;
    cfg.dt = 0.3;
    p.tf = p.t0 + 200 * cfg.dt;
    for (double d : kFiltGrid) {
        const CatalogEntry e = get_parametric("IE-Filt", d);
        const SolutionRecord r = integrate(p, e, cfg);
        const EnergyResult er = energy_check(r, e);
        if (r.failed || r.states.size() != 201 || !er.monotone) o.fail("d=" + fmt(d, 2));
        o.detail << " d=" << fmt(d, 2) << ":" << er.trace.front() << "->" << er.trace.back();
    }
    return o;
}

double scalar_newton(const std::function<double(double)>& g, const std::function<double(double)>& dg, double y,
                     double tol)
{
    for (int it = 0; it < 50; ++it) {
        const double r = g(y);
        if (std::abs(r) <= tol) return y;
        y -= r / dg(y);
    }
    throw std::runtime_error("newton did not converge");
}

Outcome three_phase()
{
    Outcome o;
    const CatalogEntry m = get("IE-Pre-Post-3");
    double worst = 0.0;
    for (const char* spec : {"cubic_dissipative", "decay_forced"}) {
        OdeProblem p = make_problem(spec);
        SolveConfig cfg;
        cfg.dt = 0.04;
        cfg.newton_tol = 1e-14;
        p.tf = p.t0 + 50 * cfg.dt;
        const SolutionRecord r = integrate(p, m, cfg);
        if (r.failed || r.states.size() != 51) {
            o.fail(std::string(spec) + " run failed");
            continue;
        }
        std::vector<double> u;
        for (const Vec& v : r.initial_history) u.push_back(v(0));
        const double dt = cfg.dt;
        for (int n = 0; n < 50; ++n) {
            const size_t c = u.size();
            const double t1 = p.t0 + (n + 1) * dt;
            // pre-filter, implicit Euler solve, post-filter
            const double y1 = -0.5 * u[c - 3] + u[c - 2] + 0.5 * u[c - 1];
            auto f = [&](double y) { return p.f(t1, Vec::Constant(1, y))(0); };
            auto df = [&](double y) { return p.jacobian(t1, Vec::Constant(1, y))(0, 0); };
            const double y2 = scalar_newton([&](double y) { return y - y1 - dt * f(y); },
                                            [&](double y) { return 1 - dt * df(y); }, y1, cfg.newton_tol);
            u.push_back(5.0 / 11 * u[c - 3] - 15.0 / 11 * u[c - 2] + 15.0 / 11 * u[c - 1] + 6.0 / 11 * y2);
            const double got = r.states[n + 1](0);
            worst = std::max(worst, std::abs(got - u.back()) / std::max(std::abs(u.back()), 1e-300));
        }
    }
    o.detail << " max relative gap " << worst;
    if (!(worst <= 1e-12)) o.fail("gap");
    return o;
}

Outcome linear_recurrence()
{
    Outcome o;
    double worst = 0.0;
    for (const auto& e : catalog_with_grid()) {
        OdeProblem p = make_problem("stiff_linear");
        SolveConfig cfg;
        cfg.dt = 0.02;
        p.tf = p.t0 + 100 * cfg.dt;
        const SolutionRecord r = integrate(p, e, cfg);
        if (r.failed) {
            o.fail(e.name + " run failed");
            continue;
        }
        Eigen::SelfAdjointEigenSolver<Mat> es(*p.linear);
        const Mat Q = es.eigenvectors();
        const CompactGlm c = to_compact(e.tableau);
        double gap = 0.0;
        for (int i = 0; i < Q.cols(); ++i) {
            const CMat M = evolution_matrix(c, cplx(cfg.dt * es.eigenvalues()(i), 0.0));
            CVec X(c.k);
            for (int l = 0; l < c.k; ++l) X(l) = Q.col(i).dot(r.initial_history[l]);
            for (int n = 1; n <= 100; ++n) {
                X = M * X;
                const double got = Q.col(i).dot(r.states[n]);
                gap = std::max(gap, std::abs(got - X(c.k - 1).real()) / std::max(1.0, std::abs(got)));
            }
        }
        worst = std::max(worst, gap);
        if (!(gap <= 1e-10)) o.fail(e.name + " " + std::to_string(gap));
    }
    o.detail << " max gap " << worst;
    return o;
}

Outcome optimizer()
{
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    OptimizerConfig cfg;
    cfg.seed = 1;
    cfg.multistarts = 20;
    const OptimizationResult r = optimize_filters(OptimizationProblem::standard(core_bdf2(), 4, 3), cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const Verification v = verify_result(r, 3);
    o.detail << " search alpha " << fmt(r.achieved_alpha_deg) << " in " << fmt(secs, 1) << "s"
             << (r.feasible ? "" : " (not feasible)") << (v.feasible ? ", verified" : ", verification failed");
    if (!r.feasible || !v.feasible || r.achieved_alpha_deg < 89.3 || secs > 300) o.fail("search");

    const CatalogEntry e = get("BDF2-Pre-Post-3");
    OptimizationProblem pin = OptimizationProblem::standard(core_bdf2(), 4, 3);
    pin.d1 = e.recipe->pre.d1;
    pin.theta = e.recipe->post.theta;
    pin.bhat = e.recipe->post.bhat;
    pin.b = e.recipe->post.b;
    pin.free = FreeMask{std::vector<bool>(4, false), std::vector<bool>(4, false), std::vector<bool>(3, false),
                        std::vector<bool>(pin.b.size(), false)};
    const OptimizationResult pr = optimize_filters(pin, cfg);
    const Verification pv = verify_result(pr, 3);
    o.detail << "; pinned alpha " << fmt(pr.achieved_alpha_deg);
    if (!pr.feasible || !pv.feasible || std::abs(pr.achieved_alpha_deg - 89.59) > 0.25) o.fail("pinned");
    return o;
}

double estimator_slope(const std::string& primary, const std::string& high, const std::string& low)
{
    const OdeProblem p = make_problem("decay_forced");
    std::vector<double> dts = halving(0.2, 5), est;
    for (double dt : dts) {
        SolveConfig cfg;
        cfg.dt = dt;
        const SolutionRecord r = integrate(p, get(primary), cfg);
        const std::vector<double> e = embedded_error_estimate(r, high, low);
        est.push_back(*std::max_element(e.begin(), e.end()));
    }
    return median_slope(dts, est);
}

Outcome estimator()
{
    Outcome o;
    const double ie = estimator_slope("IE-Pre-Post-3", "IE-Pre-Post-3", "IE-Pre-2");
    const double mp = estimator_slope("MP-Pre-Post-4", "MP-Pre-Post-4", "MP-Pre-Post-3");
    o.detail << " IE-Pre pair " << fmt(ie) << ", MP 3rd/4th " << fmt(mp);
    if (!(std::abs(ie - 3) <= 0.3)) o.fail("IE-Pre pair");
    if (!(mp >= 3.7)) o.fail("MP pair");
    return o;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"acceptance criteria"};
    std::vector<int> expect_fail;
    std::vector<int> only;
    app.add_option("--expect-fail", expect_fail, "criteria documented as failing");
    app.add_option("--only", only, "run only these criteria");
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"order oracle", order_oracle},
        {"A(alpha) angles", angles},
        {"A-stability verdicts", a_stability},
        {"L-stability verdicts", l_stability},
        {"decay_forced convergence slopes", decay_slopes},
        {"special filter parameter slopes", special_filter},
        {"energy stability of IE-Filt(d)", energy},
        {"three-phase equivalence", three_phase},
        {"linear recurrence oracle", linear_recurrence},
        {"optimizer", optimizer},
        {"embedded estimator slopes", estimator},
    };

    std::set<int> failed;
    for (size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        if (!o.pass) failed.insert(id);
        std::printf("%s %2d %s:%s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(), o.detail.str().c_str());
        std::fflush(stdout);
    }
    std::set<int> expected;
    for (int id : expect_fail)
        if (only.empty() || std::find(only.begin(), only.end(), id) != only.end()) expected.insert(id);
    std::printf("%zu failing; expected failures:", failed.size());
    for (int id : expected) std::printf(" %d", id);
    std::printf("\n");
    return failed == expected ? 0 : 1;
}
