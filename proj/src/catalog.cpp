#include "glmlab/catalog.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace glmlab {

namespace {

Vec V(std::initializer_list<double> xs)
{
    Vec v(static_cast<Eigen::Index>(xs.size()));
    int i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

Mat M(int r, int c, std::initializer_list<double> xs)
{
    Mat m(r, c);
    auto it = xs.begin();
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = *it++;
    return m;
}

// single implicit stage with D row d and diagonal a
GlmTableau one_stage(const std::string& name, double a, const Vec& d, const Vec& theta, double b)
{
    const int k = static_cast<int>(d.size());
    return make_tableau(name, k, 1, M(1, 1, {a}), d.transpose(), theta, V({b}));
}

const Vec kMpPre = V({-1.0 / 12, 1.0 / 2, -5.0 / 4, 11.0 / 6});
const Vec kIePre = V({-0.5, 1.0, 0.5});

const Vec kBdfPreD = V({2.670130894410204, -3.311517498805319, -3.489799303077245, 5.131185907472361});
const Vec kBdfPreTheta = V({0.370742163920604, -0.631064728171402, -0.729528261935270, 1.989850826186068});
const double kBdfPreB = 0.120568773483737;
const double kBdfPrePublishedC = 3.930023404911324;

const Vec kRkD = V({0.373461706729200, 0.626538293270800});
const Vec kRkQ = V({-0.075425887737539, 0.551112405533260, -0.596071637983322, 1.120385120187601});

void finish(CatalogEntry& e)
{
    e.tableau.name = e.name;
    e.abscissas = abscissas(to_compact(e.tableau)).c;
}

CatalogEntry ie()
{
    CatalogEntry e;
    e.name = "IE";
    e.tableau = one_stage("IE", 1.0, V({1.0}), V({1.0}), 1.0);
    e.declared_order = e.declared_observed_order = 1;
    e.declared_l_stable = true;
    e.recipe = Recipe{CoreMethod{core_implicit_euler()}, PreFilter::identity(1),
                      PostFilter::stage_values(V({0.0}), V({0.0, 1.0}))};
    finish(e);
    return e;
}

CatalogEntry ie_pre_2()
{
    CatalogEntry e;
    e.name = "IE-Pre-2";
    e.tableau = one_stage(e.name, 1.0, kIePre, kIePre, 1.0);
    e.declared_order = e.declared_observed_order = 2;
    e.declared_l_stable = true;
    e.family = "IE-Pre";
    e.recipe = Recipe{CoreMethod{core_implicit_euler()}, PreFilter::stencil(1.0, V({1.0, -2.0, 1.0})),
                      PostFilter::stage_values(V({0.0, 0.0, 0.0}), V({0.0, 1.0}))};
    finish(e);
    return e;
}

CatalogEntry ie_pre_post_3()
{
    CatalogEntry e;
    e.name = "IE-Pre-Post-3";
    e.tableau = one_stage(e.name, 1.0, kIePre, V({2.0 / 11, -9.0 / 11, 18.0 / 11}), 6.0 / 11);
    e.declared_order = e.declared_observed_order = 3;
    e.declared_alpha_deg = 71.51;
    e.family = "IE-Pre";
    e.recipe = Recipe{CoreMethod{core_implicit_euler()}, PreFilter::stencil(1.0, V({1.0, -2.0, 1.0})),
                      PostFilter::stage_values(V({5.0 / 11, -15.0 / 11, 15.0 / 11}), V({0.0, 6.0 / 11}))};
    finish(e);
    return e;
}

CatalogEntry ie_eis_3()
{
    CatalogEntry e;
    e.name = "IE-EIS-3";
    GlmTableau t;
    t.k = 2;
    t.s = 3;
    t.ell = V({-1.0 / 3, 0.0});
    t.A = M(3, 3, {0, 0, 0, -6.0 / 5, 1, 0, -47.0 / 60, -1.0 / 12, 1});
    t.D = M(3, 2, {0, 1, 14.0 / 5, -9.0 / 5, 14.0 / 5, -9.0 / 5});
    t.Ahat = M(3, 1, {0, 9.0 / 5, 9.0 / 5});
    t.theta = V({14.0 / 5, -9.0 / 5});
    t.bhat = V({9.0 / 5});
    t.b = t.A.row(2).transpose();
    // u^{n+2/3} = second stage
    t.history = Mat::Zero(1, 2 + 1 + 3);
    t.history.block(0, 0, 1, 2) = t.D.row(1);
    t.history(0, 2) = t.Ahat(1, 0);
    t.history.block(0, 3, 1, 3) = t.A.row(1);
    e.tableau = t;
    e.declared_order = 2;
    e.declared_observed_order = 3;
    e.implicit_solves_per_step = 2;
    e.retains_stages = true;
    e.abscissa_note = "intermediate solve at t_n + 2/3 dt, final solve at t_{n+1}";
    finish(e);
    return e;
}

CatalogEntry mp()
{
    CatalogEntry e;
    e.name = "MP";
    e.tableau = one_stage(e.name, 0.5, V({1.0}), V({1.0}), 1.0);
    e.declared_order = e.declared_observed_order = 2;
    e.recipe = Recipe{CoreMethod{core_midpoint()}, PreFilter::identity(1),
                      PostFilter::stage_values(V({0.0}), V({0.0, 0.0, 1.0}))};
    finish(e);
    return e;
}

CatalogEntry mp_pre_post(int p)
{
    CatalogEntry e;
    e.name = "MP-Pre-Post-" + std::to_string(p);
    e.family = "MP-Pre";
    e.declared_order = e.declared_observed_order = p;
    Vec theta_stage;
    Vec w;
    if (p == 2) {
        theta_stage = V({1.0 / 22, -5.0 / 22, 9.0 / 22, -7.0 / 22});
        w = V({6.0 / 11, 0.0, 6.0 / 11});
        e.tableau = one_stage(e.name, 0.5, kMpPre, 12.0 / 11 * kMpPre + V({1, -5, 9, -7}) / 22.0, 6.0 / 11);
    } else if (p == 3) {
        theta_stage = Vec::Zero(4);
        w = V({0.5, 0.0, 0.5});
        e.tableau = one_stage(e.name, 0.5, kMpPre, kMpPre, 0.5);
        e.declared_alpha_deg = 79.4;
    } else {
        theta_stage = V({-2.0 / 25, 2.0 / 5, -21.0 / 25, 26.0 / 25});
        w = V({0.0, 0.0, 12.0 / 25});
        e.tableau = one_stage(e.name, 0.5, kMpPre, V({-3, 16, -36, 48}) / 25.0, 12.0 / 25);
        e.declared_alpha_deg = 70.64;
    }
    e.recipe = Recipe{CoreMethod{core_midpoint()}, PreFilter::row(kMpPre), PostFilter::stage_values(theta_stage, w)};
    finish(e);
    return e;
}

CatalogEntry bdf2()
{
    CatalogEntry e;
    e.name = "BDF2";
    e.tableau = one_stage(e.name, 2.0 / 3, V({-1.0 / 3, 4.0 / 3}), V({-1.0 / 3, 4.0 / 3}), 2.0 / 3);
    e.declared_order = e.declared_observed_order = 2;
    e.declared_l_stable = true;
    e.recipe = Recipe{CoreMethod{core_bdf2()}, PreFilter::identity(2),
                      PostFilter::stage_values(V({0.0, 0.0}), V({0.0, 1.0}))};
    finish(e);
    return e;
}

CatalogEntry bdf2_post_3()
{
    CatalogEntry e;
    e.name = "BDF2-Post-3";
    e.tableau = one_stage(e.name, 2.0 / 3, V({0.0, -1.0 / 3, 4.0 / 3}), V({2.0 / 11, -9.0 / 11, 18.0 / 11}), 6.0 / 11);
    e.declared_order = e.declared_observed_order = 3;
    e.declared_alpha_deg = 83.89;
    e.recipe = Recipe{CoreMethod{core_bdf2()}, PreFilter::identity(3),
                      PostFilter::stage_values(V({2.0 / 11, -6.0 / 11, 6.0 / 11}), V({0.0, 9.0 / 11}))};
    finish(e);
    return e;
}

CatalogEntry bdf2_pre_post_3()
{
    CatalogEntry e;
    e.name = "BDF2-Pre-Post-3";
    const Vec d = 4.0 / 3 * kBdfPreD + V({0.0, 0.0, -1.0 / 3, 0.0});
    e.tableau = one_stage(e.name, 2.0 / 3, d, kBdfPreTheta, kBdfPreB);
    e.declared_order = e.declared_observed_order = 3;
    e.declared_alpha_deg = 89.59;
    e.recipe = Recipe{CoreMethod{core_bdf2()}, PreFilter::row(kBdfPreD),
                      PostFilter::coefficients(kBdfPreTheta, Vec::Zero(3), V({0.0, kBdfPreB}))};
    e.published_abscissa = kBdfPrePublishedC;
    e.abscissa_note = "computed stage abscissa differs from the tabulated forcing time 3.930023404911324";
    finish(e);
    return e;
}

CatalogEntry rk22()
{
    CatalogEntry e;
    e.name = "RK22";
    e.tableau = make_tableau(e.name, 1, 2, M(2, 2, {0.5, -0.5, 0.5, 0.5}), M(2, 1, {1, 1}), V({1.0}), V({0.5, 0.5}));
    e.declared_order = e.declared_observed_order = 2;
    e.declared_l_stable = true;
    e.implicit_solves_per_step = 2;
    e.abscissa_note = "Lobatto IIIC, stages at t_n and t_{n+1}";
    e.recipe = Recipe{CoreMethod{core_lobatto_iiic()}, PreFilter::identity(1),
                      PostFilter::stage_values(V({0.0}), V({0.0, 0.0, 1.0}))};
    finish(e);
    return e;
}

CatalogEntry rk22_pre_post_3()
{
    CatalogEntry e;
    e.name = "RK22-Pre-Post-3";
    const double q3 = kRkQ(2), q4 = kRkQ(3);
    Mat D(2, 2);
    D << kRkD.transpose(), kRkD.transpose();
    const Vec theta = kRkQ.head(2) + (q3 + q4) * kRkD;
    e.tableau = make_tableau(e.name, 2, 2, M(2, 2, {0.5, -0.5, 0.5, 0.5}), D, theta,
                             V({0.5 * (q3 + q4), 0.5 * (q4 - q3)}));
    e.declared_order = e.declared_observed_order = 3;
    e.implicit_solves_per_step = 2;
    e.recipe = Recipe{CoreMethod{core_lobatto_iiic()}, PreFilter::row(kRkD),
                      PostFilter::stage_values(kRkQ.head(2), V({0.0, q3, q4}))};
    finish(e);
    return e;
}

std::string format_d(double d)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", d);
    return buf;
}

}  // namespace

GlmTableau core_implicit_euler()
{
    return make_tableau("IE-core", 1, 2, M(2, 2, {0, 0, 0, 1}), M(2, 1, {1, 1}), V({1.0}), V({0.0, 1.0}));
}

GlmTableau core_midpoint()
{
    return make_tableau("MP-core", 1, 3, M(3, 3, {0, 0, 0, 0, 0.5, 0, 0, 1, 0}), M(3, 1, {1, 1, 1}), V({1.0}),
                        V({0.0, 1.0, 0.0}));
}

GlmTableau core_bdf2()
{
    return make_tableau("BDF2-core", 2, 2, M(2, 2, {0, 0, 0, 2.0 / 3}), M(2, 2, {0, 1, -1.0 / 3, 4.0 / 3}),
                        V({-1.0 / 3, 4.0 / 3}), V({0.0, 2.0 / 3}));
}

GlmTableau core_lobatto_iiic()
{
    return make_tableau("RK22-core", 1, 3, M(3, 3, {0, 0, 0, 0, 0.5, -0.5, 0, 0.5, 0.5}), M(3, 1, {1, 1, 1}),
                        V({1.0}), V({0.0, 0.5, 0.5}));
}

CatalogEntry get_parametric(const std::string& name, double d)
{
    if (name != "IE-Filt") throw std::invalid_argument("unknown parametric family " + name);
    if (!(d >= 0.0 && d < 1.5)) throw std::invalid_argument("IE-Filt parameter must lie in [0, 3/2)");
    CatalogEntry e;
    e.name = "IE-Filt(" + format_d(d) + ")";
    const double den = 3.0 - 2.0 * d;
    const Vec theta = V({(2 * d - 1) / den, 4 * (1 - d) / den});
    e.tableau = one_stage(e.name, 1.0, V({d, 1.0 - d}), theta, 2.0 / den);
    e.declared_order = 2;
    const double special = (3.0 - std::sqrt(3.0)) / 3.0;
    if (std::abs(d - special) < 1e-12) {
        e.declared_observed_order = 3;
        e.observed_scope = "linear problems only";
    } else {
        e.declared_observed_order = 2;
    }
    e.out_of_range = d > 1.0;
    e.recipe = Recipe{CoreMethod{core_implicit_euler()}, PreFilter::row(V({d, 1.0 - d})),
                      PostFilter::coefficients(theta, V({0.0}), V({0.0, 2.0 / den}))};
    e.abscissa_note = "forcing at t_n + (1-d) dt";
    finish(e);
    return e;
}

CatalogEntry get(const std::string& name)
{
    static const std::map<std::string, CatalogEntry (*)()> table = {
        {"IE", ie},
        {"IE-Pre-2", ie_pre_2},
        {"IE-Pre-Post-3", ie_pre_post_3},
        {"IE-EIS-3", ie_eis_3},
        {"MP", mp},
        {"MP-Pre-Post-2", [] { return mp_pre_post(2); }},
        {"MP-Pre-Post-3", [] { return mp_pre_post(3); }},
        {"MP-Pre-Post-4", [] { return mp_pre_post(4); }},
        {"BDF2", bdf2},
        {"BDF2-Post-3", bdf2_post_3},
        {"BDF2-Pre-Post-3", bdf2_pre_post_3},
        {"RK22", rk22},
        {"Lobatto-IIIC", rk22},
        {"RK22-Pre-Post-3", rk22_pre_post_3},
    };
    if (auto it = table.find(name); it != table.end()) return it->second();
    const std::string prefix = "IE-Filt(";
    if (name.rfind(prefix, 0) == 0 && name.back() == ')') {
        const std::string arg = name.substr(prefix.size(), name.size() - prefix.size() - 1);
        double d = 0.0;
        if (arg == "(3-sqrt(3))/3" || arg == "opt")
            d = (3.0 - std::sqrt(3.0)) / 3.0;
        else {
            size_t used = 0;
            try {
                d = std::stod(arg, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != arg.size()) throw std::invalid_argument("bad IE-Filt parameter: " + arg);
        }
        return get_parametric("IE-Filt", d);
    }
    throw std::invalid_argument("unknown method " + name);
}

std::vector<std::string> names()
{
    return {"IE",   "IE-Filt(0)",  "IE-Filt(0.25)",   "IE-Filt(0.5)",  "IE-Filt(0.75)",   "IE-Filt(1)",
            "IE-Filt((3-sqrt(3))/3)", "IE-Pre-2", "IE-Pre-Post-3", "IE-EIS-3", "MP", "MP-Pre-Post-2",
            "MP-Pre-Post-3", "MP-Pre-Post-4", "BDF2", "BDF2-Post-3", "BDF2-Pre-Post-3", "RK22",
            "RK22-Pre-Post-3"};
}

std::vector<CatalogEntry> list()
{
    std::vector<CatalogEntry> out;
    for (const auto& n : names()) out.push_back(get(n));
    return out;
}

std::vector<CatalogEntry> family_members(const std::string& family)
{
    if (family == "IE-Pre") return {get("IE-Pre-2"), get("IE-Pre-Post-3")};
    if (family == "MP-Pre") return {get("MP-Pre-Post-2"), get("MP-Pre-Post-3"), get("MP-Pre-Post-4")};
    throw std::invalid_argument("unknown family " + family);
}

json to_json(const CatalogEntry& e)
{
    json j = {{"name", e.name},
              {"declared_order", e.declared_order},
              {"declared_observed_order", e.declared_observed_order},
              {"declared_alpha_deg", e.declared_alpha_deg},
              {"declared_l_stable", e.declared_l_stable},
              {"implicit_solves_per_step", e.implicit_solves_per_step},
              {"retains_stages", e.retains_stages},
              {"abscissas", vector_json(e.abscissas)},
              {"method", to_json(e.tableau)}};
    if (!e.observed_scope.empty()) j["observed_scope"] = e.observed_scope;
    if (e.published_abscissa) j["published_abscissa"] = *e.published_abscissa;
    if (!e.abscissa_note.empty()) j["abscissa_note"] = e.abscissa_note;
    if (!e.family.empty()) j["family"] = e.family;
    if (e.out_of_range) j["warning"] = "parameter outside the energy-stable range [0, 1]";
    return j;
}

}  // namespace glmlab
