#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "glmlab/catalog.hpp"
#include "glmlab/filter.hpp"
#include "glmlab/integrator.hpp"
#include "glmlab/optimizer.hpp"
#include "glmlab/order.hpp"
#include "glmlab/stability.hpp"

using namespace glmlab;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError(path + ": " + e.what());
    }
}

void emit(const std::string& text, const std::string& out)
{
    if (out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out);
    if (!f) throw UsageError("cannot write " + out);
    f << text;
}

bool looks_like_file(const std::string& s)
{
    return s.find('/') != std::string::npos || s.ends_with(".json") || std::filesystem::exists(s);
}

struct Resolved {
    GlmTableau tableau;
    std::optional<CatalogEntry> entry;
};

Resolved resolve_method(const std::string& name)
{
    if (looks_like_file(name)) {
        try {
            const json j = read_json(name);
            return {tableau_from_json(j.contains("method") ? j["method"] : j), std::nullopt};
        } catch (const json::exception& e) {
            throw UsageError(name + ": " + e.what());
        }
    }
    try {
        CatalogEntry e = get(name);
        return {e.tableau, e};
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

struct ScanFlags {
    double tol = 1e-9;
    int rays = 40;
    int moduli = 60;
    double zmax = 1e4;

    ScanConfig scan() const
    {
        ScanConfig s;
        s.rays = rays;
        s.moduli = moduli;
        s.zmax = zmax;
        return s;
    }
};

// Returns the report and whether computed values agree with the declared ones.
std::pair<json, bool> analyze_one(const Resolved& m, const ScanFlags& flags)
{
    const CompactGlm c = to_compact(m.tableau);
    const OrderResidualReport order = order_report(c, flags.tol);
    const ConsistencyReport cons = validate(c, flags.tol);
    const StabilityReport st = analyze_stability(c, flags.scan());
    json j;
    j["name"] = m.tableau.name;
    j["order"] = to_json(order);
    j["consistent"] = cons.pass;
    j["stability"] = to_json(st);
    bool ok = cons.pass;
    if (!cons.pass) {
        json flagged = json::array();
        for (const auto& [label, v] : order.residuals)
            if (label.starts_with("tau0") && !(std::abs(v) <= flags.tol)) flagged.push_back(label);
        j["flagged"] = flagged;
    }
    if (m.entry) {
        const CatalogEntry& e = *m.entry;
        json mm = json::array();
        if (order.order != e.declared_order) mm.push_back("order");
        if (std::abs(st.alpha_deg - e.declared_alpha_deg) > 0.25) mm.push_back("alpha");
        if (st.l_stable != e.declared_l_stable) mm.push_back("l_stable");
        j["declared"] = {{"order", e.declared_order},
                         {"alpha_deg", e.declared_alpha_deg},
                         {"l_stable", e.declared_l_stable}};
        j["mismatches"] = mm;
        ok = ok && mm.empty();
    }
    j["match"] = ok;
    return {j, ok};
}

std::string fmt(double v)
{
    if (std::isinf(v)) return "inf";
    std::ostringstream o;
    o.precision(10);
    o << v;
    return o.str();
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"glmlab: time-filtered general linear methods"};
    app.require_subcommand(1);

    ScanFlags scan;
    std::string out;
    auto add_scan = [&](CLI::App* c) {
        c->add_option("--tol", scan.tol, "order / consistency tolerance")->check(CLI::PositiveNumber);
        c->add_option("--scan-rays", scan.rays, "rays per wedge")->check(CLI::Range(1, 100000));
        c->add_option("--scan-moduli", scan.moduli, "moduli per ray")->check(CLI::Range(2, 100000));
        c->add_option("--zmax", scan.zmax, "largest |z| of the main scan")->check(CLI::PositiveNumber);
    };

    std::string method;
    auto* analyze = app.add_subcommand("analyze", "order residuals and stability report");
    analyze->add_option("method", method, "catalog name, method JSON file, or 'all'")->required();
    add_scan(analyze);
    analyze->add_option("--out", out);

    std::string window = "-6:2:-4:4";
    int n = 200;
    auto* region = app.add_subcommand("region", "spectral radius raster as CSV re,im,rho");
    region->add_option("method", method)->required();
    region->add_option("--window", window, "re0:re1:im0:im1");
    region->add_option("--n", n, "points per axis")->check(CLI::Range(2, 100000));
    region->add_option("--out", out);

    std::string problem = "decay_forced";
    double dt0 = 0.2;
    int levels = 5;
    auto* converge = app.add_subcommand("converge", "convergence table as CSV dt,error,order_estimate");
    converge->add_option("method", method)->required();
    converge->add_option("--problem", problem);
    converge->add_option("--dt0", dt0)->check(CLI::PositiveNumber);
    converge->add_option("--levels", levels)->check(CLI::Range(1, 30));
    converge->add_option("--out", out);

    std::string problem_file;
    std::uint64_t seed = 1;
    auto* optimize = app.add_subcommand("optimize", "optimize filter coefficients");
    optimize->add_option("problem", problem_file, "problem JSON file")->required();
    optimize->add_option("--seed", seed);
    optimize->add_option("--out", out);

    std::string action, export_name;
    auto* catalog = app.add_subcommand("catalog", "list or export catalog methods");
    catalog->add_option("action", action)->required()->check(CLI::IsMember({"list", "export"}));
    catalog->add_option("name", export_name, "method to export (default: every method)");
    catalog->add_option("--out", out);

    std::string core_name, filter_file;
    auto* filter = app.add_subcommand("filter", "build a filtered method from a core and a filter file");
    filter->add_option("core", core_name, "IE, MP, BDF2, RK22 or a core JSON file")->required();
    filter->add_option("filter-file", filter_file)->required();
    filter->add_option("--out", out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (analyze->parsed()) {
            if (method == "all") {
                json arr = json::array();
                bool all_ok = true;
                for (const auto& e : list()) {
                    auto [j, ok] = analyze_one({e.tableau, e}, scan);
                    arr.push_back(j);
                    all_ok = all_ok && ok;
                }
                emit(arr.dump(2) + "\n", out);
                return all_ok ? 0 : 1;
            }
            const Resolved m = resolve_method(method);
            auto [j, ok] = analyze_one(m, scan);
            emit(j.dump(2) + "\n", out);
            return ok ? 0 : 1;
        }
        if (region->parsed()) {
            double w[4];
            char sep[3];
            std::istringstream ws(window);
            if (!(ws >> w[0] >> sep[0] >> w[1] >> sep[1] >> w[2] >> sep[2] >> w[3]) || sep[0] != ':' ||
                sep[1] != ':' || sep[2] != ':' || !(w[0] < w[1]) || !(w[2] < w[3]))
                throw UsageError("--window expects re0:re1:im0:im1 with re0<re1, im0<im1");
            const Resolved m = resolve_method(method);
            const auto pts = region_raster(to_compact(m.tableau), w[0], w[1], w[2], w[3], n, n);
            std::ostringstream o;
            o << "re,im,rho\n";
            for (const auto& p : pts) o << fmt(p.re) << ',' << fmt(p.im) << ',' << fmt(p.rho) << '\n';
            emit(o.str(), out);
            return 0;
        }
        if (converge->parsed()) {
            OdeProblem p;
            try {
                p = make_problem(problem);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            const Resolved m = resolve_method(method);
            CatalogEntry e;
            if (m.entry)
                e = *m.entry;
            else {
                e.name = m.tableau.name;
                e.tableau = m.tableau;
                e.abscissas = abscissas(to_compact(m.tableau)).c;
            }
            const ConvergenceTable t = observed_order(p, e, halving(dt0, levels));
            std::ostringstream o;
            o << "dt,error,order_estimate\n";
            for (const auto& l : t.levels) {
                o << fmt(l.dt) << ',' << (l.error ? fmt(*l.error) : "---") << ','
                  << (l.order_estimate ? fmt(*l.order_estimate) : (l.error ? "" : "---")) << '\n';
            }
            emit(o.str(), out);
            std::cerr << "slope " << fmt(t.slope) << '\n';
            return 0;
        }
        if (optimize->parsed()) {
            OptimizationProblem p;
            try {
                p = problem_from_json(read_json(problem_file));
            } catch (const json::exception& e) {
                throw UsageError(problem_file + ": " + e.what());
            } catch (const std::invalid_argument& e) {
                throw UsageError(problem_file + ": " + e.what());
            }
            OptimizerConfig cfg;
            cfg.seed = seed;
            const OptimizationResult r = optimize_filters(p, cfg);
            json j = to_json(r);
            const Verification v = verify_result(r, p.target_order, p.objective);
            j["verification"] = {{"feasible", v.feasible},
                                 {"worst_rho", v.worst_rho},
                                 {"stability", to_json(v.stability)}};
            emit(j.dump(2) + "\n", out);
            return 0;
        }
        if (catalog->parsed()) {
            if (action == "list") {
                json arr = json::array();
                for (const auto& e : list()) arr.push_back(to_json(e));
                emit(arr.dump(2) + "\n", out);
                return 0;
            }
            json j;
            if (export_name.empty()) {
                j = json::array();
                for (const auto& e : list()) j.push_back(to_json(e.tableau));
            } else {
                try {
                    j = to_json(get(export_name).tableau);
                } catch (const std::invalid_argument& e) {
                    throw UsageError(e.what());
                }
            }
            emit(j.dump(2) + "\n", out);
            return 0;
        }
        if (filter->parsed()) {
            GlmTableau core;
            try {
                core = looks_like_file(core_name) ? tableau_from_json(read_json(core_name)) : core_from_name(core_name);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            const json f = read_json(filter_file);
            const CoreMethod cm = make_core(core);
            PreFilter pre = f.contains("pre") ? pre_from_json(f["pre"]) : PreFilter::identity(core.k);
            PostFilter post;
            if (f.contains("post")) {
                post = post_from_json(f["post"]);
            } else {
                Vec w = Vec::Zero(core.s);
                w(core.s - 1) = 1.0;
                post = PostFilter::stage_values(Vec::Zero(core.k), w);
            }
            GlmTableau t = prune_dead_stages(apply_filters(cm, pre, post));
            t.name = f.value("name", core.name + "-filtered");
            emit(to_json(t).dump(2) + "\n", out);
            return 0;
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const StructuralError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << '\n' << to_json(e.best).dump(2) << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
