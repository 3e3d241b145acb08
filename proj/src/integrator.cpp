#include "glmlab/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "glmlab/stability.hpp"

namespace glmlab {

StepFailure::StepFailure(const std::string& msg, double res, int iters)
    : std::runtime_error(msg), residual(res), iterations(iters)
{
}

// ---------------------------------------------------------------- problems

namespace {

std::vector<double> parse_args(const std::string& spec, std::string& name)
{
    std::vector<double> args;
    const auto open = spec.find('(');
    if (open == std::string::npos) {
        name = spec;
        return args;
    }
    if (spec.back() != ')') throw std::invalid_argument("malformed problem spec " + spec);
    name = spec.substr(0, open);
    std::stringstream ss(spec.substr(open + 1, spec.size() - open - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
        size_t used = 0;
        double v;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad argument '" + item + "' in " + spec);
        }
        if (item.find_first_not_of(" \t", used) != std::string::npos)
            throw std::invalid_argument("bad argument '" + item + "' in " + spec);
        args.push_back(v);
    }
    return args;
}

Vec scalar(double x)
{
    return Vec::Constant(1, x);
}

Mat scalar_m(double x)
{
    return Mat::Constant(1, 1, x);
}

OdeProblem linear_problem(std::string name, const Mat& L, const Vec& u0, double tf)
{
    OdeProblem p;
    p.name = std::move(name);
    p.linear = L;
    p.f = [L](double, const Vec& u) -> Vec { return L * u; };
    p.jacobian = [L](double, const Vec&) -> Mat { return L; };
    p.u0 = u0;
    p.t0 = 0.0;
    p.tf = tf;
    Eigen::SelfAdjointEigenSolver<Mat> es(L);
    const bool symmetric = (L - L.transpose()).cwiseAbs().maxCoeff() == 0.0;
    if (symmetric) {
        const Mat Q = es.eigenvectors();
        const Vec lam = es.eigenvalues();
        p.exact = [Q, lam, u0](double t) -> Vec {
            return Q * (lam.array() * t).exp().matrix().asDiagonal() * (Q.transpose() * u0);
        };
        p.dissipative = lam.maxCoeff() <= 0.0;
    }
    return p;
}

}  // namespace

OdeProblem make_problem(const std::string& spec)
{
    std::string name;
    const std::vector<double> a = parse_args(spec, name);
    auto need = [&](size_t n) {
        if (a.size() != n)
            throw std::invalid_argument(name + " expects " + std::to_string(n) + " argument(s)");
    };

    if (name == "dahlquist") {
        need(1);
        OdeProblem p = linear_problem(spec, scalar_m(a[0]), scalar(1.0), 2.0);
        return p;
    }
    if (name == "poly") {
        need(1);
        const double q = a[0];
        if (q < 1) throw std::invalid_argument("poly degree must be >= 1");
        OdeProblem p;
        p.name = spec;
        p.f = [q](double t, const Vec&) -> Vec { return scalar(q * std::pow(t, q - 1)); };
        p.jacobian = [](double, const Vec&) -> Mat { return scalar_m(0.0); };
        p.u0 = scalar(0.0);
        p.t0 = 0.0;
        p.tf = 1.0;
        p.exact = [q](double t) -> Vec { return scalar(std::pow(t, q)); };
        return p;
    }
    if (name == "decay_forced") {
        if (a.size() > 1) need(1);
        const double u0 = a.empty() ? 1.0 : a[0];
        const double c = u0 - 0.5;
        OdeProblem p;
        p.name = spec;
        p.f = [](double t, const Vec& u) -> Vec { return scalar(-u(0) + std::cos(t)); };
        p.jacobian = [](double, const Vec&) -> Mat { return scalar_m(-1.0); };
        p.u0 = scalar(u0);
        p.t0 = 0.0;
        p.tf = 2.0;
        p.exact = [c](double t) -> Vec { return scalar(c * std::exp(-t) + 0.5 * (std::cos(t) + std::sin(t))); };
        return p;
    }
    if (name == "cubic_dissipative") {
        need(0);
        OdeProblem p;
        p.name = spec;
        p.f = [](double, const Vec& u) -> Vec { return scalar(-u(0) * u(0) * u(0)); };
        p.jacobian = [](double, const Vec& u) -> Mat { return scalar_m(-3.0 * u(0) * u(0)); };
        p.u0 = scalar(1.0);
        p.t0 = 0.0;
        p.tf = 2.0;
        p.exact = [](double t) -> Vec { return scalar(1.0 / std::sqrt(1.0 + 2.0 * t)); };
        p.dissipative = true;
        return p;
    }
    if (name == "stiff_linear") {
        Mat L(2, 2);
        if (a.empty())
            L << -2.0, 1.0, 1.0, -100.0;
        else {
            need(3);
            L << a[0], a[1], a[1], a[2];
        }
        Eigen::SelfAdjointEigenSolver<Mat> es(L);
        if (es.eigenvalues().maxCoeff() >= 0.0)
            throw std::invalid_argument("stiff_linear needs a negative definite matrix");
        Vec u0(2);
        u0 << 1.0, 1.0;
        return linear_problem(spec, L, u0, 2.0);
    }
    if (name == "lotka_volterra") {
        need(0);
        OdeProblem p;
        p.name = spec;
        p.f = [](double, const Vec& u) -> Vec {
            Vec d(2);
            d << 1.5 * u(0) - u(0) * u(1), u(0) * u(1) - 3.0 * u(1);
            return d;
        };
        p.jacobian = [](double, const Vec& u) -> Mat {
            Mat J(2, 2);
            J << 1.5 - u(1), -u(0), u(1), u(0) - 3.0;
            return J;
        };
        p.u0 = Vec::Constant(2, 1.0);
        p.t0 = 0.0;
        p.tf = 2.0;
        return p;
    }
    throw std::invalid_argument("unknown problem " + spec);
}

// ---------------------------------------------------------------- stepping

namespace {

struct Prepared {
    GlmTableau t;
    CompactGlm c;
    Vec stage_c;  // abscissas of the s real stages
    std::vector<std::pair<int, int>> blocks;
    bool needs_history_f = false;
};

Prepared prepare(const GlmTableau& t)
{
    Prepared p;
    p.t = t;
    p.c = to_compact(t);
    p.stage_c = abscissas(p.c).c.tail(t.s);
    for (int i = 0; i < t.s;) {
        int end = i;
        for (bool grown = true; grown;) {
            grown = false;
            for (int r = i; r <= end; ++r)
                for (int col = t.s - 1; col > end; --col)
                    if (t.A(r, col) != 0.0) {
                        end = col;
                        grown = true;
                        break;
                    }
        }
        p.blocks.emplace_back(i, end);
        i = end + 1;
    }
    const int k = t.k;
    p.needs_history_f = k > 1 && (t.Ahat.cwiseAbs().maxCoeff() > 0 || p.c.out_b.leftCols(k - 1).cwiseAbs().maxCoeff() > 0);
    return p;
}

Vec eval_f(const OdeProblem& p, double t, const Vec& u, SolverStats* st)
{
    if (st) ++st->f_evaluations;
    return p.f(t, u);
}

Mat eval_jac(const OdeProblem& p, double t, const Vec& u, SolverStats* st)
{
    if (st) ++st->jacobian_evaluations;
    if (p.jacobian) return p.jacobian(t, u);
    const int m = static_cast<int>(u.size());
    Mat J(m, m);
    const double h = 1e-7 * (1.0 + u.cwiseAbs().maxCoeff());
    Vec up = u, um = u;
    for (int j = 0; j < m; ++j) {
        up(j) = u(j) + h;
        um(j) = u(j) - h;
        J.col(j) = (eval_f(p, t, up, st) - eval_f(p, t, um, st)) / (2 * h);
        up(j) = um(j) = u(j);
    }
    return J;
}

// Solves Z = R + dt (Ab x I) F(T, Z) for a block of nb coupled stages.
std::vector<Vec> solve_block(const OdeProblem& p, const Mat& Ab, const std::vector<Vec>& R, const std::vector<double>& T,
                             double dt, const SolveConfig& cfg, SolverStats* st)
{
    const int nb = static_cast<int>(R.size());
    const int m = static_cast<int>(R[0].size());
    std::vector<Vec> Z = R;
    if (Ab.cwiseAbs().maxCoeff() == 0.0) return Z;

    auto residual = [&](const std::vector<Vec>& Zc, std::vector<Vec>& Fz) {
        Vec G(nb * m);
        for (int q = 0; q < nb; ++q) Fz[q] = eval_f(p, T[q], Zc[q], st);
        for (int q = 0; q < nb; ++q) {
            Vec g = Zc[q] - R[q];
            for (int r = 0; r < nb; ++r)
                if (Ab(q, r) != 0.0) g -= dt * Ab(q, r) * Fz[r];
            G.segment(q * m, m) = g;
        }
        return G;
    };

    std::vector<Vec> Fz(nb);
    Vec G = residual(Z, Fz);
    double res = G.cwiseAbs().maxCoeff();
    int it = 0;
    bool ok = res <= cfg.newton_tol;
    while (!ok && it < cfg.newton_max_iters && std::isfinite(res)) {
        Mat J = Mat::Identity(nb * m, nb * m);
        for (int r = 0; r < nb; ++r) {
            bool used = false;
            for (int q = 0; q < nb; ++q) used = used || Ab(q, r) != 0.0;
            if (!used) continue;
            const Mat Jf = eval_jac(p, T[r], Z[r], st);
            for (int q = 0; q < nb; ++q)
                if (Ab(q, r) != 0.0) J.block(q * m, r * m, m, m) -= dt * Ab(q, r) * Jf;
        }
        const Vec delta = J.partialPivLu().solve(-G);
        double zmax = 0.0, fmax = 0.0;
        for (int q = 0; q < nb; ++q) {
            Z[q] += delta.segment(q * m, m);
            zmax = std::max(zmax, Z[q].cwiseAbs().maxCoeff());
        }
        ++it;
        G = residual(Z, Fz);
        res = G.cwiseAbs().maxCoeff();
        for (int q = 0; q < nb; ++q) fmax = std::max(fmax, Fz[q].cwiseAbs().maxCoeff());
        const double eps = std::numeric_limits<double>::epsilon();
        const double scale = 1.0 + zmax + dt * Ab.cwiseAbs().maxCoeff() * fmax;
        const bool stalled = delta.cwiseAbs().maxCoeff() <= 8 * eps * (1.0 + zmax);
        // a stalled iterate is accepted at roundoff level of the magnitudes involved
        ok = res <= cfg.newton_tol || (stalled && res <= std::max(1e3 * cfg.newton_tol, 1e3 * eps * scale));
    }
    if (st) {
        st->newton_iterations += it;
        st->max_newton_iterations = std::max(st->max_newton_iterations, it);
    }
    if (ok) return Z;

    if (cfg.fallback) {
        if (st) ++st->fallback_uses;
        Z = R;
        for (int fp = 0; fp < 20 * cfg.newton_max_iters; ++fp) {
            G = residual(Z, Fz);
            res = G.cwiseAbs().maxCoeff();
            if (res <= cfg.newton_tol) return Z;
            if (!std::isfinite(res)) break;
            for (int q = 0; q < nb; ++q) Z[q] -= 0.5 * G.segment(q * m, m);
        }
    }
    std::ostringstream os;
    os << "nonlinear solve failed: residual " << res << " after " << it << " Newton iterations";
    throw StepFailure(os.str(), res, it);
}

struct StepDetail {
    std::vector<Vec> fh;  // F at history values (empty when unused)
    std::vector<Vec> fy;  // F at stage values
};

StepperState glm_step(const Prepared& pr, const StepperState& s, const OdeProblem& p, const SolveConfig& cfg,
                      SolverStats* st, StepDetail* detail)
{
    const GlmTableau& t = pr.t;
    const int k = t.k, ns = t.s;
    const double dt = cfg.dt;
    const Vec ell = pr.c.ell;
    if (static_cast<int>(s.history.size()) != k) throw std::invalid_argument("history length differs from k");
    const int m = static_cast<int>(s.history[0].size());

    std::vector<Vec> fh;
    if (pr.needs_history_f)
        for (int l = 0; l < k - 1; ++l) fh.push_back(eval_f(p, s.t + ell(l) * dt, s.history[l], st));

    std::vector<Vec> Y(ns), FY(ns);
    for (const auto& [b0, b1] : pr.blocks) {
        const int nb = b1 - b0 + 1;
        std::vector<Vec> R(nb);
        std::vector<double> T(nb);
        for (int q = 0; q < nb; ++q) {
            const int i = b0 + q;
            Vec r = Vec::Zero(m);
            for (int l = 0; l < k; ++l)
                if (t.D(i, l) != 0.0) r += t.D(i, l) * s.history[l];
            for (int l = 0; l < k - 1; ++l)
                if (t.Ahat(i, l) != 0.0) r += dt * t.Ahat(i, l) * fh[l];
            for (int j = 0; j < b0; ++j)
                if (t.A(i, j) != 0.0) r += dt * t.A(i, j) * FY[j];
            R[q] = r;
            T[q] = s.t + pr.stage_c(i) * dt;
        }
        const std::vector<Vec> Z = solve_block(p, t.A.block(b0, b0, nb, nb), R, T, dt, cfg, st);
        for (int q = 0; q < nb; ++q) {
            Y[b0 + q] = Z[q];
            FY[b0 + q] = eval_f(p, T[q], Z[q], st);
        }
    }

    auto output = [&](int row) {
        Vec u = Vec::Zero(m);
        for (int l = 0; l < k; ++l)
            if (pr.c.out_theta(row, l) != 0.0) u += pr.c.out_theta(row, l) * s.history[l];
        for (int l = 0; l < k - 1; ++l)
            if (pr.c.out_b(row, l) != 0.0) u += dt * pr.c.out_b(row, l) * fh[l];
        for (int j = 0; j < ns; ++j)
            if (pr.c.out_b(row, k - 1 + j) != 0.0) u += dt * pr.c.out_b(row, k - 1 + j) * FY[j];
        return u;
    };

    StepperState next;
    next.t = s.t + dt;
    next.n = s.n + 1;
    next.history.resize(k);
    for (int row = 0; row < k; ++row)
        next.history[row] = (row == k - 1 || !t.shift_history()) ? output(row) : s.history[row + 1];
    if (detail) {
        detail->fh = std::move(fh);
        detail->fy = std::move(FY);
    }
    return next;
}

// Retained-stage form of the error inhibiting scheme: two implicit Euler
// solves and two linear combinations of stored values per step.
StepperState eis_step(const StepperState& s, const OdeProblem& p, const SolveConfig& cfg, SolverStats* st)
{
    const double dt = cfg.dt;
    const Vec& un = s.history[1];
    const Vec& y1p = s.retained_stages[0];
    const Vec& y2p = s.retained_stages[1];
    const Vec& y3p = s.retained_stages[2];
    const Mat one = Mat::Constant(1, 1, 1.0);

    const Vec y1 = 23.0 / 5 * y2p - 3.0 * un - 9.0 / 5 * y1p + 6.0 / 5 * y3p;
    const Vec y2 = solve_block(p, one, {y1}, {s.t + 2.0 / 3 * dt}, dt, cfg, st)[0];
    const Vec y3 = 5.0 / 12 * un - 1.0 / 12 * y2 - 5.0 / 12 * y3p + 13.0 / 12 * y1;
    const Vec u1 = solve_block(p, one, {y3}, {s.t + dt}, dt, cfg, st)[0];

    StepperState next;
    next.t = s.t + dt;
    next.n = s.n + 1;
    next.history = {y2, u1};
    next.retained_stages = {y1, y2, y3};
    return next;
}

Vec rk4_transport(const OdeProblem& p, double t0, const Vec& u0, double t1, int n)
{
    const double h = (t1 - t0) / n;
    Vec u = u0;
    for (int i = 0; i < n; ++i) {
        const double t = t0 + i * h;
        const Vec k1 = p.f(t, u);
        const Vec k2 = p.f(t + h / 2, u + h / 2 * k1);
        const Vec k3 = p.f(t + h / 2, u + h / 2 * k2);
        const Vec k4 = p.f(t + h, u + h * k3);
        u += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return u;
}

CatalogEntry wrap(const GlmTableau& t)
{
    CatalogEntry e;
    e.name = t.name;
    e.tableau = t;
    return e;
}

}  // namespace

StepperState bootstrap_history(const OdeProblem& p, const CatalogEntry& m, const SolveConfig& cfg)
{
    const int k = m.tableau.k;
    const Vec ell = m.tableau.offsets();
    StepperState s;
    s.t = p.t0;
    s.history.resize(k);
    s.history[k - 1] = p.u0;
    const bool exact = cfg.startup == Startup::Exact && p.exact;
    for (int l = k - 2; l >= 0; --l) {
        const double tl = p.t0 + ell(l) * cfg.dt;
        if (exact)
            s.history[l] = p.exact(tl);
        else
            s.history[l] = rk4_transport(p, p.t0 + ell(l + 1) * cfg.dt, s.history[l + 1], tl,
                                         std::max(1, cfg.bootstrap_substeps));
    }
    if (m.retains_stages && cfg.use_retained_stages) {
        if (k != 2) throw std::invalid_argument("retained-stage execution expects two history values");
        const double dt = cfg.dt;
        const Vec& y2 = s.history[0];
        const Vec y1 = y2 - dt * p.f(p.t0 + ell(0) * dt, y2);
        const Vec y3 = p.u0 - dt * p.f(p.t0, p.u0);
        s.retained_stages = {y1, y2, y3};
    }
    return s;
}

StepperState step(const CatalogEntry& m, const StepperState& s, const OdeProblem& p, const SolveConfig& cfg,
                  SolverStats* stats, std::vector<Vec>* stage_values)
{
    if (m.retains_stages && cfg.use_retained_stages && !s.retained_stages.empty()) return eis_step(s, p, cfg, stats);
    StepDetail d;
    StepperState n = glm_step(prepare(m.tableau), s, p, cfg, stats, &d);
    if (stage_values) *stage_values = d.fy;
    return n;
}

StepperState step(const GlmTableau& m, const StepperState& s, const OdeProblem& p, const SolveConfig& cfg,
                  SolverStats* stats)
{
    return glm_step(prepare(m), s, p, cfg, stats, nullptr);
}

SolutionRecord integrate(const OdeProblem& p, const CatalogEntry& m, const SolveConfig& cfg)
{
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("dt must be positive");
    const double span = p.tf - p.t0;
    const long nsteps = std::lround(span / cfg.dt);
    if (nsteps < 1 || std::abs(nsteps * cfg.dt - span) > 1e-9 * std::max(1.0, std::abs(span)))
        throw std::invalid_argument("dt does not divide the time span into whole steps");

    SolutionRecord rec;
    rec.method = m.name;
    StepperState s = bootstrap_history(p, m, cfg);
    rec.initial_history = s.history;
    rec.times.push_back(p.t0);
    rec.states.push_back(p.u0);

    const bool retained = m.retains_stages && cfg.use_retained_stages;
    const Prepared pr = prepare(m.tableau);
    std::vector<Prepared> siblings;
    if (!m.family.empty() && !retained) {
        for (const CatalogEntry& e : family_members(m.family)) {
            const GlmTableau& t = e.tableau;
            if (t.k != m.tableau.k || t.s != m.tableau.s || t.A != m.tableau.A || t.D != m.tableau.D ||
                t.Ahat != m.tableau.Ahat)
                throw std::logic_error("family member " + e.name + " does not share the stages of " + m.name);
            siblings.push_back(prepare(t));
            rec.alternates[e.name] = {p.u0};
            rec.alternate_orders[e.name] = e.declared_order;
        }
    }

    for (long n = 0; n < nsteps; ++n) {
        try {
            StepperState next;
            if (retained) {
                next = eis_step(s, p, cfg, &rec.stats);
            } else {
                StepDetail d;
                next = glm_step(pr, s, p, cfg, &rec.stats, &d);
                for (const Prepared& sp : siblings) {
                    const int k = sp.t.k;
                    Vec u = Vec::Zero(p.u0.size());
                    for (int l = 0; l < k; ++l) u += sp.t.theta(l) * s.history[l];
                    for (int l = 0; l < k - 1; ++l)
                        if (sp.t.bhat(l) != 0.0) u += cfg.dt * sp.t.bhat(l) * d.fh[l];
                    for (int j = 0; j < sp.t.s; ++j) u += cfg.dt * sp.t.b(j) * d.fy[j];
                    rec.alternates[sp.t.name].push_back(u);
                }
            }
            s = next;
            s.t = p.t0 + (n + 1) * cfg.dt;
            rec.times.push_back(s.t);
            rec.states.push_back(s.history.back());
        } catch (const StepFailure& e) {
            rec.failed = true;
            rec.failure = "step " + std::to_string(n + 1) + ": " + e.what();
            break;
        }
    }
    return rec;
}

SolutionRecord integrate(const OdeProblem& p, const GlmTableau& m, const SolveConfig& cfg)
{
    return integrate(p, wrap(m), cfg);
}

std::vector<double> embedded_error_estimate(const SolutionRecord& r, const std::string& high, const std::string& low)
{
    auto hi = r.alternates.find(high), lo = r.alternates.find(low);
    if (hi == r.alternates.end() || lo == r.alternates.end())
        throw std::invalid_argument("record lacks alternates " + high + " / " + low);
    std::vector<double> est;
    for (size_t n = 1; n < hi->second.size() && n < lo->second.size(); ++n)
        est.push_back((hi->second[n] - lo->second[n]).cwiseAbs().maxCoeff());
    return est;
}

std::vector<double> embedded_error_estimate(const SolutionRecord& r)
{
    if (r.alternates.size() < 2) throw std::invalid_argument("record carries fewer than two embedded orders");
    auto cmp = [&](const auto& a, const auto& b) {
        return r.alternate_orders.at(a.first) < r.alternate_orders.at(b.first);
    };
    const auto lo = std::min_element(r.alternates.begin(), r.alternates.end(), cmp);
    const auto hi = std::max_element(r.alternates.begin(), r.alternates.end(), cmp);
    return embedded_error_estimate(r, hi->first, lo->first);
}

Mat energy_matrix(double d)
{
    Mat G(2, 2);
    const double off = -(2 * d - 3) * (d - 1);
    G << 2 * d * d - 7 * d + 6, off, off, 2 * d * d - 3 * d + 2;
    return G / 4.0;
}

EnergyResult energy_check(const SolutionRecord& r, double d)
{
    if (r.method.rfind("IE-Filt(", 0) != 0) throw std::invalid_argument("energy check applies to IE-Filt(d) only");
    if (r.initial_history.size() != 2) throw std::invalid_argument("record lacks the two-step history");
    const Mat G = energy_matrix(d);
    EnergyResult out;
    auto gnorm = [&](const Vec& a, const Vec& b) {
        double e = 0.0;
        for (int c = 0; c < a.size(); ++c) {
            Eigen::Vector2d x(a(c), b(c));
            e += x.dot(G * x);
        }
        return e;
    };
    Vec prev = r.initial_history[0];
    for (const Vec& u : r.states) {
        out.trace.push_back(gnorm(u, prev));
        prev = u;
    }
    out.monotone = true;
    for (size_t n = 1; n < out.trace.size(); ++n)
        if (out.trace[n] > out.trace[n - 1] + 1e-12 * (1.0 + out.trace[n - 1])) out.monotone = false;
    return out;
}

EnergyResult energy_check(const SolutionRecord& r, const CatalogEntry& m)
{
    if (m.name.rfind("IE-Filt(", 0) != 0) throw std::invalid_argument("energy check applies to IE-Filt(d) only");
    return energy_check(r, m.tableau.D(0, 0));
}

double relative_error(const OdeProblem& p, const SolutionRecord& r)
{
    if (!p.exact) throw std::invalid_argument("problem has no exact solution");
    const Vec ex = p.exact(r.times.back());
    return (r.states.back() - ex).cwiseAbs().maxCoeff() / std::max(ex.cwiseAbs().maxCoeff(), 1e-300);
}

std::vector<double> halving(double dt0, int levels)
{
    std::vector<double> v;
    for (int i = 0; i < levels; ++i) v.push_back(dt0 / std::pow(2.0, i));
    return v;
}

double median_slope(const std::vector<double>& dts, const std::vector<double>& values)
{
    std::vector<double> s;
    for (size_t i = 0; i + 1 < dts.size() && i + 1 < values.size(); ++i)
        s.push_back(std::log(values[i] / values[i + 1]) / std::log(dts[i] / dts[i + 1]));
    if (s.empty()) return std::nan("");
    std::sort(s.begin(), s.end());
    const size_t h = s.size() / 2;
    return s.size() % 2 ? s[h] : 0.5 * (s[h - 1] + s[h]);
}

ConvergenceTable observed_order(const OdeProblem& p, const CatalogEntry& m, const std::vector<double>& dts,
                                SolveConfig cfg)
{
    if (!p.exact) throw std::invalid_argument("convergence study needs an exact solution");
    ConvergenceTable tab;
    tab.levels.resize(dts.size());
    parallel_for(static_cast<int>(dts.size()), [&](int i) {
        SolveConfig c = cfg;
        c.dt = dts[i];
        ConvergenceLevel& lv = tab.levels[i];
        lv.dt = dts[i];
        const SolutionRecord r = integrate(p, m, c);
        if (r.failed)
            lv.failure = r.failure;
        else
            lv.error = relative_error(p, r);
    });
    std::vector<double> ratios;
    for (size_t i = 1; i < tab.levels.size(); ++i) {
        const auto& a = tab.levels[i - 1];
        auto& b = tab.levels[i];
        if (a.error && b.error && *a.error > 0 && *b.error > 0) {
            b.order_estimate = std::log(*a.error / *b.error) / std::log(a.dt / b.dt);
            ratios.push_back(*b.order_estimate);
        }
    }
    std::sort(ratios.begin(), ratios.end());
    if (ratios.empty())
        tab.slope = std::nan("");
    else {
        const size_t h = ratios.size() / 2;
        tab.slope = ratios.size() % 2 ? ratios[h] : 0.5 * (ratios[h - 1] + ratios[h]);
    }
    return tab;
}

}  // namespace glmlab
