#include "glmlab/optimizer.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "glmlab/catalog.hpp"

namespace glmlab {

InfeasibleError::InfeasibleError(const std::string& msg, OrderResidualReport b)
    : std::runtime_error(msg), best(std::move(b))
{
}

bool roots_inside(const CVec& coeffs, double R)
{
    int n = static_cast<int>(coeffs.size()) - 1;
    CVec a(n + 1);
    double scale = 1.0;
    for (int j = 0; j <= n; ++j) {
        a(j) = coeffs(j) * scale;
        scale *= R;
    }
    while (n > 0 && a(n) == cplx(0.0)) --n;
    // Schur-Cohn reduction
    while (n > 0) {
        if (!(std::abs(a(0)) < std::abs(a(n)))) return false;
        CVec next(n);
        const cplx an = std::conj(a(n)), a0 = a(0);
        for (int i = 1; i <= n; ++i) next(i - 1) = an * a(i) - a0 * std::conj(a(n - i));
        a = next;
        --n;
        const double m = a.cwiseAbs().maxCoeff();
        if (m == 0.0) return false;
        a /= m;
    }
    return true;
}

namespace {

using Clock = std::chrono::steady_clock;

std::vector<double> logspace(double a, double b, int n)
{
    std::vector<double> v;
    if (n <= 1) return {b};
    const double la = std::log(a), lb = std::log(b);
    for (int i = 0; i < n; ++i) v.push_back(std::exp(la + (lb - la) * i / (n - 1)));
    return v;
}

std::vector<bool> mask_or(const json& j, int n, bool dflt, const char* what)
{
    if (j.is_null()) return std::vector<bool>(n, dflt);
    if (j.is_boolean()) return std::vector<bool>(n, j.get<bool>());
    if (!j.is_array() || static_cast<int>(j.size()) != n)
        throw std::invalid_argument(std::string("free.") + what + ": expected bool or " + std::to_string(n) +
                                    " bools");
    std::vector<bool> m;
    for (const auto& v : j) m.push_back(v.get<bool>());
    return m;
}

bool is_shift(const CompactGlm& c)
{
    for (int i = 0; i + 1 < c.k; ++i) {
        for (int l = 0; l < c.k; ++l)
            if (c.out_theta(i, l) != (l == i + 1 ? 1.0 : 0.0)) return false;
        if (c.out_b.row(i).cwiseAbs().maxCoeff() != 0.0) return false;
    }
    return true;
}

// Spectral radius evaluator. For shift-history methods the evolution
// matrix is a companion matrix, so only its last row is formed and root
// location is decided by a Schur-Cohn test.
class RhoEval {
public:
    explicit RhoEval(const CompactGlm& c) : c_(c), shift_(is_shift(c))
    {
        const int N = c.n();
        At_ = c.Atilde.cast<cplx>();
        Dt_ = c.Dtilde.cast<cplx>();
        th_ = c.out_theta.row(c.k - 1).transpose().cast<cplx>();
        b_ = c.out_b.row(c.k - 1).transpose().cast<cplx>();
        I_ = CMat::Identity(N, N);
    }

    // Characteristic polynomial, increasing powers; false at a pole.
    bool poly(cplx z, CVec& p) const
    {
        const int k = c_.k;
        const CMat S = I_ - z * At_;
        Eigen::PartialPivLU<CMat> lu(S.transpose());
        const auto& U = lu.matrixLU();
        double scale = 1.0;
        for (int i = 0; i < S.rows(); ++i) scale = std::max(scale, S.row(i).cwiseAbs().sum());
        for (int i = 0; i < U.rows(); ++i)
            if (std::abs(U(i, i)) <= 1e-13 * scale) return false;
        const CVec v = lu.solve(z * b_);
        const CVec phi = th_ + Dt_.transpose() * v;
        p.resize(k + 1);
        for (int j = 0; j < k; ++j) p(j) = -phi(j);
        p(k) = 1.0;
        return true;
    }

    // returns +inf at a pole
    double rho(cplx z) const
    {
        if (!shift_) return rho_at(c_, z);
        CVec p;
        if (!poly(z, p)) return std::numeric_limits<double>::infinity();
        return companion_radius(p);
    }

    // exact test rho(z) < R, falling back to the radius when needed
    double excess(cplx z, double R) const
    {
        if (!shift_) {
            const double r = rho_at(c_, z);
            return r > R ? r - R : 0.0;
        }
        CVec p;
        if (!poly(z, p)) return 1.0;
        if (roots_inside(p, R)) return 0.0;
        const double r = companion_radius(p);
        return r > R ? r - R : 0.0;
    }

private:
    static double companion_radius(const CVec& p)
    {
        const int k = static_cast<int>(p.size()) - 1;
        if (k == 1) return std::abs(p(0));
        CMat C = CMat::Zero(k, k);
        for (int i = 0; i + 1 < k; ++i) C(i, i + 1) = 1.0;
        for (int j = 0; j < k; ++j) C(k - 1, j) = -p(j);
        Eigen::ComplexEigenSolver<CMat> es(C, false);
        return es.eigenvalues().cwiseAbs().maxCoeff();
    }

    const CompactGlm& c_;
    bool shift_;
    CMat At_, Dt_, I_;
    CVec th_, b_;
};

std::vector<cplx> objective_samples(Objective obj, double r, const OptimizerConfig& cfg)
{
    if (obj == Objective::AAlpha) return wedge_samples(r, cfg.rays, cfg.moduli, cfg.zmin, cfg.zmax);
    std::vector<cplx> z;
    if (r <= 0) return z;
    const double lo = std::min(cfg.zmin, r * 1e-3);
    for (double m : logspace(lo, r, 3 * cfg.moduli))
        z.push_back(obj == Objective::ImagAxis ? cplx(0.0, m) : cplx(-m, 0.0));
    return z;
}

// Nelder-Mead with dimension-adaptive coefficients; stops early once the
// target value is reached.
struct NmResult {
    Vec x;
    double f;
    int iterations = 0;
    int evaluations = 0;
};

NmResult nelder_mead(const std::function<double(const Vec&)>& f, const Vec& x0, double step, int max_evals,
                     double target)
{
    const int n = static_cast<int>(x0.size());
    const double dn = n;
    const double rho = 1.0, chi = 1.0 + 2.0 / dn, psi = 0.75 - 1.0 / (2.0 * dn), sigma = 1.0 - 1.0 / dn;
    std::vector<Vec> sim(n + 1, x0);
    std::vector<double> fv(n + 1);
    NmResult res;
    for (int i = 0; i < n; ++i) sim[i + 1](i) += step;
    for (int i = 0; i <= n; ++i) {
        fv[i] = f(sim[i]);
        ++res.evaluations;
        if (fv[i] <= target) return {sim[i], fv[i], 0, res.evaluations};
    }
    std::vector<int> idx(n + 1);
    while (res.evaluations < max_evals) {
        for (int i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] < fv[b]; });
        std::vector<Vec> s2;
        std::vector<double> f2;
        for (int i : idx) {
            s2.push_back(sim[i]);
            f2.push_back(fv[i]);
        }
        sim = s2;
        fv = f2;
        if (fv[0] <= target) break;
        double size = 0.0;
        for (int i = 1; i <= n; ++i) size = std::max(size, (sim[i] - sim[0]).cwiseAbs().maxCoeff());
        if (size < 1e-10 && fv[n] - fv[0] < 1e-16) break;
        ++res.iterations;

        Vec xbar = Vec::Zero(n);
        for (int i = 0; i < n; ++i) xbar += sim[i];
        xbar /= dn;
        const Vec xr = xbar + rho * (xbar - sim[n]);
        const double fr = f(xr);
        ++res.evaluations;
        bool shrink = false;
        if (fr < fv[0]) {
            const Vec xe = xbar + rho * chi * (xbar - sim[n]);
            const double fe = f(xe);
            ++res.evaluations;
            if (fe < fr) {
                sim[n] = xe;
                fv[n] = fe;
            } else {
                sim[n] = xr;
                fv[n] = fr;
            }
        } else if (fr < fv[n - 1]) {
            sim[n] = xr;
            fv[n] = fr;
        } else if (fr < fv[n]) {
            const Vec xc = xbar + psi * rho * (xbar - sim[n]);
            const double fc = f(xc);
            ++res.evaluations;
            if (fc <= fr) {
                sim[n] = xc;
                fv[n] = fc;
            } else {
                shrink = true;
            }
        } else {
            const Vec xcc = xbar - psi * (xbar - sim[n]);
            const double fcc = f(xcc);
            ++res.evaluations;
            if (fcc < fv[n]) {
                sim[n] = xcc;
                fv[n] = fcc;
            } else {
                shrink = true;
            }
        }
        if (shrink) {
            for (int i = 1; i <= n; ++i) {
                sim[i] = sim[0] + sigma * (sim[i] - sim[0]);
                fv[i] = f(sim[i]);
                ++res.evaluations;
            }
        }
    }
    int best = static_cast<int>(std::min_element(fv.begin(), fv.end()) - fv.begin());
    res.x = sim[best];
    res.f = fv[best];
    return res;
}

class Search {
public:
    Search(const OptimizationProblem& p, const OptimizerConfig& cfg) : p_(p), cfg_(cfg)
    {
        auto add = [&](const std::vector<bool>& m, const Vec& v, int block) {
            for (int i = 0; i < static_cast<int>(v.size()); ++i)
                if (m[i]) slots_.push_back({block, i});
        };
        add(p.free.d1, p.d1, 0);
        add(p.free.theta, p.theta, 1);
        add(p.free.bhat, p.bhat, 2);
        add(p.free.b, p.b, 3);
        x0_ = Vec(static_cast<int>(slots_.size()));
        for (int i = 0; i < x0_.size(); ++i) x0_(i) = block(p_, slots_[i].first)(slots_[i].second);
    }

    int nfree() const { return static_cast<int>(x0_.size()); }
    const Vec& x0() const { return x0_; }

    GlmTableau tableau(const Vec& x) const
    {
        Vec v[4] = {p_.d1, p_.theta, p_.bhat, p_.b};
        for (int i = 0; i < x.size(); ++i) v[slots_[i].first](slots_[i].second) = x(i);
        return build_filtered(p_, v[0], v[1], v[2], v[3]);
    }

    void unpack(const Vec& x, OptimizationResult& r) const
    {
        Vec v[4] = {p_.d1, p_.theta, p_.bhat, p_.b};
        for (int i = 0; i < x.size(); ++i) v[slots_[i].first](slots_[i].second) = x(i);
        r.d1 = v[0];
        r.theta = v[1];
        r.bhat = v[2];
        r.b = v[3];
    }

    Vec constraints(const Vec& x) const
    {
        const CompactGlm c = to_compact(tableau(x));
        const OrderResidualReport rep = tau_residuals(c);
        std::vector<double> out;
        Vec v[4] = {p_.d1, p_.theta, p_.bhat, p_.b};
        for (int i = 0; i < x.size(); ++i) v[slots_[i].first](slots_[i].second) = x(i);
        out.push_back(v[0].sum() - 1.0);
        for (size_t i = 0; i < rep.residuals.size(); ++i) {
            if (kTauOrder[i] > p_.target_order || i == 1) continue;
            out.push_back(rep.residuals[i].second);
        }
        return Eigen::Map<Vec>(out.data(), static_cast<int>(out.size()));
    }

    Mat jacobian(const Vec& x) const
    {
        const Vec c0 = constraints(x);
        Mat J(c0.size(), x.size());
        for (int i = 0; i < x.size(); ++i) {
            Vec xp = x, xm = x;
            const double h = 1e-6 * std::max(1.0, std::abs(x(i)));
            xp(i) += h;
            xm(i) -= h;
            J.col(i) = (constraints(xp) - constraints(xm)) / (2 * h);
        }
        return J;
    }

    // Minimum-norm Gauss-Newton projection onto the order conditions.
    bool project(Vec& x, int max_iters = 50) const
    {
        for (int it = 0; it < max_iters; ++it) {
            const Vec c = constraints(x);
            if (c.cwiseAbs().maxCoeff() <= 1e-13) return true;
            if (x.size() == 0) return false;
            const Mat J = jacobian(x);
            Eigen::CompleteOrthogonalDecomposition<Mat> cod(J);
            cod.setThreshold(1e-10);
            x -= cod.solve(c);
        }
        return constraints(x).cwiseAbs().maxCoeff() <= 1e-11;
    }

    // Local chart of the constraint manifold at base: tangent basis T and
    // normal basis Nrm from the SVD of the constraint Jacobian.
    void set_chart(const Vec& base)
    {
        base_ = base;
        const Mat J = jacobian(base);
        Eigen::JacobiSVD<Mat> svd(J, Eigen::ComputeFullV);
        const Vec& sv = svd.singularValues();
        const double smax = sv.size() ? sv(0) : 0.0;
        int rank = 0;
        for (int i = 0; i < sv.size(); ++i)
            if (sv(i) > 1e-9 * std::max(1.0, smax)) ++rank;
        const Mat& V = svd.matrixV();
        N_ = V.leftCols(rank);
        T_ = V.rightCols(V.cols() - rank);
    }

    int chart_dim() const { return static_cast<int>(T_.cols()); }

    bool chart(const Vec& y, Vec& x) const
    {
        Vec w = Vec::Zero(N_.cols());
        const Vec xt = base_ + T_ * y;
        x = xt;
        for (int it = 0; it < 30; ++it) {
            x = xt + N_ * w;
            if (x.cwiseAbs().maxCoeff() > p_.bound) return false;
            const Vec c = constraints(x);
            if (c.cwiseAbs().maxCoeff() <= 1e-13) return true;
            if (N_.cols() == 0) return false;
            Mat JN(c.size(), N_.cols());
            for (int j = 0; j < N_.cols(); ++j) {
                const double h = 1e-7;
                JN.col(j) = (constraints(x + h * N_.col(j)) - constraints(x - h * N_.col(j))) / (2 * h);
            }
            Eigen::CompleteOrthogonalDecomposition<Mat> cod(JN);
            w -= cod.solve(c);
        }
        return constraints(x).cwiseAbs().maxCoeff() <= 1e-11;
    }

    double penalty(const Vec& x, double r)
    {
        ++evaluations;
        const CompactGlm c = to_compact(tableau(x));
        double pen = 0.0;
        const Vec cons = constraints(x);
        pen += cfg_.penalty_weight * cons.squaredNorm();
        const RhoEval ev(c);
        const double R = 1.0 - cfg_.margin;
        for (const cplx& z : objective_samples(p_.objective, r, cfg_)) {
            const double e = ev.excess(z, R);
            pen += e * e;
        }
        return pen;
    }

    long evaluations = 0;
    int iterations = 0;

private:
    static const Vec& block(const OptimizationProblem& p, int b)
    {
        switch (b) {
        case 0: return p.d1;
        case 1: return p.theta;
        case 2: return p.bhat;
        default: return p.b;
        }
    }

    const OptimizationProblem& p_;
    const OptimizerConfig& cfg_;
    std::vector<std::pair<int, int>> slots_;
    Vec x0_, base_;
    Mat T_, N_;
};

}  // namespace

GlmTableau build_filtered(const OptimizationProblem& p, const Vec& d1, const Vec& theta, const Vec& bhat, const Vec& b)
{
    GlmTableau t = apply_filters(p.core, PreFilter::row(d1), PostFilter::coefficients(theta, bhat, b));
    t = prune_dead_stages(t);
    t.name = "optimized";
    return t;
}

OptimizationProblem OptimizationProblem::standard(const GlmTableau& core, int k, int target_order)
{
    OptimizationProblem p;
    p.core = make_core(core);
    p.k = std::max(k, core.k);
    const GlmTableau lifted = lift(core, p.k);
    p.d1 = Vec::Zero(p.k);
    p.d1(p.k - 1) = 1.0;
    p.theta = lifted.theta;
    p.bhat = lifted.bhat;
    p.b = lifted.b;
    p.free.d1.assign(p.k, true);
    p.free.theta.assign(p.k, true);
    p.free.bhat.assign(p.k - 1, false);
    for (int i = 0; i < p.b.size(); ++i) p.free.b.push_back(p.b(i) != 0.0);
    p.target_order = target_order;
    return p;
}

int OptimizationProblem::free_count() const
{
    int n = 0;
    for (const auto* m : {&free.d1, &free.theta, &free.bhat, &free.b})
        for (bool v : *m) n += v;
    return n;
}

OptimizationResult optimize_filters(const OptimizationProblem& problem, const OptimizerConfig& cfg)
{
    const auto start = Clock::now();
    const auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };
    const int k = problem.k, s = problem.core.tableau.s;
    if (problem.d1.size() != k || problem.theta.size() != k || problem.bhat.size() != k - 1 || problem.b.size() != s)
        throw StructuralError("optimization problem: initial values do not match k=" + std::to_string(k) +
                              ", s=" + std::to_string(s));
    if (static_cast<int>(problem.free.d1.size()) != k || static_cast<int>(problem.free.theta.size()) != k ||
        static_cast<int>(problem.free.bhat.size()) != k - 1 || static_cast<int>(problem.free.b.size()) != s)
        throw StructuralError("optimization problem: free mask does not match the coefficient blocks");

    Search S(problem, cfg);
    OptimizationResult res;
    res.seed = cfg.seed;

    Vec x = S.x0();
    if (!S.project(x)) {
        const GlmTableau t = S.tableau(x);
        throw InfeasibleError("order conditions through order " + std::to_string(problem.target_order) +
                                  " cannot be met with the free coefficients",
                              order_report(to_compact(t), 1e-8));
    }

    auto finish = [&](const Vec& xf, double r) {
        res.tableau = S.tableau(xf);
        S.unpack(xf, res);
        res.achieved_r = r;
        res.achieved_alpha_deg = problem.objective == Objective::AAlpha ? alpha_from_r(r) : 0.0;
        res.order_report = order_report(to_compact(res.tableau), 1e-8);
        res.iterations = S.iterations;
        res.evaluations = S.evaluations;
        res.seconds = elapsed();
    };

    // Nothing to optimize: report the method's own stability.
    if (S.nfree() == 0 || (S.set_chart(x), S.chart_dim() == 0)) {
        finish(x, 0.0);
        const CompactGlm c = to_compact(res.tableau);
        if (problem.objective == Objective::AAlpha) {
            const StabilityReport rep = a_alpha_angle(c);
            res.achieved_alpha_deg = rep.alpha_deg;
            res.achieved_r = rep.alpha_deg >= 90.0 ? cfg.r_max : r_from_alpha(rep.alpha_deg);
        } else {
            res.achieved_r = axis_stability_radius(
                c, problem.objective == Objective::ImagAxis ? Axis::Imaginary : Axis::NegativeReal, cfg.axis_max);
        }
        res.feasible = res.order_report.order >= problem.target_order;
        res.note = "no free directions; stability of the fixed method";
        return res;
    }

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double target = cfg.feasible_penalty;

    // Feasibility search at radius r starting from the last feasible point.
    auto attempt = [&](double r, const Vec& from, Vec& found) {
        S.set_chart(from);
        const int m = S.chart_dim();
        auto f = [&](const Vec& y) {
            Vec xx;
            if (!S.chart(y, xx)) return 1e3 + y.squaredNorm();
            return S.penalty(xx, r);
        };
        for (int start_i = 0; start_i < std::max(1, cfg.multistarts); ++start_i) {
            Vec y0 = Vec::Zero(m);
            if (start_i > 0) {
                const double sig = 0.05 * (1.0 + 0.25 * start_i);
                for (int i = 0; i < m; ++i) y0(i) = sig * normal(rng);
            }
            const NmResult nm = nelder_mead(f, y0, 0.05, start_i == 0 ? cfg.max_evals : cfg.restart_evals, target);
            S.iterations += nm.iterations;
            if (nm.f <= target) {
                Vec xx;
                S.chart(nm.x, xx);
                found = xx;
                return true;
            }
            if (elapsed() > cfg.time_budget_s || S.iterations > cfg.max_iterations) break;
        }
        return false;
    };

    const double rmax = problem.objective == Objective::AAlpha ? cfg.r_max : cfg.axis_max;
    Vec best = x;
    double lo = 0.0;
    if (!attempt(0.0, x, best)) {
        finish(x, 0.0);
        res.feasible = false;
        res.note = "no stable point found on the negative real axis";
        return res;
    }
    double hi = -1.0;
    bool budget_hit = false;
    while (true) {
        if (hi > 0 && hi - lo < cfg.r_tol) break;
        if (hi < 0 && lo >= rmax) break;
        if (elapsed() > cfg.time_budget_s || S.iterations > cfg.max_iterations) {
            budget_hit = true;
            break;
        }
        const double r = hi < 0 ? std::min(lo == 0.0 ? 1.0 : lo * 1.5, rmax) : 0.5 * (lo + hi);
        Vec found;
        if (attempt(r, best, found)) {
            lo = r;
            best = found;
        } else {
            hi = r;
        }
    }

    finish(best, lo);
    res.feasible = res.order_report.order >= problem.target_order && !budget_hit;
    if (budget_hit) {
        res.note = "iteration or time cap exceeded; radius is the last feasible value";
        res.seconds = elapsed();
        return res;
    }

    // Independent re-check; back off the radius until it passes.
    if (res.feasible) {
        Verification v = verify_result(res, problem.target_order, problem.objective);
        if (!v.feasible) {
            double a = 0.0, b = res.achieved_r;
            OptimizationResult probe = res;
            while (b - a > cfg.r_tol) {
                probe.achieved_r = 0.5 * (a + b);
                (verify_result(probe, problem.target_order, problem.objective).feasible ? a : b) = probe.achieved_r;
            }
            probe.achieved_r = a;
            v = verify_result(probe, problem.target_order, problem.objective);
            res.achieved_r = a;
            res.achieved_alpha_deg = problem.objective == Objective::AAlpha ? alpha_from_r(a) : 0.0;
            res.feasible = v.feasible;
            res.note += (res.note.empty() ? "" : "; ") + std::string("radius reduced by the dense re-check");
        }
    }
    res.seconds = elapsed();
    return res;
}

Verification verify_result(const OptimizationResult& result, int target_order, Objective objective,
                           const VerificationConfig& strict, const ScanConfig& scan)
{
    Verification v;
    const CompactGlm c = to_compact(result.tableau);
    v.order = order_report(c, strict.order_tol);
    const RhoEval ev(c);
    std::vector<cplx> zs;
    if (objective == Objective::AAlpha) {
        zs = wedge_samples(result.achieved_r, strict.density * scan.rays, strict.density * scan.moduli, scan.zmin,
                           strict.zmax);
    } else {
        for (double m : logspace(std::min(scan.zmin, result.achieved_r * 1e-3), std::max(result.achieved_r, 1e-12),
                                 strict.density * scan.moduli))
            zs.push_back(objective == Objective::ImagAxis ? cplx(0.0, m) : cplx(-m, 0.0));
    }
    std::vector<double> worst(zs.size(), 0.0);
    parallel_for(static_cast<int>(zs.size()), [&](int i) {
        const double e = ev.excess(zs[i], 1.0 + strict.violation);
        worst[i] = e > 0 ? 1.0 + strict.violation + e : 0.0;
    });
    v.worst_rho = zs.empty() ? 0.0 : *std::max_element(worst.begin(), worst.end());
    v.feasible = v.order.order >= target_order && v.worst_rho == 0.0;
    if (objective == Objective::AAlpha) v.stability = a_alpha_angle(c, scan);
    return v;
}

Objective objective_from_string(const std::string& s)
{
    if (s == "a_alpha" || s == "A_alpha" || s == "alpha") return Objective::AAlpha;
    if (s == "imag_axis" || s == "imaginary_axis") return Objective::ImagAxis;
    if (s == "neg_real_axis" || s == "negative_real_axis") return Objective::NegRealAxis;
    throw std::invalid_argument("unknown objective " + s);
}

GlmTableau core_from_name(const std::string& name)
{
    if (name == "IE") return core_implicit_euler();
    if (name == "MP") return core_midpoint();
    if (name == "BDF2") return core_bdf2();
    if (name == "RK22" || name == "Lobatto-IIIC") return core_lobatto_iiic();
    throw std::invalid_argument("no core form for " + name + " (expected IE, MP, BDF2 or RK22)");
}

OptimizationProblem problem_from_json(const json& j)
{
    if (!j.contains("core")) throw std::invalid_argument("problem: missing field core");
    const GlmTableau core = j["core"].is_string() ? core_from_name(j["core"].get<std::string>())
                                                  : tableau_from_json(j["core"]);
    const int k = j.value("k", core.k);
    const int order = j.value("order", 1);
    OptimizationProblem p = OptimizationProblem::standard(core, k, order);
    if (j.contains("objective")) p.objective = objective_from_string(j["objective"].get<std::string>());
    p.bound = j.value("bound", 10.0);
    const int s = p.core.tableau.s;
    if (j.contains("initial")) {
        const json& in = j["initial"];
        if (in.contains("d1")) p.d1 = vector_from_json(in["d1"], p.k, "initial.d1");
        if (in.contains("theta")) p.theta = vector_from_json(in["theta"], p.k, "initial.theta");
        if (in.contains("bhat")) p.bhat = vector_from_json(in["bhat"], p.k - 1, "initial.bhat");
        if (in.contains("b")) p.b = vector_from_json(in["b"], s, "initial.b");
    }
    if (j.contains("free")) {
        const json& f = j["free"];
        const json nul;
        if (!f.is_object()) throw std::invalid_argument("problem: free must be an object");
        p.free.d1 = mask_or(f.contains("d1") ? f["d1"] : nul, p.k, false, "d1");
        p.free.theta = mask_or(f.contains("theta") ? f["theta"] : nul, p.k, false, "theta");
        p.free.bhat = mask_or(f.contains("bhat") ? f["bhat"] : nul, p.k - 1, false, "bhat");
        p.free.b = mask_or(f.contains("b") ? f["b"] : nul, s, false, "b");
    }
    return p;
}

json to_json(const OptimizationResult& r)
{
    json j;
    j["tableau"] = to_json(r.tableau);
    j["d1"] = vector_json(r.d1);
    j["theta"] = vector_json(r.theta);
    j["bhat"] = vector_json(r.bhat);
    j["b"] = vector_json(r.b);
    j["achieved_r"] = r.achieved_r;
    j["achieved_alpha_deg"] = r.achieved_alpha_deg;
    j["order"] = to_json(r.order_report);
    j["feasible"] = r.feasible;
    j["iterations"] = r.iterations;
    j["evaluations"] = r.evaluations;
    j["seed"] = r.seed;
    j["seconds"] = r.seconds;
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

}  // namespace glmlab
