#include "glmlab/stability.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

namespace glmlab {

namespace {

std::string zstr(cplx z)
{
    std::ostringstream os;
    os.precision(17);
    os << "pole of I - zA at z = " << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
    return os.str();
}

std::vector<double> logspace(double a, double b, int n)
{
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = b;
        return v;
    }
    const double la = std::log10(a), lb = std::log10(b);
    for (int i = 0; i < n; ++i) v[i] = std::pow(10.0, la + (lb - la) * i / (n - 1));
    return v;
}

}  // namespace

PoleError::PoleError(cplx zz) : std::runtime_error(zstr(zz)), z(zz) {}

double alpha_from_r(double r)
{
    if (std::isinf(r)) return 90.0;
    return 180.0 * r * r / (2.0 * r * r + 1.0);
}

double r_from_alpha(double a)
{
    if (a >= 90.0) return std::numeric_limits<double>::infinity();
    if (a <= 0.0) return 0.0;
    return std::sqrt(a / (180.0 - 2.0 * a));
}

double wedge_angle(double mu)
{
    return M_PI * (mu * mu + 1.0) / (2.0 * mu * mu + 1.0);
}

CMat evolution_matrix(const CompactGlm& c, cplx z)
{
    const int n = c.n();
    CMat S = CMat::Identity(n, n) - z * c.Atilde.cast<cplx>();
    Eigen::PartialPivLU<CMat> lu(S);
    // PartialPivLU does not report singularity; test the pivots directly.
    const CMat& LU = lu.matrixLU();
    double scale = 1.0 + std::abs(z) * c.Atilde.cwiseAbs().maxCoeff();
    for (int i = 0; i < n; ++i)
        if (std::abs(LU(i, i)) <= 1e-13 * scale) throw PoleError(z);
    CMat W = lu.solve(c.Dtilde.cast<cplx>());
    return c.out_theta.cast<cplx>() + z * (c.out_b.cast<cplx>() * W);
}

CVec eigenvalues(const CMat& m)
{
    if (m.rows() == 1) return m.col(0);
    Eigen::ComplexEigenSolver<CMat> es(m, false);
    if (es.info() != Eigen::Success) throw NumericalError("eigenvalue iteration did not converge");
    return es.eigenvalues();
}

double spectral_radius(const CMat& m)
{
    return eigenvalues(m).cwiseAbs().maxCoeff();
}

double rho_at(const CompactGlm& c, cplx z)
{
    try {
        return spectral_radius(evolution_matrix(c, z));
    } catch (const PoleError&) {
        return std::numeric_limits<double>::infinity();
    }
}

bool satisfies_root_condition(const CompactGlm& c, cplx z, double tol)
{
    const CVec ev = eigenvalues(evolution_matrix(c, z));
    for (int i = 0; i < ev.size(); ++i) {
        const double a = std::abs(ev(i));
        if (!(a <= 1.0 + tol)) return false;
        if (a > 1.0 - tol) {
            for (int j = 0; j < ev.size(); ++j)
                if (j != i && std::abs(ev(i) - ev(j)) <= tol) return false;
        }
    }
    return true;
}

std::vector<cplx> wedge_samples(double r, int rays, int moduli, double zmin, double zmax)
{
    std::vector<double> mus{0.0};
    if (r > 0)
        for (double m : logspace(r * 1e-3, r, rays)) mus.push_back(m);
    const std::vector<double> mods = logspace(zmin, zmax, moduli);
    std::vector<cplx> z;
    z.reserve(mus.size() * mods.size());
    for (double mu : mus) {
        const cplx dir = std::polar(1.0, wedge_angle(mu));
        for (double m : mods) z.push_back(m * dir);
    }
    return z;
}

int thread_count()
{
    if (const char* env = std::getenv("GLMLAB_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int n, const std::function<void(int)>& f)
{
    const int workers = std::min(thread_count(), n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::atomic<bool> failed{false};
    auto run = [&] {
        for (int i = next++; i < n; i = next++) {
            if (failed) return;
            try {
                f(i);
            } catch (...) {
                if (!failed.exchange(true)) err = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

namespace {

struct Probe {
    const CompactGlm& c;
    const ScanConfig& scan;
    int poles = 0;
    int evals = 0;

    bool points_ok(const std::vector<cplx>& zs)
    {
        std::vector<char> ok(zs.size(), 1), pole(zs.size(), 0);
        parallel_for(static_cast<int>(zs.size()), [&](int i) {
            try {
                ok[i] = satisfies_root_condition(c, zs[i], scan.tol);
            } catch (const PoleError&) {
                pole[i] = 1;
            }
        });
        evals += static_cast<int>(zs.size());
        for (size_t i = 0; i < zs.size(); ++i) {
            poles += pole[i];
            if (!ok[i]) return false;
        }
        return true;
    }

    bool wedge_ok(double r, bool extended)
    {
        if (!points_ok(wedge_samples(r, scan.rays, scan.moduli, scan.zmin, scan.zmax))) return false;
        if (extended && scan.verify_zmax > scan.zmax)
            return points_ok(wedge_samples(r, scan.rays, scan.verify_moduli, scan.zmax, scan.verify_zmax));
        return true;
    }

    bool imag_axis_ok()
    {
        std::vector<cplx> zs;
        for (double m : logspace(scan.zmin, scan.verify_zmax, scan.moduli + scan.verify_moduli))
            zs.emplace_back(0.0, m);
        return points_ok(zs);
    }

    // Largest alpha in [lo, hi] passing the wedge predicate, given lo passes.
    double bisect(double lo, double hi, bool extended)
    {
        while (hi - lo > scan.angle_tol_deg) {
            const double mid = 0.5 * (lo + hi);
            if (wedge_ok(r_from_alpha(mid), extended))
                lo = mid;
            else
                hi = mid;
        }
        return lo;
    }
};

}  // namespace

StabilityReport a_alpha_angle(const CompactGlm& c, const ScanConfig& scan)
{
    StabilityReport rep;
    rep.scan = scan;
    Probe p{c, scan};
    const double amax = alpha_from_r(scan.r_max);

    if (p.wedge_ok(scan.r_max, true) && p.imag_axis_ok()) {
        rep.alpha_deg = 90.0;
        rep.r = scan.r_max;
        rep.a_stable = true;
        rep.verified = true;
    } else if (!p.wedge_ok(0.0, false)) {
        rep.alpha_deg = 0.0;
        rep.r = 0.0;
        rep.verified = true;
    } else {
        double a = p.bisect(0.0, amax, false);
        rep.verified = p.wedge_ok(r_from_alpha(a), true);
        if (!rep.verified) {
            a = p.wedge_ok(0.0, true) ? p.bisect(0.0, a, true) : 0.0;
            rep.verified = true;
        }
        rep.alpha_deg = a;
        rep.r = r_from_alpha(a);
    }
    rep.poles_skipped = p.poles;
    rep.evaluations = p.evals;
    return rep;
}

bool is_L_stable(const CompactGlm& c, const StabilityReport& angle)
{
    if (!angle.a_stable) return false;
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> jitter(-0.01, 0.01);
    double prev = std::numeric_limits<double>::infinity();
    double last = prev;
    for (double zr : {-1e6, -1e9, -1e12}) {
        double rho = 0.0;
        for (int attempt = 0;; ++attempt) {
            const double z = attempt == 0 ? zr : zr * (1.0 + jitter(rng));
            try {
                rho = spectral_radius(evolution_matrix(c, cplx(z, 0.0)));
                break;
            } catch (const PoleError&) {
                if (attempt > 8) throw;
            }
        }
        // radii at rounding level count as zero
        if (!(rho <= prev || rho <= 1e-10)) return false;
        prev = last = rho;
    }
    return last <= 1e-4;
}

bool is_L_stable(const CompactGlm& c)
{
    return is_L_stable(c, a_alpha_angle(c));
}

double axis_stability_radius(const CompactGlm& c, Axis axis, double zmax, double tol)
{
    auto point = [axis](double mu) { return axis == Axis::Imaginary ? cplx(0.0, mu) : cplx(-mu, 0.0); };
    auto ok = [&](double mu) {
        try {
            return satisfies_root_condition(c, point(mu), tol);
        } catch (const PoleError&) {
            return false;
        }
    };
    const std::vector<double> mus = logspace(1e-4, zmax, 400);
    double good = 0.0;
    for (double mu : mus) {
        if (ok(mu)) {
            good = mu;
            continue;
        }
        double lo = good, hi = mu;
        for (int it = 0; it < 60 && hi - lo > 1e-12 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (ok(mid) ? lo : hi) = mid;
        }
        return lo;
    }
    return zmax;
}

StabilityReport analyze_stability(const CompactGlm& c, const ScanConfig& scan)
{
    StabilityReport rep = a_alpha_angle(c, scan);
    rep.l_stable = is_L_stable(c, rep);
    rep.imag_radius = axis_stability_radius(c, Axis::Imaginary, scan.zmax, scan.tol);
    rep.neg_real_radius = axis_stability_radius(c, Axis::NegativeReal, scan.zmax, scan.tol);
    return rep;
}

std::vector<RasterPoint> region_raster(const CompactGlm& c, double re0, double re1, double im0, double im1,
                                       int nx, int ny)
{
    if (nx < 2 || ny < 2) throw std::invalid_argument("raster needs nx, ny >= 2");
    std::vector<RasterPoint> out(static_cast<size_t>(nx) * ny);
    parallel_for(ny, [&](int j) {
        const double im = im0 + (im1 - im0) * j / (ny - 1);
        for (int i = 0; i < nx; ++i) {
            const double re = re0 + (re1 - re0) * i / (nx - 1);
            out[static_cast<size_t>(j) * nx + i] = {re, im, rho_at(c, cplx(re, im))};
        }
    });
    return out;
}

json to_json(const StabilityReport& r)
{
    auto num = [](double v) { return std::isfinite(v) ? json(v) : json("inf"); };
    return {{"alpha_deg", r.alpha_deg},
            {"r", num(r.r)},
            {"a_stable", r.a_stable},
            {"l_stable", r.l_stable},
            {"imag_radius", num(r.imag_radius)},
            {"neg_real_radius", num(r.neg_real_radius)},
            {"scan",
             {{"rays", r.scan.rays},
              {"moduli", r.scan.moduli},
              {"zmin", r.scan.zmin},
              {"zmax", r.scan.zmax},
              {"verify_zmax", r.scan.verify_zmax},
              {"angle_tol_deg", r.scan.angle_tol_deg},
              {"tol", r.scan.tol},
              {"verified", r.verified},
              {"poles_skipped", r.poles_skipped},
              {"evaluations", r.evaluations}}}};
}

}  // namespace glmlab
