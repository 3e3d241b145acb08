#pragma once

#include <functional>
#include <vector>

#include "glmlab/glm.hpp"

namespace glmlab {

class PoleError : public std::runtime_error {
public:
    PoleError(cplx z);
    cplx z;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ScanConfig {
    int rays = 40;
    int moduli = 60;
    double zmin = 1e-3;
    double zmax = 1e4;
    double r_max = 50.0;
    double angle_tol_deg = 0.05;
    double verify_zmax = 1e8;
    int verify_moduli = 24;
    double tol = 1e-8;
};

struct StabilityReport {
    double alpha_deg = 0.0;
    double r = 0.0;
    bool a_stable = false;
    bool l_stable = false;
    double imag_radius = 0.0;
    double neg_real_radius = 0.0;
    bool verified = false;
    int poles_skipped = 0;
    int evaluations = 0;
    ScanConfig scan;
};

enum class Axis { Imaginary, NegativeReal };

double alpha_from_r(double r);
double r_from_alpha(double alpha_deg);
// Wedge boundary angle (measured from the positive real axis) for ray mu.
double wedge_angle(double mu);

CMat evolution_matrix(const CompactGlm& c, cplx z);
double spectral_radius(const CMat& m);
CVec eigenvalues(const CMat& m);
bool satisfies_root_condition(const CompactGlm& c, cplx z, double tol = 1e-8);
// Spectral radius at z; returns +inf at a pole.
double rho_at(const CompactGlm& c, cplx z);

// Sample points of the wedge for ray parameter r: ray mu = 0 first, then
// rays log-spaced in (0, r]; moduli log-spaced in [zmin, zmax].
std::vector<cplx> wedge_samples(double r, int rays, int moduli, double zmin, double zmax);

StabilityReport a_alpha_angle(const CompactGlm& c, const ScanConfig& scan = {});
bool is_L_stable(const CompactGlm& c);
bool is_L_stable(const CompactGlm& c, const StabilityReport& angle);
double axis_stability_radius(const CompactGlm& c, Axis axis, double zmax = 1e4, double tol = 1e-8);
StabilityReport analyze_stability(const CompactGlm& c, const ScanConfig& scan = {});

struct RasterPoint {
    double re, im, rho;
};
// Row-major over imaginary rows, real fastest. Poles carry +inf.
std::vector<RasterPoint> region_raster(const CompactGlm& c, double re0, double re1, double im0, double im1,
                                       int nx, int ny);

json to_json(const StabilityReport& r);

// Worker count from GLMLAB_THREADS (default: hardware concurrency).
int thread_count();
// Runs f(i) for i in [0, n); results must be written to disjoint slots.
void parallel_for(int n, const std::function<void(int)>& f);

}  // namespace glmlab
