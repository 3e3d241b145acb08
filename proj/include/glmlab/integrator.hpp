#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "glmlab/catalog.hpp"
#include "glmlab/glm.hpp"

namespace glmlab {

struct OdeProblem {
    std::string name;
    std::function<Vec(double, const Vec&)> f;
    std::function<Mat(double, const Vec&)> jacobian;  // may be empty
    Vec u0;
    double t0 = 0.0;
    double tf = 1.0;
    std::function<Vec(double)> exact;  // may be empty
    bool dissipative = false;
    // set for f(u) = L u
    std::optional<Mat> linear;
};

// dahlquist(lambda), poly(p), decay_forced or decay_forced(u0), cubic_dissipative,
// stiff_linear or stiff_linear(a,b,c) for L = [[a,b],[b,c]], lotka_volterra
OdeProblem make_problem(const std::string& spec);

enum class Startup { Exact, BootstrapRk4 };

struct SolveConfig {
    double dt = 0.1;
    double newton_tol = 1e-12;
    int newton_max_iters = 50;
    bool fallback = false;
    Startup startup = Startup::Exact;
    int bootstrap_substeps = 100;
    // when false the retained-stage path of IE-EIS-3 is replaced by the plain GLM path
    bool use_retained_stages = true;
};

struct StepperState {
    std::vector<Vec> history;  // k values, oldest first
    std::vector<Vec> retained_stages;
    double t = 0.0;
    int n = 0;
};

class StepFailure : public std::runtime_error {
public:
    StepFailure(const std::string& msg, double residual, int iterations);
    double residual;
    int iterations;
};

struct SolverStats {
    long newton_iterations = 0;
    int max_newton_iterations = 0;
    long f_evaluations = 0;
    long jacobian_evaluations = 0;
    int fallback_uses = 0;
};

struct SolutionRecord {
    std::string method;
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<Vec> initial_history;
    // sibling outputs computed from the same stages, keyed by method name
    std::map<std::string, std::vector<Vec>> alternates;
    std::map<std::string, int> alternate_orders;
    SolverStats stats;
    bool failed = false;
    std::string failure;
};

StepperState bootstrap_history(const OdeProblem& p, const CatalogEntry& m, const SolveConfig& cfg);
StepperState step(const CatalogEntry& m, const StepperState& s, const OdeProblem& p, const SolveConfig& cfg,
                  SolverStats* stats = nullptr, std::vector<Vec>* stage_values = nullptr);
StepperState step(const GlmTableau& m, const StepperState& s, const OdeProblem& p, const SolveConfig& cfg,
                  SolverStats* stats = nullptr);

SolutionRecord integrate(const OdeProblem& p, const CatalogEntry& m, const SolveConfig& cfg);
SolutionRecord integrate(const OdeProblem& p, const GlmTableau& m, const SolveConfig& cfg);

// max-norm difference of the highest and lowest order alternates, per step
std::vector<double> embedded_error_estimate(const SolutionRecord& r);
std::vector<double> embedded_error_estimate(const SolutionRecord& r, const std::string& high, const std::string& low);

struct EnergyResult {
    bool monotone = false;
    std::vector<double> trace;
};
Mat energy_matrix(double d);
EnergyResult energy_check(const SolutionRecord& r, double d);
EnergyResult energy_check(const SolutionRecord& r, const CatalogEntry& m);

struct ConvergenceLevel {
    double dt;
    std::optional<double> error;
    std::optional<double> order_estimate;
    std::string failure;
};
struct ConvergenceTable {
    std::vector<ConvergenceLevel> levels;
    double slope = 0.0;
};
ConvergenceTable observed_order(const OdeProblem& p, const CatalogEntry& m, const std::vector<double>& dts,
                                SolveConfig cfg = {});
std::vector<double> halving(double dt0, int levels);
double relative_error(const OdeProblem& p, const SolutionRecord& r);
// slope of log(values) against log(dts), median of successive ratios
double median_slope(const std::vector<double>& dts, const std::vector<double>& values);

}  // namespace glmlab
