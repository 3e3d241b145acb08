#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glmlab/filter.hpp"
#include "glmlab/order.hpp"
#include "glmlab/stability.hpp"

namespace glmlab {

enum class Objective { AAlpha, ImagAxis, NegRealAxis };

// Free coefficients of the filtered method: pre-filter row d1 (k), final
// row theta (k), bhat (k-1) and b (s). Entries not free keep their
// initial value.
struct FreeMask {
    std::vector<bool> d1, theta, bhat, b;
};

struct OptimizationProblem {
    CoreMethod core;
    int k = 1;
    FreeMask free;
    // initial / pinned values; defaults are the identity pre-filter and the
    // core's own final row
    Vec d1, theta, bhat, b;
    int target_order = 1;
    Objective objective = Objective::AAlpha;
    double bound = 10.0;

    static OptimizationProblem standard(const GlmTableau& core, int k, int target_order);
    int free_count() const;
};

struct OptimizerConfig {
    int multistarts = 20;
    std::uint64_t seed = 1;
    double r_max = 50.0;
    double axis_max = 1e4;
    double r_tol = 1e-3;
    double margin = 1e-6;
    double penalty_weight = 1e6;
    double feasible_penalty = 1e-12;
    int rays = 40;
    int moduli = 60;
    double zmin = 1e-3;
    double zmax = 1e4;
    int max_evals = 600;
    int restart_evals = 250;
    // exceeding either cap returns a partial result flagged not feasible
    long max_iterations = 1000000;
    double time_budget_s = 280.0;
};

struct OptimizationResult {
    GlmTableau tableau;
    Vec d1, theta, bhat, b;
    double achieved_r = 0.0;
    double achieved_alpha_deg = 0.0;
    OrderResidualReport order_report;
    bool feasible = false;
    int iterations = 0;
    long evaluations = 0;
    std::uint64_t seed = 0;
    double seconds = 0.0;
    std::string note;
};

class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(const std::string& msg, OrderResidualReport best);
    OrderResidualReport best;
};

struct VerificationConfig {
    int density = 4;
    double zmax = 1e8;
    double violation = 1e-6;
    double order_tol = 1e-8;
};

struct Verification {
    bool feasible = false;
    double worst_rho = 0.0;
    StabilityReport stability;
    OrderResidualReport order;
};

OptimizationResult optimize_filters(const OptimizationProblem& problem, const OptimizerConfig& config = {});
Verification verify_result(const OptimizationResult& result, int target_order, Objective objective = Objective::AAlpha,
                           const VerificationConfig& strict = {}, const ScanConfig& scan = {});

// True iff every root of sum_j c_j x^j (c ordered by increasing power,
// leading coefficient last) lies strictly inside the circle of radius R.
bool roots_inside(const CVec& coeffs, double R);

GlmTableau build_filtered(const OptimizationProblem& p, const Vec& d1, const Vec& theta, const Vec& bhat, const Vec& b);

OptimizationProblem problem_from_json(const json& j);
json to_json(const OptimizationResult& r);
Objective objective_from_string(const std::string& s);
// Core form for a catalog core name (IE, MP, BDF2, RK22) or a method JSON.
GlmTableau core_from_name(const std::string& name);

}  // namespace glmlab
