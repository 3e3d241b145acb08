#pragma once

#include <optional>

#include "glmlab/glm.hpp"

namespace glmlab {

// Core method: stage 1 copies u^n, the update is the last stage.
struct CoreMethod {
    GlmTableau tableau;
};

CoreMethod make_core(const GlmTableau& t, double tol = 1e-14);
bool is_core_form(const GlmTableau& t, double tol = 1e-14);

// Zero-pad a tableau to k steps (new steps are the oldest).
GlmTableau lift(const GlmTableau& t, int k);

struct PreFilter {
    Vec d1;
    std::optional<double> alpha;
    Vec dhat;

    static PreFilter row(const Vec& d1);
    static PreFilter stencil(double alpha, const Vec& dhat);
    static PreFilter identity(int k);
    int k() const { return static_cast<int>(d1.size()); }
};

struct PostFilter {
    enum class Form { Coefficients, Stencil, StageValues };
    Form form = Form::Coefficients;
    // Coefficients: final row taken verbatim.
    Vec theta, bhat, b;
    // Stencil: u_new = y_s - (omega/2) sum qhat_l u_l.
    double omega = 0.0;
    Vec qhat;
    // StageValues: u_new = sum theta_l u_l + sum w_j y_j (theta reused).
    Vec w;

    static PostFilter coefficients(const Vec& theta, const Vec& bhat, const Vec& b);
    static PostFilter stencil(double omega, const Vec& qhat);
    static PostFilter stage_values(const Vec& theta, const Vec& w);
    int k() const;
};

// Filtered GLM of a core method. Dead stages are kept, so the identity
// filters return the core tableau unchanged.
GlmTableau apply_filters(const CoreMethod& core, const PreFilter& pre, const PostFilter& post);

// Two-stage GLM of a filtered linear multistep method. alpha has k
// entries and beta k+1 (beta_k multiplies F at the pre-filtered u^n).
GlmTableau filter_lmm(const Vec& alpha, const Vec& beta, const PreFilter& pre, const PostFilter& post);

// Drop stages that feed nothing: zero A column and zero weight in every
// output row.
GlmTableau prune_dead_stages(const GlmTableau& t, double tol = 0.0);

double fluctuation_factor(const PreFilter& pre);
bool is_reducing(const PreFilter& pre);

PreFilter pre_from_json(const json& j);
PostFilter post_from_json(const json& j);

}  // namespace glmlab
