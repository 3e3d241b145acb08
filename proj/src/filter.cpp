#include "glmlab/filter.hpp"

#include <cmath>
#include <vector>

namespace glmlab {

namespace {

Vec pad_front(const Vec& v, int n)
{
    if (v.size() > n) throw StructuralError("vector longer than target step count");
    Vec out = Vec::Zero(n);
    out.tail(v.size()) = v;
    return out;
}

}  // namespace

bool is_core_form(const GlmTableau& t, double tol)
{
    check_dimensions(t);
    if (!t.shift_history()) return false;
    const int k = t.k, s = t.s;
    for (int l = 0; l < k; ++l)
        if (std::abs(t.D(0, l) - (l == k - 1 ? 1.0 : 0.0)) > tol) return false;
    if (t.A.row(0).cwiseAbs().maxCoeff() > tol) return false;
    if (k > 1 && t.Ahat.row(0).cwiseAbs().maxCoeff() > tol) return false;
    if ((t.theta - t.D.row(s - 1).transpose()).cwiseAbs().maxCoeff() > tol) return false;
    if ((t.b - t.A.row(s - 1).transpose()).cwiseAbs().maxCoeff() > tol) return false;
    if (k > 1 && (t.bhat - t.Ahat.row(s - 1).transpose()).cwiseAbs().maxCoeff() > tol) return false;
    return true;
}

CoreMethod make_core(const GlmTableau& t, double tol)
{
    if (!is_core_form(t, tol))
        throw StructuralError("tableau " + t.name + " is not in core form (stage 1 = u^n, update = last stage)");
    return CoreMethod{t};
}

GlmTableau lift(const GlmTableau& t, int k)
{
    check_dimensions(t);
    if (k < t.k) throw StructuralError("cannot lift to fewer steps");
    if (k == t.k) return t;
    if (!t.shift_history()) throw StructuralError("cannot lift a tableau with history rows");
    GlmTableau out = t;
    out.k = k;
    out.D = Mat::Zero(t.s, k);
    out.D.rightCols(t.k) = t.D;
    out.Ahat = Mat::Zero(t.s, k - 1);
    out.Ahat.rightCols(t.k - 1) = t.Ahat;
    out.theta = pad_front(t.theta, k);
    out.bhat = pad_front(t.bhat, k - 1);
    if (t.ell.size() == t.k) {
        Vec l = t.offsets();
        // only uniform offsets extend unambiguously
        for (int i = 1; i < t.k; ++i)
            if (std::abs(l(i) - l(i - 1) - 1.0) > 0) throw StructuralError("cannot lift non-uniform offsets");
        out.ell.resize(0);
    }
    return out;
}

PreFilter PreFilter::row(const Vec& d1)
{
    PreFilter p;
    p.d1 = d1;
    return p;
}

PreFilter PreFilter::stencil(double alpha, const Vec& dhat)
{
    PreFilter p;
    p.alpha = alpha;
    p.dhat = dhat;
    p.d1 = -0.5 * alpha * dhat;
    p.d1(dhat.size() - 1) += 1.0;
    return p;
}

PreFilter PreFilter::identity(int k)
{
    Vec d = Vec::Zero(k);
    d(k - 1) = 1.0;
    return row(d);
}

PostFilter PostFilter::coefficients(const Vec& theta, const Vec& bhat, const Vec& b)
{
    PostFilter p;
    p.form = Form::Coefficients;
    p.theta = theta;
    p.bhat = bhat;
    p.b = b;
    return p;
}

PostFilter PostFilter::stencil(double omega, const Vec& qhat)
{
    PostFilter p;
    p.form = Form::Stencil;
    p.omega = omega;
    p.qhat = qhat;
    return p;
}

PostFilter PostFilter::stage_values(const Vec& theta, const Vec& w)
{
    PostFilter p;
    p.form = Form::StageValues;
    p.theta = theta;
    p.w = w;
    return p;
}

int PostFilter::k() const
{
    return static_cast<int>(form == Form::Stencil ? qhat.size() : theta.size());
}

GlmTableau apply_filters(const CoreMethod& core, const PreFilter& pre, const PostFilter& post)
{
    if (!is_core_form(core.tableau)) throw StructuralError("core method is not in core form");
    const int k = std::max({core.tableau.k, pre.k(), post.k()});
    const GlmTableau c = lift(core.tableau, k);
    const int s = c.s;
    const Vec d1 = pad_front(pre.d1, k);

    GlmTableau t = c;
    t.D.row(0) = d1.transpose();
    for (int i = 1; i < s; ++i) {
        const double dk = c.D(i, k - 1);
        for (int l = 0; l < k - 1; ++l) t.D(i, l) = dk * d1(l) + c.D(i, l);
        t.D(i, k - 1) = dk * d1(k - 1);
    }

    switch (post.form) {
    case PostFilter::Form::Coefficients:
        if (post.b.size() != s) throw StructuralError("block b: post-filter expects length " + std::to_string(s));
        t.theta = pad_front(post.theta, k);
        t.bhat = pad_front(post.bhat, k - 1);
        t.b = post.b;
        break;
    case PostFilter::Form::Stencil:
        t.theta = t.D.row(s - 1).transpose() - 0.5 * post.omega * pad_front(post.qhat, k);
        t.bhat = t.Ahat.row(s - 1).transpose();
        t.b = t.A.row(s - 1).transpose();
        break;
    case PostFilter::Form::StageValues:
        if (post.w.size() != s) throw StructuralError("block w: post-filter expects length " + std::to_string(s));
        t.theta = pad_front(post.theta, k) + t.D.transpose() * post.w;
        t.bhat = t.Ahat.transpose() * post.w;
        t.b = t.A.transpose() * post.w;
        break;
    }
    return t;
}

GlmTableau filter_lmm(const Vec& alpha, const Vec& beta, const PreFilter& pre, const PostFilter& post)
{
    const int kl = static_cast<int>(alpha.size());
    if (kl < 1 || beta.size() != kl + 1)
        throw StructuralError("LMM needs k alpha and k+1 beta coefficients");
    GlmTableau core;
    core.name = "lmm";
    core.k = kl;
    core.s = 2;
    core.A = Mat::Zero(2, 2);
    core.A(1, 0) = beta(kl - 1);
    core.A(1, 1) = beta(kl);
    core.D = Mat::Zero(2, kl);
    core.D(0, kl - 1) = 1.0;
    core.D.row(1) = alpha.transpose();
    core.Ahat = Mat::Zero(2, kl - 1);
    core.Ahat.row(1) = beta.head(kl - 1).transpose();
    core.theta = core.D.row(1).transpose();
    core.b = core.A.row(1).transpose();
    core.bhat = core.Ahat.row(1).transpose();
    return apply_filters(CoreMethod{core}, pre, post);
}

GlmTableau prune_dead_stages(const GlmTableau& t, double tol)
{
    check_dimensions(t);
    GlmTableau cur = t;
    for (;;) {
        const int k = cur.k, s = cur.s;
        int dead = -1;
        for (int j = 0; j < s && dead < 0; ++j) {
            bool feeds = cur.A.col(j).cwiseAbs().maxCoeff() > tol || std::abs(cur.b(j)) > tol;
            if (!cur.shift_history()) feeds = feeds || cur.history.col(2 * k - 1 + j).cwiseAbs().maxCoeff() > tol;
            if (!feeds) dead = j;
        }
        if (dead < 0 || s == 1) return cur;
        std::vector<int> keep;
        for (int j = 0; j < s; ++j)
            if (j != dead) keep.push_back(j);
        GlmTableau n = cur;
        n.s = s - 1;
        n.A = cur.A(keep, keep);
        n.D = cur.D(keep, Eigen::all);
        n.Ahat = cur.Ahat(keep, Eigen::all);
        n.b = cur.b(keep);
        if (!cur.shift_history()) {
            std::vector<int> cols;
            for (int c = 0; c < 2 * k - 1; ++c) cols.push_back(c);
            for (int j : keep) cols.push_back(2 * k - 1 + j);
            n.history = cur.history(Eigen::all, cols);
        }
        cur = n;
    }
}

double fluctuation_factor(const PreFilter& pre)
{
    if (!pre.alpha || pre.dhat.size() == 0) throw std::invalid_argument("pre-filter not given in stencil form");
    if (std::abs(pre.dhat.sum()) > 1e-12 * (1.0 + pre.dhat.cwiseAbs().sum()))
        throw std::invalid_argument("stencil does not annihilate constants");
    return 1.0 - *pre.alpha * pre.dhat(pre.dhat.size() - 1) / 2.0;
}

bool is_reducing(const PreFilter& pre)
{
    fluctuation_factor(pre);
    const double ad = *pre.alpha * pre.dhat(pre.dhat.size() - 1);
    return ad > 0.0 && ad < 2.0;
}

namespace {

Vec vec_any(const json& j, const char* what)
{
    if (!j.is_array()) throw StructuralError(std::string(what) + " must be an array");
    return vector_from_json(j, static_cast<int>(j.size()), what);
}

}  // namespace

PreFilter pre_from_json(const json& j)
{
    if (j.contains("d1")) return PreFilter::row(vec_any(j.at("d1"), "d1"));
    if (j.contains("alpha") && j.contains("dhat"))
        return PreFilter::stencil(j.at("alpha").get<double>(), vec_any(j.at("dhat"), "dhat"));
    throw StructuralError("pre-filter needs d1 or alpha+dhat");
}

PostFilter post_from_json(const json& j)
{
    if (j.contains("omega") && j.contains("qhat"))
        return PostFilter::stencil(j.at("omega").get<double>(), vec_any(j.at("qhat"), "qhat"));
    if (j.contains("theta") && j.contains("w"))
        return PostFilter::stage_values(vec_any(j.at("theta"), "theta"), vec_any(j.at("w"), "w"));
    if (j.contains("theta") && j.contains("b")) {
        Vec bh = j.contains("bhat") ? vec_any(j.at("bhat"), "bhat") : Vec::Zero(0);
        return PostFilter::coefficients(vec_any(j.at("theta"), "theta"), bh, vec_any(j.at("b"), "b"));
    }
    throw StructuralError("post-filter needs theta+b, theta+w, or omega+qhat");
}

}  // namespace glmlab
