#include "glmlab/order.hpp"

#include <cmath>

namespace glmlab {

double OrderResidualReport::at(const std::string& label) const
{
    for (const auto& [name, v] : residuals)
        if (name == label) return v;
    throw std::out_of_range("no residual " + label);
}

double OrderResidualReport::max_through(int q) const
{
    double m = 0.0;
    for (size_t i = 0; i < residuals.size(); ++i)
        if (kTauOrder[i] <= q) m = std::max(m, std::abs(residuals[i].second));
    return m;
}

OrderResidualReport tau_residuals(const CompactGlm& cg)
{
    const StepOffsets so = abscissas(cg);
    const Mat& At = cg.Atilde;
    const Mat& Dt = cg.Dtilde;
    const Vec& e = so.e;
    const Vec& c = so.c;
    const Vec l = so.ell;
    const Vec l2 = l.array().square();
    const Vec l3 = l.array().cube();
    const Vec l4 = l2.array().square();
    const Vec c2 = c.array().square();
    const Vec Ac = At * c;
    const Vec Dl2 = Dt * l2;

    std::array<double, 10> worst{};
    worst[1] = (Dt.rowwise().sum().array() - 1.0).abs().maxCoeff();

    for (int row = 0; row < cg.k; ++row) {
        const Vec th = cg.out_theta.row(row).transpose();
        const Vec b = cg.out_b.row(row).transpose();
        // time of this output relative to t_n, in units of dt
        const double sg = row == cg.k - 1 ? 1.0 : 1.0 + l(row);
        const double sg2 = sg * sg, sg3 = sg2 * sg, sg4 = sg3 * sg;
        std::array<double, 10> r{};
        r[0] = th.sum() - 1.0;
        r[1] = worst[1];
        r[2] = b.dot(e) + th.dot(l) - sg;
        r[3] = b.dot(c) + th.dot(l2) / 2 - sg2 / 2;
        r[4] = b.dot(c2) + th.dot(l3) / 3 - sg3 / 3;
        r[5] = b.dot(Ac) + b.dot(Dl2) / 2 + th.dot(l3) / 6 - sg3 / 6;
        r[6] = b.dot(Vec(c.array().cube())) + th.dot(l4) / 4 - sg4 / 4;
        r[7] = b.dot(At * c2) + b.dot(Dt * l3) / 3 + th.dot(l4) / 12 - sg4 / 12;
        r[8] = b.dot(At * Ac) + b.dot(At * Dl2) / 2 + b.dot(Dt * l3) / 6 + th.dot(l4) / 24 - sg4 / 24;
        r[9] = b.dot(Vec(c.array() * Ac.array())) + b.dot(Vec(c.array() * Dl2.array())) / 2 +
               th.dot(l4) / 8 - sg4 / 8;
        for (int i = 0; i < 10; ++i)
            if (std::abs(r[i]) > std::abs(worst[i])) worst[i] = r[i];
    }

    OrderResidualReport rep;
    for (int i = 0; i < 10; ++i) rep.residuals.emplace_back(kTauLabels[i], worst[i]);
    return rep;
}

namespace {

int classify(const OrderResidualReport& r, double tol)
{
    int p = -1;
    for (int q = 0; q <= 4; ++q) {
        bool ok = true;
        for (size_t i = 0; i < r.residuals.size(); ++i)
            if (kTauOrder[i] == q && !(std::abs(r.residuals[i].second) <= tol)) ok = false;
        if (!ok) break;
        p = q;
    }
    return p;
}

}  // namespace

int order_of(const CompactGlm& c, double tol)
{
    return classify(tau_residuals(c), tol);
}

OrderResidualReport order_report(const CompactGlm& c, double tol)
{
    OrderResidualReport r = tau_residuals(c);
    r.tol = tol;
    r.order = classify(r, tol);
    return r;
}

json to_json(const OrderResidualReport& r)
{
    json res = json::object();
    for (const auto& [name, v] : r.residuals) res[name] = v;
    return {{"residuals", res}, {"order", r.order}, {"tol", r.tol}};
}

}  // namespace glmlab
