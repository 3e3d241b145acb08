#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "glmlab/glm.hpp"

namespace glmlab {

// Residual labels in evaluation order, with the order q they belong to.
inline constexpr std::array<const char*, 10> kTauLabels = {
    "tau01", "tau02", "tau11", "tau21", "tau31", "tau32", "tau41", "tau42", "tau43", "tau44"};
inline constexpr std::array<int, 10> kTauOrder = {0, 0, 1, 2, 3, 3, 4, 4, 4, 4};

struct OrderResidualReport {
    std::vector<std::pair<std::string, double>> residuals;
    int order = -1;
    double tol = 0.0;

    double at(const std::string& label) const;
    double max_through(int q) const;
};

// All ten residuals. For methods with several output rows the entry of
// largest magnitude over the rows is reported.
OrderResidualReport tau_residuals(const CompactGlm& c);
int order_of(const CompactGlm& c, double tol = 1e-9);
OrderResidualReport order_report(const CompactGlm& c, double tol = 1e-9);

json to_json(const OrderResidualReport& r);

}  // namespace glmlab
