#pragma once

#include <optional>
#include <string>
#include <vector>

#include "glmlab/filter.hpp"
#include "glmlab/glm.hpp"

namespace glmlab {

struct Recipe {
    CoreMethod core;
    PreFilter pre;
    PostFilter post;
};

struct CatalogEntry {
    std::string name;
    GlmTableau tableau;
    int declared_order = 1;
    int declared_observed_order = 1;
    std::string observed_scope;  // empty when the observed order holds generally
    double declared_alpha_deg = 90.0;
    bool declared_l_stable = false;
    int implicit_solves_per_step = 1;
    bool retains_stages = false;
    // stage evaluation times in units of dt relative to t_n, one per compact stage
    Vec abscissas;
    // forcing abscissa as tabulated in the literature, when it differs from the computed one
    std::optional<double> published_abscissa;
    std::string abscissa_note;
    // embedded family sharing all solves; siblings differ only in the final row
    std::string family;
    std::optional<Recipe> recipe;
    bool out_of_range = false;
};

CatalogEntry get(const std::string& name);
CatalogEntry get_parametric(const std::string& name, double d);
std::vector<CatalogEntry> list();
std::vector<std::string> names();

// Members of an embedded family ordered by declared order.
std::vector<CatalogEntry> family_members(const std::string& family);

// Core forms (stage 1 copies u^n, update = last stage).
GlmTableau core_implicit_euler();
GlmTableau core_midpoint();
GlmTableau core_bdf2();
GlmTableau core_lobatto_iiic();

json to_json(const CatalogEntry& e);

}  // namespace glmlab
