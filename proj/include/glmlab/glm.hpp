#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <json.hpp>

namespace glmlab {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using json = nlohmann::json;

class StructuralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A k-step, s-stage general linear method.
//
//   y_i     = sum_l D(i,l) u_l + dt sum_l Ahat(i,l) F(u_l) + dt sum_j A(i,j) F(y_j)
//   u_new   = sum_l Theta(l) u_l + dt sum_l bhat(l) F(u_l) + dt sum_j b(j) F(y_j)
//
// Steps are stored oldest first. Ahat and bhat act on the k-1 oldest steps;
// F(u^n) enters through the stages only.
//
// ell holds the step offsets in units of dt (default -[k-1, ..., 0]).
// history, when non-empty, is a (k-1) x (k + k-1 + s) block giving the
// update rows [Theta | bhat | b] of the older outputs. When empty the
// older outputs are plain shifts of the step history.
struct GlmTableau {
    std::string name;
    int k = 1;
    int s = 1;
    Mat A, Ahat, D;
    Vec theta, b, bhat;
    Vec ell;
    Mat history;

    Vec offsets() const;
    bool shift_history() const { return history.size() == 0; }
};

GlmTableau make_tableau(std::string name, int k, int s, const Mat& A, const Mat& D,
                        const Vec& theta, const Vec& b);

// Compact form: the k-1 oldest steps become trivial stages.
struct CompactGlm {
    int k = 1;
    int s = 1;
    Mat Atilde, Dtilde;
    Vec btilde, theta;
    Vec ell;
    // Output rows, oldest first; the last row is [theta | btilde].
    Mat out_theta;  // k x k
    Mat out_b;      // k x (s+k-1)

    int n() const { return s + k - 1; }
};

struct StepOffsets {
    Vec ell, e, c;
};

struct ConsistencyReport {
    double theta_residual = 0.0;
    double row_sum_residual = 0.0;
    bool pass = false;
};

void check_dimensions(const GlmTableau& t);
CompactGlm to_compact(const GlmTableau& t);
StepOffsets abscissas(const CompactGlm& c);
ConsistencyReport validate(const CompactGlm& c, double tol);

json to_json(const GlmTableau& t);
GlmTableau tableau_from_json(const json& j);
GlmTableau load_tableau(const std::string& path);

json matrix_json(const Mat& m);
json vector_json(const Vec& v);
Mat matrix_from_json(const json& j, int rows, int cols, const char* what);
Vec vector_from_json(const json& j, int n, const char* what);

}  // namespace glmlab
