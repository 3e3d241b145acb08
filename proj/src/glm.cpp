#include "glmlab/glm.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace glmlab {

Vec GlmTableau::offsets() const
{
    if (ell.size() == k) return ell;
    Vec l(k);
    for (int i = 0; i < k; ++i) l(i) = -(k - 1 - i);
    return l;
}

GlmTableau make_tableau(std::string name, int k, int s, const Mat& A, const Mat& D,
                        const Vec& theta, const Vec& b)
{
    GlmTableau t;
    t.name = std::move(name);
    t.k = k;
    t.s = s;
    t.A = A;
    t.D = D;
    t.theta = theta;
    t.b = b;
    t.Ahat = Mat::Zero(s, k - 1);
    t.bhat = Vec::Zero(k - 1);
    return t;
}

namespace {

void need(bool ok, const std::string& block, const std::string& msg)
{
    if (!ok) throw StructuralError("block " + block + ": " + msg);
}

std::string dims(Eigen::Index r, Eigen::Index c)
{
    std::ostringstream os;
    os << r << "x" << c;
    return os.str();
}

}  // namespace

void check_dimensions(const GlmTableau& t)
{
    need(t.k >= 1, "k", "step count must be >= 1");
    need(t.s >= 1, "s", "stage count must be >= 1");
    const int k = t.k, s = t.s;
    need(t.A.rows() == s && t.A.cols() == s, "A",
         "expected " + dims(s, s) + ", got " + dims(t.A.rows(), t.A.cols()));
    need(t.D.rows() == s && t.D.cols() == k, "D",
         "expected " + dims(s, k) + ", got " + dims(t.D.rows(), t.D.cols()));
    need(t.Ahat.rows() == s && t.Ahat.cols() == k - 1, "Ahat",
         "expected " + dims(s, k - 1) + ", got " + dims(t.Ahat.rows(), t.Ahat.cols()));
    need(t.theta.size() == k, "Theta", "expected length " + std::to_string(k));
    need(t.b.size() == s, "b", "expected length " + std::to_string(s));
    need(t.bhat.size() == k - 1, "bhat", "expected length " + std::to_string(k - 1));
    need(t.ell.size() == 0 || t.ell.size() == k, "ell", "expected length " + std::to_string(k));
    if (t.ell.size() == k) {
        for (int i = 1; i < k; ++i) need(t.ell(i) > t.ell(i - 1), "ell", "must be strictly increasing");
        need(t.ell(k - 1) == 0.0, "ell", "last entry must be 0");
    }
    if (!t.shift_history())
        need(t.history.rows() == k - 1 && t.history.cols() == k + k - 1 + s, "history",
             "expected " + dims(k - 1, 2 * k - 1 + s));
}

CompactGlm to_compact(const GlmTableau& t)
{
    check_dimensions(t);
    const int k = t.k, s = t.s, n = s + k - 1;
    CompactGlm c;
    c.k = k;
    c.s = s;
    c.Atilde = Mat::Zero(n, n);
    c.Atilde.block(k - 1, 0, s, k - 1) = t.Ahat;
    c.Atilde.block(k - 1, k - 1, s, s) = t.A;
    c.Dtilde = Mat::Zero(n, k);
    for (int i = 0; i < k - 1; ++i) c.Dtilde(i, i) = 1.0;
    c.Dtilde.block(k - 1, 0, s, k) = t.D;
    c.btilde.resize(n);
    c.btilde << t.bhat, t.b;
    c.theta = t.theta;
    c.ell = t.offsets();

    c.out_theta = Mat::Zero(k, k);
    c.out_b = Mat::Zero(k, n);
    for (int i = 0; i < k - 1; ++i) {
        if (t.shift_history()) {
            c.out_theta(i, i + 1) = 1.0;
        } else {
            c.out_theta.row(i) = t.history.block(i, 0, 1, k);
            c.out_b.row(i) = t.history.block(i, k, 1, n);
        }
    }
    c.out_theta.row(k - 1) = t.theta.transpose();
    c.out_b.row(k - 1) = c.btilde.transpose();
    return c;
}

StepOffsets abscissas(const CompactGlm& c)
{
    StepOffsets o;
    o.ell = c.ell;
    o.e = Vec::Ones(c.n());
    o.c = c.Atilde * o.e + c.Dtilde * c.ell;
    return o;
}

ConsistencyReport validate(const CompactGlm& c, double tol)
{
    ConsistencyReport r;
    for (int i = 0; i < c.k; ++i)
        r.theta_residual = std::max(r.theta_residual, std::abs(c.out_theta.row(i).sum() - 1.0));
    Vec rows = c.Dtilde.rowwise().sum();
    r.row_sum_residual = (rows.array() - 1.0).abs().maxCoeff();
    r.pass = r.theta_residual <= tol && r.row_sum_residual <= tol;
    return r;
}

json matrix_json(const Mat& m)
{
    json a = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        a.push_back(row);
    }
    return a;
}

json vector_json(const Vec& v)
{
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Mat matrix_from_json(const json& j, int rows, int cols, const char* what)
{
    Mat m(rows, cols);
    if (rows == 0 || cols == 0) return m;
    if (!j.is_array() || static_cast<int>(j.size()) != rows)
        throw StructuralError(std::string("block ") + what + ": expected " + std::to_string(rows) + " rows");
    for (int i = 0; i < rows; ++i) {
        const json& row = j[i];
        // a 1-column block may be written as a flat array
        if (cols == 1 && row.is_number()) {
            m(i, 0) = row.get<double>();
            continue;
        }
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw StructuralError(std::string("block ") + what + ": row " + std::to_string(i) +
                                  " expected " + std::to_string(cols) + " entries");
        for (int c = 0; c < cols; ++c) m(i, c) = row[c].get<double>();
    }
    return m;
}

Vec vector_from_json(const json& j, int n, const char* what)
{
    Vec v(n);
    if (n == 0) return v;
    if (!j.is_array() || static_cast<int>(j.size()) != n)
        throw StructuralError(std::string("block ") + what + ": expected length " + std::to_string(n));
    for (int i = 0; i < n; ++i) v(i) = j[i].get<double>();
    return v;
}

json to_json(const GlmTableau& t)
{
    json j;
    j["name"] = t.name;
    j["k"] = t.k;
    j["s"] = t.s;
    j["A"] = matrix_json(t.A);
    j["Ahat"] = matrix_json(t.Ahat);
    j["D"] = matrix_json(t.D);
    j["Theta"] = vector_json(t.theta);
    j["b"] = vector_json(t.b);
    j["bhat"] = vector_json(t.bhat);
    if (t.ell.size() == t.k) j["ell"] = vector_json(t.ell);
    if (!t.shift_history()) j["history"] = matrix_json(t.history);
    return j;
}

GlmTableau tableau_from_json(const json& j)
{
    if (!j.is_object()) throw StructuralError("method JSON must be an object");
    for (const char* key : {"k", "s", "A", "D", "Theta", "b"})
        if (!j.contains(key)) throw StructuralError(std::string("missing field ") + key);
    GlmTableau t;
    t.name = j.value("name", std::string("unnamed"));
    t.k = j.at("k").get<int>();
    t.s = j.at("s").get<int>();
    if (t.k < 1 || t.s < 1) throw StructuralError("k and s must be >= 1");
    const int k = t.k, s = t.s;
    t.A = matrix_from_json(j.at("A"), s, s, "A");
    t.D = matrix_from_json(j.at("D"), s, k, "D");
    t.theta = vector_from_json(j.at("Theta"), k, "Theta");
    t.b = vector_from_json(j.at("b"), s, "b");
    if (j.contains("Ahat"))
        t.Ahat = matrix_from_json(j.at("Ahat"), s, k - 1, "Ahat");
    else if (k == 1)
        t.Ahat = Mat::Zero(s, 0);
    else
        throw StructuralError("missing field Ahat");
    if (j.contains("bhat"))
        t.bhat = vector_from_json(j.at("bhat"), k - 1, "bhat");
    else if (k == 1)
        t.bhat = Vec::Zero(0);
    else
        throw StructuralError("missing field bhat");
    if (j.contains("ell")) t.ell = vector_from_json(j.at("ell"), k, "ell");
    if (j.contains("history")) t.history = matrix_from_json(j.at("history"), k - 1, 2 * k - 1 + s, "history");
    check_dimensions(t);
    return t;
}

GlmTableau load_tableau(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    return tableau_from_json(j);
}

}  // namespace glmlab
