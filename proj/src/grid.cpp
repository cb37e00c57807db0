#include "halfline/grid.hpp"

#include <algorithm>
#include <cmath>

#include <cblas.h>

namespace halfline {

LogGrid::LogGrid(double x_min, double x_max, int n) {
    if (!(x_min > 0.0) || !(x_max > x_min))
        throw parameter_error("LogGrid requires 0 < x_min < x_max");
    if (n < 2) throw parameter_error("LogGrid requires n >= 2");
    n_ = n;
    u_min_ = std::log(x_min);
    du_ = (std::log(x_max) - u_min_) / (n - 1);
    ratio_ = std::exp(du_);
    points_.resize(n);
    weights_.resize(n);
    for (int j = 0; j < n; ++j) {
        points_[j] = std::exp(u_min_ + j * du_);
        weights_[j] = points_[j] * du_;
    }
    points_.front() = x_min; // pin endpoints against rounding
    points_.back() = x_max;
    weights_.front() *= 0.5;
    weights_.back() *= 0.5;
}

double LogGrid::position(double x) const {
    return (std::log(x) - u_min_) / du_;
}

LogGrid make_log_grid(double x_min, double x_max, int n) {
    return LogGrid(x_min, x_max, n);
}

UniformGrid::UniformGrid(double lo, double hi, int n) {
    if (n < 2) throw parameter_error("UniformGrid requires n >= 2");
    if (!(hi > lo)) throw parameter_error("UniformGrid requires hi > lo");
    n_ = n;
    lo_ = lo;
    step_ = (hi - lo) / (n - 1);
}

HalfLineFunction::HalfLineFunction(LogGrid g, std::vector<cplx> v) : grid(std::move(g)), values(std::move(v)) {
    if ((int)values.size() != grid.size())
        throw structural_error("value count does not match grid size");
}

HalfLineFunction sample(const LogGrid& grid, const std::function<cplx(double)>& fn) {
    HalfLineFunction f(grid);
    for (int j = 0; j < grid.size(); ++j) f.values[j] = fn(grid.x(j));
    return f;
}

static void require_same_grid(const LogGrid& a, const LogGrid& b, const char* what) {
    if (a != b) throw structural_error(std::string(what) + ": operands live on different grids");
}

cplx inner_product(const HalfLineFunction& f, const HalfLineFunction& g) {
    require_same_grid(f.grid, g.grid, "inner_product");
    // compensated summation keeps the conjugate-symmetry test at machine level
    cplx sum(0.0), comp(0.0);
    for (int j = 0; j < f.grid.size(); ++j) {
        cplx term = std::conj(f.values[j]) * g.values[j] * f.grid.weight(j) - comp;
        cplx t = sum + term;
        comp = (t - sum) - term;
        sum = t;
    }
    return sum;
}

double norm(const HalfLineFunction& f) {
    double s = 0.0;
    for (int j = 0; j < f.grid.size(); ++j) s += std::norm(f.values[j]) * f.grid.weight(j);
    return std::sqrt(s);
}

HalfLineFunction operator+(const HalfLineFunction& f, const HalfLineFunction& g) {
    require_same_grid(f.grid, g.grid, "operator+");
    HalfLineFunction h(f.grid);
    for (size_t j = 0; j < h.values.size(); ++j) h.values[j] = f.values[j] + g.values[j];
    return h;
}

HalfLineFunction operator-(const HalfLineFunction& f, const HalfLineFunction& g) {
    require_same_grid(f.grid, g.grid, "operator-");
    HalfLineFunction h(f.grid);
    for (size_t j = 0; j < h.values.size(); ++j) h.values[j] = f.values[j] - g.values[j];
    return h;
}

HalfLineFunction operator*(cplx c, const HalfLineFunction& f) {
    HalfLineFunction h(f.grid);
    for (size_t j = 0; j < h.values.size(); ++j) h.values[j] = c * f.values[j];
    return h;
}

namespace detail {

void cubic_stencil(double p, int n, int& j0, double c[4]) {
    int jc = (int)std::floor(p);
    j0 = jc - 1;
    if (j0 < 0) j0 = 0;
    if (j0 > n - 4) j0 = n - 4;
    double t = p - j0; // in [~0,3]
    // Lagrange weights over offsets {0,1,2,3}
    c[0] = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
    c[1] = t * (t - 2.0) * (t - 3.0) / 2.0;
    c[2] = -t * (t - 1.0) * (t - 3.0) / 2.0;
    c[3] = t * (t - 1.0) * (t - 2.0) / 6.0;
}

void quintic_stencil(double p, int n, int& j0, double c[6]) {
    int jc = (int)std::floor(p);
    j0 = jc - 2;
    if (j0 < 0) j0 = 0;
    if (j0 > n - 6) j0 = n - 6;
    double t = p - j0;
    for (int k = 0; k < 6; ++k) {
        double w = 1.0;
        for (int m_ = 0; m_ < 6; ++m_) {
            if (m_ == k) continue;
            w *= (t - m_) / (k - m_);
        }
        c[k] = w;
    }
}

void zgemm_nn(int m, int n, int k, const cplx* A, const cplx* B, cplx* C) {
    const cplx one(1.0), zero(0.0);
    cblas_zgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, m, n, k, &one, A, k, B, n, &zero, C, n);
}

} // namespace detail

cplx value_at(const HalfLineFunction& f, double x) {
    const LogGrid& g = f.grid;
    if (!(x > 0.0)) return cplx(0.0);
    double p = g.position(x);
    if (p < 0.0 || p > g.size() - 1) return cplx(0.0); // states in scope decay past the grid
    if (g.size() >= 8) {
        int j0;
        double c[6];
        detail::quintic_stencil(p, g.size(), j0, c);
        cplx v(0.0);
        for (int k = 0; k < 6; ++k) v += c[k] * f.values[j0 + k];
        return v;
    }
    if (g.size() >= 4) {
        int j0;
        double c[4];
        detail::cubic_stencil(p, g.size(), j0, c);
        cplx v(0.0);
        for (int k = 0; k < 4; ++k) v += c[k] * f.values[j0 + k];
        return v;
    }
    int j = (int)std::lround(p);
    return f.values[std::clamp(j, 0, g.size() - 1)];
}

double upper_support(const HalfLineFunction& f, double tol) {
    double fmax = 0.0;
    for (const cplx& v : f.values) fmax = std::max(fmax, std::abs(v));
    for (int j = f.grid.size() - 1; j >= 0; --j)
        if (std::abs(f.values[j]) >= tol * fmax) return f.grid.x(j);
    return f.grid.x_max();
}

HalfLineFunction apply_operator(const OperatorMatrix& W, const HalfLineFunction& f) {
    require_same_grid(W.grid, f.grid, "apply_operator");
    int n = W.size();
    HalfLineFunction out(W.grid);
    std::vector<cplx> wf(n);
    for (int j = 0; j < n; ++j) wf[j] = f.values[j] * W.grid.weight(j);
    for (int i = 0; i < n; ++i) {
        cplx s(0.0);
        const cplx* row = &W.entries[(size_t)i * n];
        for (int j = 0; j < n; ++j) s += row[j] * wf[j];
        out.values[i] = s;
    }
    return out;
}

cplx trace(const OperatorMatrix& W) {
    cplx s(0.0);
    for (int j = 0; j < W.size(); ++j) s += W.at(j, j) * W.grid.weight(j);
    return s;
}

OperatorMatrix adjoint(const OperatorMatrix& W) {
    OperatorMatrix A(W.grid);
    int n = W.size();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A.at(i, j) = std::conj(W.at(j, i));
    return A;
}

OperatorMatrix identity_kernel(const LogGrid& grid) {
    OperatorMatrix W(grid);
    for (int j = 0; j < grid.size(); ++j) W.at(j, j) = 1.0 / grid.weight(j);
    return W;
}

OperatorMatrix rank_one(const HalfLineFunction& g) {
    OperatorMatrix W(g.grid);
    int n = g.grid.size();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) W.at(i, j) = g.values[i] * std::conj(g.values[j]);
    return W;
}

OperatorMatrix operator+(const OperatorMatrix& A, const OperatorMatrix& B) {
    require_same_grid(A.grid, B.grid, "operator+");
    OperatorMatrix C(A.grid);
    for (size_t k = 0; k < C.entries.size(); ++k) C.entries[k] = A.entries[k] + B.entries[k];
    return C;
}

OperatorMatrix operator*(cplx c, const OperatorMatrix& A) {
    OperatorMatrix C(A.grid);
    for (size_t k = 0; k < C.entries.size(); ++k) C.entries[k] = c * A.entries[k];
    return C;
}

// Frobenius norms taken with the quadrature weights w_i w_j so they
// approximate Hilbert-Schmidt norms of the kernels.
static double frobenius_sq(const OperatorMatrix& A) {
    int n = A.size();
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            s += std::norm(A.at(i, j)) * A.grid.weight(i) * A.grid.weight(j);
    return s;
}

double frobenius_rel_diff(const OperatorMatrix& A, const OperatorMatrix& B) {
    require_same_grid(A.grid, B.grid, "frobenius_rel_diff");
    int n = A.size();
    double num = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            num += std::norm(A.at(i, j) - B.at(i, j)) * A.grid.weight(i) * A.grid.weight(j);
    double den = frobenius_sq(B);
    return std::sqrt(num / den);
}

double hermiticity_defect(const OperatorMatrix& W) {
    int n = W.size();
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double wij = W.grid.weight(i) * W.grid.weight(j);
            num += std::norm(W.at(i, j) - std::conj(W.at(j, i))) * wij;
            den += std::norm(W.at(i, j)) * wij;
        }
    return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

} // namespace halfline
