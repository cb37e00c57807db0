#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "halfline/errors.hpp"

namespace halfline {

using cplx = std::complex<double>;

/// Reduced Planck constant as a strong type.
struct PlanckScale {
    double hbar;

    explicit PlanckScale(double h) : hbar(h) {
        if (!(h > 0.0) || h < 1e-2 || h > 1e3)
            throw parameter_error("hbar must lie in (0.01, 1000)");
    }
};

/// Geometric grid x_j = x_min * r^j on the positive half-line with
/// trapezoid quadrature weights in the log variable:
///   w_j = x_j * dlog,  halved at both endpoints.
/// Closed under x -> (x_min*x_max)/x by index reversal.
class LogGrid {
public:
    LogGrid() = default;
    LogGrid(double x_min, double x_max, int n);

    int size() const { return n_; }
    double x(int j) const { return points_[j]; }
    double u(int j) const { return u_min_ + j * du_; } // natural log of x_j
    double weight(int j) const { return weights_[j]; }
    double x_min() const { return points_.front(); }
    double x_max() const { return points_.back(); }
    double log_step() const { return du_; }
    double ratio() const { return ratio_; }

    const std::vector<double>& points() const { return points_; }
    const std::vector<double>& weights() const { return weights_; }

    /// Continuous (fractional) grid index of x; negative / > n-1 when outside.
    double position(double x) const;

    bool operator==(const LogGrid& o) const {
        return n_ == o.n_ && u_min_ == o.u_min_ && du_ == o.du_;
    }
    bool operator!=(const LogGrid& o) const { return !(*this == o); }

private:
    int n_ = 0;
    double u_min_ = 0.0, du_ = 0.0, ratio_ = 0.0;
    std::vector<double> points_, weights_;
};

LogGrid make_log_grid(double x_min, double x_max, int n);

/// Uniform grid on a real interval with trapezoid weights.
class UniformGrid {
public:
    UniformGrid() = default;
    UniformGrid(double lo, double hi, int n);

    int size() const { return n_; }
    double point(int i) const { return lo_ + i * step_; }
    double weight(int i) const { return (i == 0 || i == n_ - 1) ? 0.5 * step_ : step_; }
    double lo() const { return lo_; }
    double hi() const { return lo_ + (n_ - 1) * step_; }
    double step() const { return step_; }

    bool operator==(const UniformGrid& o) const {
        return n_ == o.n_ && lo_ == o.lo_ && step_ == o.step_;
    }
    bool operator!=(const UniformGrid& o) const { return !(*this == o); }

private:
    int n_ = 0;
    double lo_ = 0.0, step_ = 0.0;
};

/// Complex-valued function sampled on a LogGrid.
struct HalfLineFunction {
    LogGrid grid;
    std::vector<cplx> values;

    HalfLineFunction() = default;
    explicit HalfLineFunction(LogGrid g) : grid(std::move(g)), values(grid.size(), cplx(0.0)) {}
    HalfLineFunction(LogGrid g, std::vector<cplx> v);
};

/// Sample a callable x -> complex on the grid.
HalfLineFunction sample(const LogGrid& grid, const std::function<cplx(double)>& fn);

/// Quadrature inner product <f,g> = sum conj(f_j) g_j w_j, conjugate-linear
/// in the first slot.
cplx inner_product(const HalfLineFunction& f, const HalfLineFunction& g);

double norm(const HalfLineFunction& f);

HalfLineFunction operator+(const HalfLineFunction& f, const HalfLineFunction& g);
HalfLineFunction operator-(const HalfLineFunction& f, const HalfLineFunction& g);
HalfLineFunction operator*(cplx c, const HalfLineFunction& f);

/// Cubic interpolation in log x; zero outside [x_min, x_max].
cplx value_at(const HalfLineFunction& f, double x);

/// Largest grid point still carrying |f| >= tol * max|f|.
double upper_support(const HalfLineFunction& f, double tol = 1e-9);

/// Dense integral kernel on a LogGrid: (Wf)(x_i) = sum_j entries[i][j] w_j f(x_j).
struct OperatorMatrix {
    LogGrid grid;
    std::vector<cplx> entries; // row-major n*n

    OperatorMatrix() = default;
    explicit OperatorMatrix(LogGrid g) : grid(std::move(g)), entries((size_t)grid.size() * grid.size(), cplx(0.0)) {}

    cplx& at(int i, int j) { return entries[(size_t)i * grid.size() + j]; }
    const cplx& at(int i, int j) const { return entries[(size_t)i * grid.size() + j]; }
    int size() const { return grid.size(); }
};

HalfLineFunction apply_operator(const OperatorMatrix& W, const HalfLineFunction& f);

/// Quadrature trace sum_j entries[j][j] w_j.
cplx trace(const OperatorMatrix& W);

/// Kernel adjoint: entries'[i][j] = conj(entries[j][i]).
OperatorMatrix adjoint(const OperatorMatrix& W);

/// Kernel of the identity operator: entries[i][j] = delta_ij / w_j.
OperatorMatrix identity_kernel(const LogGrid& grid);

/// Rank-one kernel |g><g|: entries[i][j] = g_i conj(g_j).
OperatorMatrix rank_one(const HalfLineFunction& g);

OperatorMatrix operator+(const OperatorMatrix& A, const OperatorMatrix& B);
OperatorMatrix operator*(cplx c, const OperatorMatrix& A);

/// Relative Frobenius distance ||A-B||_F / ||B||_F (weighted by quadrature).
double frobenius_rel_diff(const OperatorMatrix& A, const OperatorMatrix& B);

/// Hermiticity defect ||W - W^dagger||_F / ||W||_F of the kernel.
double hermiticity_defect(const OperatorMatrix& W);

namespace detail {
/// 4-point Lagrange interpolation stencil in a uniform variable.
/// p is the continuous index; fills j0 (leftmost node) and 4 weights.
void cubic_stencil(double p, int n, int& j0, double c[4]);

/// 6-point Lagrange stencil; used for state evaluation where the
/// group-action round trips need the extra two orders.
void quintic_stencil(double p, int n, int& j0, double c[6]);

/// C = A * B for row-major complex matrices, A: m x k, B: k x n (BLAS-backed).
void zgemm_nn(int m, int n, int k, const cplx* A, const cplx* B, cplx* C);
} // namespace detail

} // namespace halfline
