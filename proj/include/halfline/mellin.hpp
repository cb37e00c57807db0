#pragma once

#include <vector>

#include "halfline/grid.hpp"

namespace halfline {

struct AffineSymbol; // affine.hpp

/// Uniform sampling of the critical line s = 1/2 + i*tau,
/// tau in [-tau_max, tau_max], symmetric about tau = 0.
class CriticalLineGrid {
public:
    CriticalLineGrid() = default;
    CriticalLineGrid(double tau_max, int m);

    int size() const { return m_; }
    double tau(int i) const { return -tau_max_ + i * step_; }
    cplx s(int i) const { return cplx(0.5, tau(i)); }
    double tau_max() const { return tau_max_; }
    double step() const { return step_; }
    double weight(int i) const { return (i == 0 || i == m_ - 1) ? 0.5 * step_ : step_; }

    bool operator==(const CriticalLineGrid& o) const { return m_ == o.m_ && tau_max_ == o.tau_max_; }
    bool operator!=(const CriticalLineGrid& o) const { return !(*this == o); }

private:
    int m_ = 0;
    double tau_max_ = 0.0, step_ = 0.0;
};

/// Mellin transform on the critical line:
///   f_M(s) = int_0^inf x^s f(x) dx/x,   s = 1/2 + i tau,
/// by trapezoid quadrature in u = log x (a Fourier integral of e^{u/2} f(e^u)).
/// Preconditions: the endpoint integrand e^{u/2} f must have decayed
/// (relative threshold decay_tol), otherwise accuracy_error.
std::vector<cplx> mellin_transform(const HalfLineFunction& f, const CriticalLineGrid& contour,
                                   double decay_tol = 1e-8);

/// Inversion f(x) = (1/2*pi) int x^{-s} f_M(s) dtau over the truncated contour.
/// Requires the spectrum to have decayed at |tau| = tau_max (relative
/// threshold), otherwise accuracy_error.
HalfLineFunction inverse_mellin(const std::vector<cplx>& spectrum, const CriticalLineGrid& contour,
                                const LogGrid& grid, double decay_tol = 1e-8);

/// | ||f||^2 - (2*pi)^{-1} int |f_M(1/2+i tau)|^2 dtau |  (Plancherel defect).
double unitarity_defect(const HalfLineFunction& f, const CriticalLineGrid& contour);

/// Mixed transform of a phase-space symbol: Mellin in the scale variable
/// composed with a Fourier transform in the translation variable,
///   w_M(s, xi) = int da/a a^s int db e^{-i xi b} W(a, b).
struct MellinSpectrum {
    CriticalLineGrid contour;
    UniformGrid xi_grid;
    std::vector<cplx> values; // row-major m x m_xi

    cplx& at(int i, int k) { return values[(size_t)i * xi_grid.size() + k]; }
    const cplx& at(int i, int k) const { return values[(size_t)i * xi_grid.size() + k]; }
};

MellinSpectrum symbol_mellin(const AffineSymbol& W, const CriticalLineGrid& contour,
                             const UniformGrid& xi_grid, double decay_tol = 1e-6);

/// Mellin-only slices W_M(s, b) on a b-grid, i.e. the xi-transform undone
/// with the matching 1/(2*pi) normalization. This is the form consumed by
/// the contour formulas.
struct MellinSlices {
    CriticalLineGrid contour;
    UniformGrid b_grid;
    std::vector<cplx> values; // row-major m x n_b

    cplx& at(int i, int k) { return values[(size_t)i * b_grid.size() + k]; }
    const cplx& at(int i, int k) const { return values[(size_t)i * b_grid.size() + k]; }
};

MellinSlices invert_xi(const MellinSpectrum& spec, const UniformGrid& b_grid);

/// Mellin transform in the scale variable only (direct slice computation,
/// used by tests as an independent route to invert_xi(symbol_mellin(.))).
MellinSlices symbol_mellin_slices(const AffineSymbol& W, const CriticalLineGrid& contour,
                                  double decay_tol = 1e-6);

} // namespace halfline
