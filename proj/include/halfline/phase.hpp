#pragma once

#include <vector>

#include "halfline/affine.hpp"
#include "halfline/grid.hpp"
#include "halfline/mellin.hpp"

namespace halfline {

/// Normalized wavelet coherent state phi_{a,b}(x) = C(hbar) a^{1/hbar+1/2}
/// x^{1/hbar} e^{-(a-ib)x/hbar}; equals u_action(p, phi_{1,0}).
struct CoherentState {
    PhasePoint p;
    PlanckScale hb;
    HalfLineFunction state;
};

/// Throws resolution_error when the state's peak x* = 1/a is not resolved
/// by the grid (outside [10 x_min, x_max/10]).
CoherentState coherent_state(const PhasePoint& p, const PlanckScale& hb, const LogGrid& grid);

/// Real displacement (alpha, beta) entering the complexified arguments
/// (a + alpha + i beta, b + beta - i alpha).
struct ComplexDisplacement {
    double alpha;
    double beta;
};

/// Real phase-space field on a scale/translation product grid.
struct HusimiField {
    LogGrid a_grid;
    UniformGrid b_grid;
    std::vector<double> values; // row-major n_a x n_b

    HusimiField() = default;
    HusimiField(LogGrid ag, UniformGrid bg)
        : a_grid(std::move(ag)), b_grid(std::move(bg)),
          values((size_t)a_grid.size() * b_grid.size(), 0.0) {}

    double& at(int ia, int ib) { return values[(size_t)ia * b_grid.size() + ib]; }
    const double& at(int ia, int ib) const { return values[(size_t)ia * b_grid.size() + ib]; }
};

/// Cached coherent-state amplitude profiles A(a, x) (b enters only as a
/// phase); immutable once built, shared across field sweeps.
class CoherentBank {
public:
    CoherentBank(const LogGrid& grid, const PlanckScale& hb, const std::vector<double>& a_values);

    int rows() const { return (int)a_values_.size(); }
    double a(int ia) const { return a_values_[ia]; }
    /// profile row: A(a, x_j), real positive
    const double* profile(int ia) const { return &profiles_[(size_t)ia * grid_.size()]; }
    const LogGrid& grid() const { return grid_; }

private:
    LogGrid grid_;
    std::vector<double> a_values_;
    std::vector<double> profiles_;
};

/// Cone-shaped integration window for scale/translation reconstructions:
/// a log-spaced in [a_min, a_max], |b| <= b_factor * (1 + a) with the b step
/// bounded by pi*hbar/x_support (Nyquist for the modulation parameter).
struct PhaseWindow {
    double a_min = 5e-3;
    double a_max = 60.0;
    int n_a = 320;
    double b_factor = 14.0;
    double x_support = 0.0; // 0: use the probe's numerical support
};

/// || (2 pi hbar)^{-1} int phi_{a,b} <phi_{a,b}, probe> da db / a^2 - probe || / ||probe||
/// over the truncated cone window (left Haar measure).
double identity_resolution_defect(const HalfLineFunction& probe, const PhaseWindow& window,
                                  const PlanckScale& hb);

/// Scale-translation distribution W_psi(a,b) =
/// (1/(2 hbar)) int (a x + 1/(a x)) conj(psi(x)) e^{-i b (x - 1/(a^2 x))/hbar}
/// psi(1/(a^2 x)) dx  (pairing of psi with the displaced-reflection family).
AffineSymbol affine_wigner(const HalfLineFunction& psi, const LogGrid& a_targets,
                           const UniformGrid& b_targets, const PlanckScale& hb);

/// |<phi_{a,b}, psi>|^2 / hbar on the target window.
HusimiField husimi_pure(const HalfLineFunction& psi, const LogGrid& a_targets,
                        const UniformGrid& b_targets, const PlanckScale& hb);

/// <phi_{a,b}, W phi_{a,b}> / hbar on the target window.
HusimiField husimi_operator(const OperatorMatrix& Wop, const LogGrid& a_targets,
                            const UniformGrid& b_targets, const PlanckScale& hb);

/// <phi_{p1}, W phi_{p2}> by direct quadrature.
cplx cross_matrix_element(const PhasePoint& p1, const PhasePoint& p2, const OperatorMatrix& Wop,
                          const PlanckScale& hb);

/// Same element through the contour formula
///   C^2 (a1 a2)^{1/hbar+1/2} (2 pi hbar)^{-1/2} (2 pi)^{-1}
///   int dtau int db' W_M(s,b') Gamma(k)^2 [(a1+i(b1-b'))(a2-i(b2-b'))/hbar^2]^{-k},
/// k = s/2 + 1/hbar + 1, where W_M are Mellin slices of the operator symbol.
cplx cross_matrix_element_mellin(const PhasePoint& p1, const PhasePoint& p2,
                                 const MellinSlices& wM, const PlanckScale& hb);

/// Husimi field evaluated from the Mellin spectrum of the operator's symbol
/// (the xi transform is inverted internally onto an alias-safe slice grid).
HusimiField husimi_from_mellin(const MellinSpectrum& wM, const LogGrid& a_targets,
                               const UniformGrid& b_targets, const PlanckScale& hb);

/// Analytic continuation of the (hbar-scaled) Husimi field to the
/// complexified arguments (a+alpha+i beta, b+beta-i alpha):
///   Q(alpha,beta) <phi_{a+2alpha, b+2beta}, W phi_{a,b}>,
///   Q = ((a+alpha) + i beta)^{2/hbar+1} / ((a+2alpha) a)^{1/hbar+1/2}.
/// Q(0,0) = 1, so the zero-displacement value is the diagonal element.
cplx husimi_continuation(const PhasePoint& p, const ComplexDisplacement& d,
                         const OperatorMatrix& Wop, const PlanckScale& hb);

/// Continuation prefactor Q above (principal branch; requires a+2alpha > 0).
cplx continuation_prefactor(const PhasePoint& p, const ComplexDisplacement& d,
                            const PlanckScale& hb);

/// Window integral (1/2pi) int W~ da db / a^2 over the cone window, which
/// approximates Tr W (= ||psi||^2 for a pure state).
double husimi_window_mass(const HalfLineFunction& psi, const PhaseWindow& window,
                          const PlanckScale& hb);

/// Window integral of the pairing distribution with measure da db / a^2
/// (equals pi ||psi||^2; no 2 pi normalization here).
cplx wigner_window_integral(const HalfLineFunction& psi, const PhaseWindow& window,
                            const PlanckScale& hb);

/// Alias-safe translation window for inverse-map symbols of operators built
/// from grid states: beyond |b| ~ pi hbar / (x_support * log_step) the
/// oscillatory trace sum stops resolving and only quadrature noise remains.
UniformGrid symbol_translation_window(const LogGrid& grid, double x_support, double hbar,
                                      double cap = 30.0, double step_hint = 0.0625);

} // namespace halfline
