#pragma once

#include <string>
#include <vector>

#include "halfline/grid.hpp"
#include "halfline/mellin.hpp"
#include "halfline/phase.hpp"

namespace halfline {

/// Spectral decomposition of a Hermitian quadrature kernel, used for exact
/// unitary propagation exp(-i H t / hbar). The kernel is symmetrized with
/// the weight square roots before diagonalizing.
class PropagationPlan {
public:
    PropagationPlan(const OperatorMatrix& H, const PlanckScale& hb, double herm_tol = 1e-8);

    const LogGrid& grid() const { return grid_; }
    const PlanckScale& planck() const { return hb_; }
    const std::vector<double>& eigenvalues() const { return eigenvalues_; }

    /// Eigenstate as a grid function (unit L2 norm under the quadrature).
    HalfLineFunction eigenstate(int r) const;

    HalfLineFunction propagate(const HalfLineFunction& psi0, double t) const;

    /// <psi, H psi> evaluated in the eigenbasis.
    double energy(const HalfLineFunction& psi) const;

private:
    LogGrid grid_;
    PlanckScale hb_;
    std::vector<double> eigenvalues_;
    std::vector<cplx> vectors_; // row-major n x n, column r = eigenvector
    std::vector<double> sqw_;
};

HalfLineFunction propagate(const PropagationPlan& plan, const HalfLineFunction& psi0, double t);

/// Exact instantaneous rate of the Husimi field of the density W along the
/// Schrodinger flow of H:  (2/hbar^2) Im <phi_p, H W phi_p>.
double husimi_rhs_direct(const PhasePoint& p, const OperatorMatrix& Wop, const OperatorMatrix& H,
                         const PlanckScale& hb);

/// Rank-one density |psi><psi| specialization (H psi precomputed).
double husimi_rhs_direct_pure(const PhasePoint& p, const HalfLineFunction& psi,
                              const HalfLineFunction& Hpsi, const PlanckScale& hb);

/// Kernel of the evolution law:
///   Phi(a, alpha; b, beta) = (2/(pi hbar)) (a+2alpha)^{-2} Q^{-1}(alpha,beta)
///                            * <phi_{a,b}, H phi_{a+2alpha, b+2beta}>_Mellin,
/// with the cross element evaluated from the Mellin slices of the
/// Hamiltonian symbol and Q the continuation prefactor. The contraction of
/// Phi against the analytically continued Husimi field over d(alpha) d(beta)
/// reproduces the direct rate.
cplx phi_kernel(const PhasePoint& p, const ComplexDisplacement& d, const MellinSlices& hM,
                const PlanckScale& hb);

/// Displacement window for the rate contraction, resolved in (log a', b')
/// with a' = a + 2 alpha, b' = b + 2 beta. The scale direction converges
/// slowly (power-law overlap tails times the symbol's scale decay), so the
/// window reaches far in a'.
struct DisplacementWindow {
    double a_ratio = 96.0; // a' in [a/a_ratio, a*a_ratio]
    int n_a = 128;
    double b_halfwidth = 14.0;
    int n_b = 128;
};

/// (2/hbar) Im int Phi * W_cont d(alpha) d(beta) over the window, the
/// continued Husimi arguments evaluated through husimi_continuation.
double husimi_rhs_kernel(const PhasePoint& p, const OperatorMatrix& Wop, const MellinSlices& hM,
                         const DisplacementWindow& window, const PlanckScale& hb);

/// Rank-one density specialization (bank-based overlaps instead of dense
/// matrix elements inside the displacement sweep).
double husimi_rhs_kernel_pure(const PhasePoint& p, const HalfLineFunction& psi,
                              const MellinSlices& hM, const DisplacementWindow& window,
                              const PlanckScale& hb);

/// Frozen convention constants; emitted with every verification report.
std::string conventions_text();

struct ProbeReport {
    PhasePoint p;
    double fd_rate;
    double direct_rate;
    double kernel_rate;
    double fd_vs_direct;
    double direct_vs_kernel;
    std::string note; // per-probe failure notes, empty when clean
};

struct VariantResidual {
    std::string name;
    double max_abs_residual; // max |kernel_variant - direct| over probes
};

struct EvolutionReport {
    std::vector<ProbeReport> probes;
    double max_fd_vs_direct = 0.0;
    double max_direct_vs_kernel = 0.0;
    double stationary_max_rate = 0.0;
    double norm_drift = 0.0;
    double energy_drift = 0.0;
    double mass_drift = 0.0;
    std::vector<VariantResidual> variants;
    std::string conventions;
};

struct VerifyEvolutionParams {
    double fd_delta = 1e-3;
    double t_span = 5.0;   // conservation checks over [0, t_span]
    int t_samples = 6;
    double contour_tau_max = 30.0;
    int contour_m = 241;
    DisplacementWindow window;
    bool with_variants = true;
};

/// Three-way check of the evolution law for H = quantized h_symbol and
/// initial state psi0: finite-difference rate vs direct rate vs Phi-kernel
/// rate at the probe points, plus stationary-state and conservation checks.
EvolutionReport verify_evolution(const AffineSymbol& h_symbol, const HalfLineFunction& psi0,
                                 const std::vector<PhasePoint>& probes, const PlanckScale& hb,
                                 const VerifyEvolutionParams& params = {});

} // namespace halfline
