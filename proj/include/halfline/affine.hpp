#pragma once

#include <vector>

#include "halfline/grid.hpp"
#include "halfline/mellin.hpp"

namespace halfline {

/// Point of the scale/translation half-plane, a > 0.
struct PhasePoint {
    double a;
    double b;

    PhasePoint(double a_, double b_) : a(a_), b(b_) {
        if (!(a_ > 0.0)) throw parameter_error("PhasePoint requires a > 0");
    }
};

/// Complex-valued symbol on the half-plane, sampled on a log grid in the
/// scale variable times a uniform grid in the translation variable.
struct AffineSymbol {
    LogGrid a_grid;
    UniformGrid b_grid;
    std::vector<cplx> values; // row-major n_a x n_b

    AffineSymbol() = default;
    AffineSymbol(LogGrid ag, UniformGrid bg)
        : a_grid(std::move(ag)), b_grid(std::move(bg)),
          values((size_t)a_grid.size() * b_grid.size(), cplx(0.0)) {}

    cplx& at(int ia, int ib) { return values[(size_t)ia * b_grid.size() + ib]; }
    const cplx& at(int ia, int ib) const { return values[(size_t)ia * b_grid.size() + ib]; }
};

AffineSymbol sample_symbol(const LogGrid& a_grid, const UniformGrid& b_grid,
                           const std::function<cplx(double, double)>& fn);

/// Unitary scale/modulation action (U(a,b) f)(x) = sqrt(a) e^{+i b x / hbar} f(a x).
HalfLineFunction u_action(const PhasePoint& p, const HalfLineFunction& f, const PlanckScale& hb);

/// Displaced reflection as displayed in the source construction:
/// (V(a,b) f)(x) = f(1/(a^2 x)) e^{i b (1/(a^2 x) - x)/hbar}.
/// An involution (V^2 = Id), but not unitary.
HalfLineFunction v_action(const PhasePoint& p, const HalfLineFunction& f, const PlanckScale& hb);

/// Unitary reflection U(a,b) I U(a,b)^{-1} with the unitary parity
/// (I f)(x) = (1/x) f(1/x):
/// (V* f)(x) = (1/(a x)) f(1/(a^2 x)) e^{-i b (1/(a^2 x) - x)/hbar}.
/// This is the variant under which the quantization/trace pair inverts.
HalfLineFunction reflection_unitary(const PhasePoint& p, const HalfLineFunction& f,
                                    const PlanckScale& hb);

double c_multiplier(double a, double x);

/// Multiplication by (a x + 1/(a x))/2 (non-unimodularity correction).
HalfLineFunction c_action(double a, const HalfLineFunction& f);

/// hbar-Fourier transform of a symbol in the translation variable,
///   F(a, c) = (2 pi hbar)^{-1/2} int W(a,b) e^{-i b c / hbar} db,
/// tabulated on a refined log grid in a times a uniform grid in c for
/// bicubic lookup. Symbol treated as zero outside its grids.
class SymbolFourierTable {
public:
    SymbolFourierTable(const AffineSymbol& W, const PlanckScale& hb, int a_refine = 4,
                       double c_step_hint = 0.0);

    cplx eval(double a, double c) const;
    double c_extent() const { return c_max_; }
    /// Largest |F| on the last c-column, relative to the table max; a
    /// non-decayed tail means the b-window under-resolves the kernel offsets.
    double tail_fraction() const { return tail_fraction_; }

private:
    double ua_min_ = 0.0, dua_ = 0.0;
    int na_ = 0;
    double c_max_ = 0.0, dc_ = 0.0;
    int nc_ = 0;
    double hbar_ = 1.0;
    double tail_fraction_ = 0.0;
    std::vector<cplx> table_; // row-major na x nc
};

/// Operator of a symbol through the integral-kernel formula
///   w(x, y) = F(1/sqrt(x y), y - x).
/// tail_tol bounds the acceptable transform magnitude at the alias-safe
/// c-window edge (resolution_error beyond it); symbols that are genuinely
/// flat in the translation variable may pass tail_tol = 1 to opt out.
OperatorMatrix quantize_kernel(const AffineSymbol& W, const LogGrid& grid, const PlanckScale& hb,
                               double tail_tol = 1e-6);

/// Same operator built as a quadrature superposition of reflections,
///   W = (2/sqrt(2 pi hbar)) int W(a,b) V*(a,b) da db / a^2,
/// accumulated column-wise from the action on grid delta surrogates.
/// `oversample` subdivides each kernel-aligned log-scale cell.
OperatorMatrix quantize_superposition(const AffineSymbol& W, const LogGrid& grid,
                                      const PlanckScale& hb, int oversample = 12);

/// Inverse map: symbol(a,b) = (2/sqrt(2 pi hbar)) Tr[ W V*(a,b) C(a) ],
/// evaluated on the product grid of targets.
AffineSymbol symbol_of(const OperatorMatrix& Wop, const LogGrid& a_targets,
                       const UniformGrid& b_targets, const PlanckScale& hb);

/// Diagnostic for the measure convention: integrates the chosen reflection
/// family against da db / (2 a^p hbar) over a truncated window (the b
/// integral is carried out analytically) and applies the result to f.
/// p = 2 reproduces (pi/2) f for both variants; p = 1 reproduces
/// multiplication by pi/(2x), not a multiple of the identity.
enum class ReflectionVariant { displayed, unitary };
HalfLineFunction reflection_measure_probe(const HalfLineFunction& f, const PlanckScale& hb,
                                          ReflectionVariant variant, int a_power,
                                          int n_a = 2000, double b_max = 60.0);

} // namespace halfline
