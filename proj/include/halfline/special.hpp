#pragma once

#include <complex>

#include "halfline/grid.hpp"

namespace halfline {

/// Log-gamma on the cut plane, real on the positive axis.
/// Lanczos approximation for Re z >= 0.5; continued leftwards by the
/// recurrence log G(z) = log G(z+m) - sum log(z+j), which keeps the
/// recurrence identity exact by construction.
/// Accuracy: <= 1e-12 relative for Re z >= 0.5, <= 1e-10 after continuation.
cplx log_gamma(cplx z);

cplx gamma_fn(cplx z);

/// log of the coherent-state normalization: the constant C(hbar) with
/// C^2 = (2/hbar)^(2/hbar+1) / Gamma(2/hbar+1), fixed by ||phi_{1,0}|| = 1.
double coherent_norm_log(const PlanckScale& hb);

/// C(hbar) itself; throws range_error (carrying the log) on overflow.
double coherent_norm_constant(const PlanckScale& hb);

} // namespace halfline
