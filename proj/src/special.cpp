#include "halfline/special.hpp"

#include <cmath>

namespace halfline {

namespace {

// Lanczos coefficients, g = 607/128 (Godfrey's 15-term set).
constexpr double kLanczosG = 4.7421875;
constexpr double kLanczosC[15] = {
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
};

constexpr double kHalfLog2Pi = 0.91893853320467274178; // log(2*pi)/2

// Valid for Re z >= 0.5.
cplx log_gamma_lanczos(cplx z) {
    cplx series(kLanczosC[0], 0.0);
    for (int k = 1; k < 15; ++k) series += kLanczosC[k] / (z + cplx(k - 1.0, 0.0));
    cplx t = z + cplx(kLanczosG - 0.5, 0.0);
    return kHalfLog2Pi + (z - 0.5) * std::log(t) - t + std::log(series);
}

} // namespace

cplx log_gamma(cplx z) {
    if (z.imag() == 0.0) {
        double r = z.real();
        if (r <= 0.0 && r == std::floor(r))
            throw pole_error("log_gamma: pole at non-positive integer", (long)std::llround(r));
    }
    if (z.real() < -50.0)
        throw parameter_error("log_gamma: Re z < -50 outside validated domain");
    if (z.real() >= 0.5) return log_gamma_lanczos(z);
    // shift into the Lanczos half-plane; telescoping keeps the recurrence exact
    int m = (int)std::ceil(0.5 - z.real());
    cplx acc(0.0);
    for (int j = 0; j < m; ++j) acc += std::log(z + cplx((double)j, 0.0));
    return log_gamma_lanczos(z + cplx((double)m, 0.0)) - acc;
}

cplx gamma_fn(cplx z) {
    return std::exp(log_gamma(z));
}

double coherent_norm_log(const PlanckScale& hb) {
    double nu = 2.0 / hb.hbar;
    double lg = log_gamma(cplx(nu + 1.0, 0.0)).real();
    return 0.5 * ((nu + 1.0) * std::log(2.0 / hb.hbar) - lg);
}

double coherent_norm_constant(const PlanckScale& hb) {
    double lc = coherent_norm_log(hb);
    if (std::abs(lc) > 700.0)
        throw range_error("coherent_norm_constant: exponentiation overflows", lc);
    return std::exp(lc);
}

} // namespace halfline
