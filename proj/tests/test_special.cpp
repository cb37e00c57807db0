#include <doctest.h>

#include <cmath>
#include <random>

#include "halfline/grid.hpp"
#include "halfline/special.hpp"

using namespace halfline;

TEST_CASE("log_gamma at classical points") {
    CHECK(std::abs(log_gamma(cplx(1.0, 0.0))) < 1e-14);
    CHECK(log_gamma(cplx(0.5, 0.0)).real() ==
          doctest::Approx(0.5 * std::log(M_PI)).epsilon(1e-13));
    CHECK(std::abs(log_gamma(cplx(5.0, 0.0)).real() - std::log(24.0)) < 1e-13);
}

TEST_CASE("log_gamma modulus on the critical line via reflection identity") {
    // |Gamma(1/2 + i y)|^2 = pi / cosh(pi y), computed independently
    for (double y : {0.5, 1.0, 3.0, 7.0}) {
        double expected = M_PI / std::cosh(M_PI * y);
        double got = std::exp(2.0 * log_gamma(cplx(0.5, y)).real());
        CHECK(got == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("log_gamma recurrence and conjugate symmetry over the strip") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> re(-20.0, 20.0), im(-100.0, 100.0);
    int tested = 0;
    while (tested < 200) {
        cplx z(re(rng), im(rng));
        // stay away from the pole line neighborhoods
        if (z.real() < 0.5 && std::abs(z.imag()) < 0.05 &&
            std::abs(z.real() - std::round(z.real())) < 0.05)
            continue;
        ++tested;
        cplx lhs = log_gamma(z + cplx(1.0, 0.0));
        cplx rhs = log_gamma(z) + std::log(z);
        double tol = (z.real() >= 0.5 ? 1e-12 : 1e-10) * (1.0 + std::abs(lhs));
        CHECK(std::abs(lhs - rhs) <= tol);

        cplx cs = log_gamma(std::conj(z));
        CHECK(std::abs(cs - std::conj(log_gamma(z))) <= 1e-13 * (1.0 + std::abs(cs)));
    }
}

TEST_CASE("log_gamma pole inputs") {
    try {
        log_gamma(cplx(0.0, 0.0));
        CHECK(false);
    } catch (const pole_error& e) {
        CHECK(e.offending_integer == 0);
    }
    try {
        log_gamma(cplx(-7.0, 0.0));
        CHECK(false);
    } catch (const pole_error& e) {
        CHECK(e.offending_integer == -7);
    }
}

TEST_CASE("exp(log_gamma) matches the factorials") {
    for (int k = 1; k <= 10; ++k) {
        double fact = 1.0;
        for (int j = 2; j < k; ++j) fact *= j;
        CHECK(gamma_fn(cplx((double)k, 0.0)).real() == doctest::Approx(fact).epsilon(1e-12));
    }
}

TEST_CASE("coherent normalization constant") {
    // direct Gamma-integral oracles: hbar = 1 gives C = 2, hbar = 2 gives C = 1
    CHECK(coherent_norm_constant(PlanckScale(1.0)) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(coherent_norm_constant(PlanckScale(2.0)) == doctest::Approx(1.0).epsilon(1e-12));

    // grid-quadrature oracle: ||C x^{1/h} e^{-x/h}|| = 1 on the desk grid
    LogGrid g = make_log_grid(1e-4, 40.0, 2048);
    for (double h : {0.5, 1.0, 2.0}) {
        double C = coherent_norm_constant(PlanckScale(h));
        auto phi = sample(g, [&](double x) {
            return cplx(C * std::pow(x, 1.0 / h) * std::exp(-x / h), 0.0);
        });
        CHECK(norm(phi) == doctest::Approx(1.0).epsilon(1e-8));
    }
    CHECK(std::exp(coherent_norm_log(PlanckScale(0.5))) ==
          doctest::Approx(coherent_norm_constant(PlanckScale(0.5))).epsilon(1e-14));
}
