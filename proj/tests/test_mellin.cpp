#include <doctest.h>

#include <cmath>

#include "halfline/affine.hpp"
#include "halfline/mellin.hpp"
#include "halfline/special.hpp"

using namespace halfline;

namespace {

// wide grid: the critical-line integrand x^{-1/2} f only decays past very
// small x, so the transform grid reaches much further down than the desk grid
LogGrid wide_grid(int n = 4096) { return make_log_grid(1e-20, 60.0, n); }

double sup_abs(const std::vector<cplx>& v) {
    double s = 0.0;
    for (const cplx& z : v) s = std::max(s, std::abs(z));
    return s;
}

} // namespace

TEST_CASE("critical line grid parameters") {
    CriticalLineGrid c(20.0, 401);
    CHECK(c.tau(0) == doctest::Approx(-20.0));
    CHECK(c.tau(400) == doctest::Approx(20.0));
    CHECK(c.tau(200) == doctest::Approx(0.0));
    CHECK_THROWS_AS(CriticalLineGrid(20.0, 400), parameter_error); // even m
    CHECK_THROWS_AS(CriticalLineGrid(-1.0, 401), parameter_error);
}

TEST_CASE("transform of e^-x reproduces the gamma function on the line") {
    // |Gamma(1/2+i tau)| decays like e^{-pi tau/2} (~6e-14 at tau=20), far
    // below the double-precision cancellation floor of the quadrature, so
    // the 1e-8 gate is taken relative to the line supremum.
    LogGrid g = wide_grid();
    auto f = sample(g, [](double x) { return cplx(std::exp(-x), 0.0); });
    CriticalLineGrid contour(20.0, 401);
    auto fm = mellin_transform(f, contour);
    double sup = std::abs(gamma_fn(cplx(0.5, 0.0)));
    double worst = 0.0;
    for (int i = 0; i < contour.size(); ++i)
        worst = std::max(worst, std::abs(fm[i] - gamma_fn(contour.s(i))));
    CHECK(worst / sup < 1e-8);
}

TEST_CASE("transform of e^-2x gives the rescaled gamma") {
    LogGrid g = wide_grid();
    auto f = sample(g, [](double x) { return cplx(std::exp(-2.0 * x), 0.0); });
    CriticalLineGrid contour(20.0, 401);
    auto fm = mellin_transform(f, contour);
    double sup = 0.0, worst = 0.0;
    for (int i = 0; i < contour.size(); ++i) {
        cplx s = contour.s(i);
        cplx expect = std::exp(-s * std::log(2.0) + log_gamma(s));
        sup = std::max(sup, std::abs(expect));
        worst = std::max(worst, std::abs(fm[i] - expect));
    }
    CHECK(worst / sup < 1e-8);
}

TEST_CASE("transform of the [1,e] indicator") {
    // jump points placed on grid nodes, half-sampled there; trapezoid is
    // then O(step^2), checked together with the convergence rate
    auto run = [](int cells) {
        LogGrid g = make_log_grid(std::exp(-9.0), std::exp(9.0), 18 * cells + 1);
        HalfLineFunction f(g);
        int j0 = 9 * cells, j1 = 10 * cells;
        for (int j = j0; j <= j1; ++j) f.values[j] = 1.0;
        f.values[j0] = 0.5;
        f.values[j1] = 0.5;
        CriticalLineGrid contour(5.0, 101);
        auto fm = mellin_transform(f, contour, 1.0);
        double worst = 0.0, sup = 0.0;
        for (int i = 0; i < contour.size(); ++i) {
            cplx s = contour.s(i);
            cplx expect = (std::exp(s) - 1.0) / s;
            sup = std::max(sup, std::abs(expect));
            worst = std::max(worst, std::abs(fm[i] - expect));
        }
        return worst / sup;
    };
    double e1 = run(128), e2 = run(256);
    CHECK(e1 < 1e-3);
    CHECK(e1 / e2 > 3.0); // second-order convergence
    CHECK(e1 / e2 < 5.5);
}

TEST_CASE("transform rejects non-decayed integrands") {
    LogGrid g = make_log_grid(1e-4, 40.0, 1024);
    auto f = sample(g, [](double x) { return cplx(std::exp(-x), 0.0); });
    // x^{-1/2} e^{-x} is ~1e-2 of peak at x = 1e-4: not decayed
    CHECK_THROWS_AS(mellin_transform(f, CriticalLineGrid(10.0, 101)), accuracy_error);
}

TEST_CASE("inversion round trips") {
    LogGrid g = wide_grid();
    CriticalLineGrid contour(40.0, 1201);
    for (double lam : {1.0, 2.0}) {
        auto f = sample(g, [&](double x) { return cplx(std::exp(-lam * x), 0.0); });
        auto fm = mellin_transform(f, contour);
        HalfLineFunction back = inverse_mellin(fm, contour, g);
        double worst = 0.0;
        for (int j = 0; j < g.size(); ++j) {
            double x = g.x(j);
            if (x < 0.01 || x > 10.0) continue;
            worst = std::max(worst, std::abs(back.values[j] - f.values[j]) / std::abs(f.values[j]));
        }
        CHECK(worst < 1e-6);
    }
    HalfLineFunction zero = inverse_mellin(std::vector<cplx>(contour.size(), cplx(0.0)), contour, g);
    CHECK(norm(zero) == 0.0);
}

TEST_CASE("inversion rejects non-decayed spectra") {
    LogGrid g = wide_grid(512);
    CriticalLineGrid contour(3.0, 31); // Gamma(s) has barely decayed here
    auto f = sample(g, [](double x) { return cplx(std::exp(-x), 0.0); });
    auto fm = mellin_transform(f, contour);
    CHECK_THROWS_AS(inverse_mellin(fm, contour, g), accuracy_error);
}

TEST_CASE("Plancherel identity") {
    LogGrid g = wide_grid();
    CriticalLineGrid contour(40.0, 1201);
    auto zero = HalfLineFunction(g);
    CHECK(unitarity_defect(zero, contour) == 0.0);
    std::vector<std::function<cplx(double)>> suite = {
        [](double x) { return cplx(std::exp(-x), 0.0); },
        [](double x) { return cplx(x * std::exp(-x), 0.0); },
        [](double x) { return cplx(x * x * std::exp(-2.0 * x), 0.0); },
        [](double x) { return cplx(std::sqrt(x) * std::exp(-1.5 * x), 0.0); },
        [](double x) { return cplx(std::exp(-x - 1.0 / x), 0.0); },
    };
    for (const auto& fn : suite) {
        auto f = sample(g, fn);
        CHECK(unitarity_defect(f, contour) < 1e-6);
    }
    // analytic left sides for the first two
    auto f0 = sample(g, suite[0]);
    CHECK(norm(f0) * norm(f0) == doctest::Approx(0.5).epsilon(1e-8));
    auto f1 = sample(g, suite[1]);
    CHECK(norm(f1) * norm(f1) == doctest::Approx(0.25).epsilon(1e-8));
}

TEST_CASE("mixed symbol transform: separable products") {
    LogGrid ag = make_log_grid(1e-18, 60.0, 2048);
    UniformGrid bg(-8.0, 8.0, 257);
    CriticalLineGrid contour(15.0, 301);
    UniformGrid xi(-8.0, 8.0, 129);
    for (double lam : {1.0, 2.0}) {
        AffineSymbol W = sample_symbol(
            ag, bg, [&](double a, double b) { return cplx(std::exp(-lam * a - b * b), 0.0); });
        MellinSpectrum spec = symbol_mellin(W, contour, xi);
        double sup = 0.0, worst = 0.0;
        for (int i = 0; i < contour.size(); ++i)
            for (int k = 0; k < xi.size(); ++k) {
                cplx s = contour.s(i);
                double q = xi.point(k);
                cplx expect = std::exp(-s * std::log(lam) + log_gamma(s)) *
                              std::sqrt(M_PI) * std::exp(-q * q / 4.0);
                sup = std::max(sup, std::abs(expect));
                worst = std::max(worst, std::abs(spec.at(i, k) - expect));
            }
        CHECK(worst / sup < 1e-6);
    }
}

TEST_CASE("mixed transform of a b-independent window concentrates at zero frequency") {
    LogGrid ag = make_log_grid(1e-18, 60.0, 1024);
    UniformGrid bg(-4.0, 4.0, 257);
    AffineSymbol W = sample_symbol(ag, bg, [](double a, double) { return cplx(std::exp(-a), 0.0); });
    CriticalLineGrid contour(5.0, 51);
    UniformGrid xi(-10.0, 10.0, 201);
    MellinSpectrum spec = symbol_mellin(W, contour, xi, 1.0); // decay check off in b
    int i0 = contour.size() / 2;
    double at0 = std::abs(spec.at(i0, xi.size() / 2));
    double far = 0.0;
    for (int k = 0; k < xi.size(); ++k)
        if (std::abs(xi.point(k)) > 3.0) far = std::max(far, std::abs(spec.at(i0, k)));
    CHECK(far < 0.2 * at0);
}

TEST_CASE("xi inversion recovers the direct slices") {
    LogGrid ag = make_log_grid(1e-18, 60.0, 1024);
    UniformGrid bg(-8.0, 8.0, 257);
    AffineSymbol W = sample_symbol(ag, bg, [](double a, double b) {
        return cplx(std::exp(-a - 0.5 / a) * std::exp(-b * b) * (1.0 + 0.3 * b), 0.0);
    });
    CriticalLineGrid contour(10.0, 101);
    MellinSlices direct = symbol_mellin_slices(W, contour);
    UniformGrid xi(-24.0, 24.0, 769); // wide enough for the b-resolution
    MellinSpectrum spec = symbol_mellin(W, contour, xi);
    MellinSlices back = invert_xi(spec, bg);
    double sup = 0.0, worst = 0.0;
    for (size_t k = 0; k < direct.values.size(); ++k) {
        sup = std::max(sup, std::abs(direct.values[k]));
        worst = std::max(worst, std::abs(direct.values[k] - back.values[k]));
    }
    CHECK(worst / sup < 1e-8);
}

TEST_CASE("spectrum symmetry for real symbols") {
    LogGrid ag = make_log_grid(1e-18, 60.0, 1024);
    UniformGrid bg(-8.0, 8.0, 257);
    AffineSymbol W = sample_symbol(ag, bg, [](double a, double b) {
        return cplx(std::exp(-a - 0.2 / a) * std::exp(-(b - 0.5) * (b - 0.5)), 0.0);
    });
    CriticalLineGrid contour(10.0, 101);
    UniformGrid xi(-10.0, 10.0, 201);
    MellinSpectrum spec = symbol_mellin(W, contour, xi);
    // w_M(conj s, -xi) = conj w_M(s, xi): indices mirror in both directions
    double sup = 0.0, worst = 0.0;
    for (int i = 0; i < contour.size(); ++i)
        for (int k = 0; k < xi.size(); ++k) {
            sup = std::max(sup, std::abs(spec.at(i, k)));
            cplx mirrored = spec.at(contour.size() - 1 - i, xi.size() - 1 - k);
            worst = std::max(worst, std::abs(mirrored - std::conj(spec.at(i, k))));
        }
    CHECK(worst / sup < 1e-10);
}

TEST_CASE("transforms are linear") {
    LogGrid g = wide_grid(1024);
    CriticalLineGrid contour(10.0, 101);
    auto f = sample(g, [](double x) { return cplx(std::exp(-x), 0.0); });
    auto h = sample(g, [](double x) { return cplx(x * std::exp(-2.0 * x), 0.0); });
    cplx al(0.7, -0.2), be(1.3, 0.4);
    auto fm = mellin_transform(f, contour);
    auto hm = mellin_transform(h, contour);
    auto cm = mellin_transform(al * f + be * h, contour);
    double sup = std::max(sup_abs(fm), sup_abs(hm));
    for (int i = 0; i < contour.size(); ++i)
        CHECK(std::abs(cm[i] - (al * fm[i] + be * hm[i])) < 1e-13 * sup);
}
