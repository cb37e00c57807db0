#include <doctest.h>

#include <cmath>
#include <random>

#include "halfline/grid.hpp"

using namespace halfline;

TEST_CASE("log grid construction") {
    LogGrid g = make_log_grid(1.0, std::exp(1.0), 2);
    CHECK(g.size() == 2);
    CHECK(g.x(0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g.x(1) == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
    CHECK(g.ratio() == doctest::Approx(std::exp(1.0)).epsilon(1e-14));

    LogGrid d = make_log_grid(1e-2, 1e2, 5);
    for (int j = 0; j < 5; ++j)
        CHECK(d.x(j) == doctest::Approx(std::pow(10.0, j - 2)).epsilon(1e-13));

    CHECK_THROWS_AS(make_log_grid(0.5, 0.5, 4), parameter_error);
    CHECK_THROWS_AS(make_log_grid(-1.0, 2.0, 4), parameter_error);
    CHECK_THROWS_AS(make_log_grid(1.0, 2.0, 1), parameter_error);
}

TEST_CASE("log grid closure under x -> c/x") {
    LogGrid g = make_log_grid(1e-4, 40.0, 2048);
    double c = g.x_min() * g.x_max();
    for (int j = 0; j < g.size(); j += 97)
        CHECK(g.x(g.size() - 1 - j) == doctest::Approx(c / g.x(j)).epsilon(1e-12));
    // exactness on the exponents
    for (int j = 0; j < g.size(); j += 131)
        CHECK(g.u(0) + g.u(g.size() - 1) - g.u(j) ==
              doctest::Approx(g.u(g.size() - 1 - j)).epsilon(1e-14));
}

static LogGrid desk_grid() { return make_log_grid(1e-4, 40.0, 2048); }

TEST_CASE("inner products of exponential states") {
    LogGrid g = desk_grid();
    auto e1 = sample(g, [](double x) { return cplx(std::exp(-x), 0.0); });
    auto xe = sample(g, [](double x) { return cplx(x * std::exp(-x), 0.0); });
    auto ie = sample(g, [](double x) { return cplx(0.0, std::exp(-x)); });

    // the k = 0 integrand does not vanish at x -> 0, so the grid's support
    // carries a 1e-4 domain offset against the [0, inf) value; the
    // quadrature itself is exact to much better
    double trunc0 = 0.5 * (std::exp(-2.0 * g.x_min()) - std::exp(-2.0 * g.x_max()));
    CHECK(inner_product(e1, e1).real() == doctest::Approx(trunc0).epsilon(1e-8));
    CHECK(inner_product(e1, e1).real() == doctest::Approx(0.5).epsilon(2.1e-4));
    CHECK(inner_product(e1, xe).real() == doctest::Approx(0.25).epsilon(1e-6));
    cplx v = inner_product(e1, ie);
    CHECK(v.imag() == doctest::Approx(trunc0).epsilon(1e-8));
    CHECK(std::abs(v.real()) < 1e-12);

    LogGrid g2 = make_log_grid(1e-4, 40.0, 1024);
    auto f2 = sample(g2, [](double x) { return cplx(std::exp(-x), 0.0); });
    CHECK_THROWS_AS(inner_product(e1, f2), structural_error);
}

TEST_CASE("quadrature exactness for monomial exponentials") {
    LogGrid g = desk_grid();
    // ||x^k e^-x||^2 = Gamma(2k+1) / 2^{2k+1}; for k >= 1 the integrand
    // vanishes at both grid ends and the match is against [0, inf)
    double expected[3] = {0.5 * (std::exp(-2.0 * g.x_min()) - std::exp(-2.0 * g.x_max())), 0.25,
                          0.75};
    for (int k = 0; k <= 2; ++k) {
        auto f = sample(g, [k](double x) { return cplx(std::pow(x, k) * std::exp(-x), 0.0); });
        CHECK(inner_product(f, f).real() == doctest::Approx(expected[k]).epsilon(1e-6));
    }
}

TEST_CASE("inner product conjugate symmetry") {
    LogGrid g = make_log_grid(1e-3, 30.0, 512);
    std::mt19937 rng(7);
    std::normal_distribution<double> nd;
    HalfLineFunction f(g), h(g);
    for (int j = 0; j < g.size(); ++j) {
        double env = std::exp(-g.x(j)) * g.x(j);
        f.values[j] = cplx(nd(rng), nd(rng)) * env;
        h.values[j] = cplx(nd(rng), nd(rng)) * env;
    }
    cplx a = inner_product(f, h), b = inner_product(h, f);
    CHECK(std::abs(a - std::conj(b)) <= 1e-15 * std::abs(a));
}

TEST_CASE("apply_operator: identity, projector, orthogonal complement") {
    LogGrid g = make_log_grid(1e-3, 30.0, 512);
    auto f = sample(g, [](double x) { return cplx(x * std::exp(-0.7 * x), 0.0); });
    OperatorMatrix id = identity_kernel(g);
    HalfLineFunction idf = apply_operator(id, f);
    for (int j = 0; j < g.size(); j += 41)
        CHECK(std::abs(idf.values[j] - f.values[j]) < 1e-12 * (1.0 + std::abs(f.values[j])));

    auto graw = sample(g, [](double x) { return cplx(std::exp(-x) * (1.0 + x * x), 0.0); });
    HalfLineFunction gn = (1.0 / norm(graw)) * graw;
    OperatorMatrix proj = rank_one(gn);
    HalfLineFunction pg = apply_operator(proj, gn);
    CHECK(norm(pg - gn) < 1e-10);

    // Gram-Schmidt: f_perp = f - <g,f> g
    HalfLineFunction fperp = f - inner_product(gn, f) * gn;
    CHECK(norm(apply_operator(proj, fperp)) <= 1e-8 * norm(fperp));
}

TEST_CASE("apply_operator linearity") {
    LogGrid g = make_log_grid(1e-3, 30.0, 256);
    std::mt19937 rng(11);
    std::normal_distribution<double> nd;
    OperatorMatrix W(g);
    for (int i = 0; i < g.size(); ++i)
        for (int j = 0; j < g.size(); ++j)
            W.at(i, j) = cplx(nd(rng), nd(rng)) * std::exp(-0.01 * (i - j) * (i - j));
    auto f = sample(g, [](double x) { return cplx(std::exp(-x), x * std::exp(-2 * x)); });
    auto h = sample(g, [](double x) { return cplx(std::sin(x) * std::exp(-x), 0.0); });
    cplx alpha(0.3, -1.1), beta(2.0, 0.7);
    HalfLineFunction lhs = apply_operator(W, alpha * f + beta * h);
    HalfLineFunction rhs = alpha * apply_operator(W, f) + beta * apply_operator(W, h);
    double bound = std::abs(alpha) * norm(apply_operator(W, f)) +
                   std::abs(beta) * norm(apply_operator(W, h));
    CHECK(norm(lhs - rhs) <= 1e-12 * bound);
}

TEST_CASE("trace of projectors and identity kernel") {
    LogGrid g = make_log_grid(1e-3, 30.0, 512);
    auto g1raw = sample(g, [](double x) { return cplx(x * std::exp(-x), 0.0); });
    HalfLineFunction g1 = (1.0 / norm(g1raw)) * g1raw;
    auto g2raw = sample(g, [](double x) { return cplx(x * x * std::exp(-1.3 * x), 0.0); });
    HalfLineFunction g2 = g2raw - inner_product(g1, g2raw) * g1;
    g2 = (1.0 / norm(g2)) * g2;

    CHECK(trace(rank_one(g1)).real() == doctest::Approx(1.0).epsilon(1e-10));
    OperatorMatrix two = rank_one(g1) + rank_one(g2);
    CHECK(trace(two).real() == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(trace(identity_kernel(g)).real() == doctest::Approx((double)g.size()).epsilon(1e-12));
}

TEST_CASE("adjoint entry relation") {
    LogGrid g = make_log_grid(1e-2, 10.0, 64);
    std::mt19937 rng(3);
    std::normal_distribution<double> nd;
    OperatorMatrix W(g);
    for (auto& e : W.entries) e = cplx(nd(rng), nd(rng));
    OperatorMatrix A = adjoint(W);
    for (int i = 0; i < g.size(); i += 7)
        for (int j = 0; j < g.size(); j += 5)
            CHECK(A.at(i, j) == std::conj(W.at(j, i)));
}

TEST_CASE("interpolation: accuracy inside, zero outside") {
    LogGrid g = desk_grid();
    auto f = sample(g, [](double x) { return cplx(x * std::exp(-x), 0.0); });
    for (double x : {0.013, 0.77, 1.9, 5.3, 17.0}) {
        double exact = x * std::exp(-x);
        CHECK(std::abs(value_at(f, x) - exact) < 1e-9 * (1.0 + exact));
    }
    CHECK(value_at(f, 1e-5) == cplx(0.0));
    CHECK(value_at(f, 100.0) == cplx(0.0));
    CHECK(value_at(f, -1.0) == cplx(0.0));
}
