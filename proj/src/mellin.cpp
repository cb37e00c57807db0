#include "halfline/mellin.hpp"

#include <algorithm>
#include <cmath>

#include "halfline/affine.hpp"

namespace halfline {

CriticalLineGrid::CriticalLineGrid(double tau_max, int m) {
    if (!(tau_max > 0.0)) throw parameter_error("CriticalLineGrid requires tau_max > 0");
    if (m < 3 || m % 2 == 0) throw parameter_error("CriticalLineGrid requires odd m >= 3");
    m_ = m;
    tau_max_ = tau_max;
    step_ = 2.0 * tau_max / (m - 1);
}

namespace {

// sum_j q_j e^{i tau u_j} on the uniform u-lattice via a phase recurrence,
// compensated accumulation.
cplx phase_sum(const std::vector<cplx>& q, double u0, double du, double tau) {
    cplx rot = std::polar(1.0, tau * du);
    cplx ph = std::polar(1.0, tau * u0);
    cplx sum(0.0), comp(0.0);
    for (const cplx& qj : q) {
        cplx term = qj * ph - comp;
        cplx t = sum + term;
        comp = (t - sum) - term;
        sum = t;
        ph *= rot;
    }
    return sum;
}

} // namespace

std::vector<cplx> mellin_transform(const HalfLineFunction& f, const CriticalLineGrid& contour,
                                   double decay_tol) {
    const LogGrid& g = f.grid;
    int n = g.size();
    // integrand of int x^{s-1} f dx in the log variable: e^{u/2} f(e^u)
    std::vector<cplx> q(n);
    double peak = 0.0;
    for (int j = 0; j < n; ++j) {
        q[j] = f.values[j] * g.weight(j) / std::sqrt(g.x(j));
        peak = std::max(peak, std::abs(f.values[j]) * std::sqrt(g.x(j)));
    }
    double lo = std::abs(f.values[0]) * std::sqrt(g.x(0));
    double hi = std::abs(f.values[n - 1]) * std::sqrt(g.x(n - 1));
    if (peak > 0.0 && std::max(lo, hi) > decay_tol * peak)
        throw accuracy_error("mellin_transform: integrand not decayed at grid endpoints",
                             std::max(lo, hi) / peak);
    std::vector<cplx> out(contour.size());
    for (int i = 0; i < contour.size(); ++i) out[i] = phase_sum(q, g.u(0), g.log_step(), contour.tau(i));
    return out;
}

HalfLineFunction inverse_mellin(const std::vector<cplx>& spectrum, const CriticalLineGrid& contour,
                                const LogGrid& grid, double decay_tol) {
    if ((int)spectrum.size() != contour.size())
        throw structural_error("inverse_mellin: spectrum size does not match contour");
    double peak = 0.0;
    for (const cplx& v : spectrum) peak = std::max(peak, std::abs(v));
    double ends = std::max(std::abs(spectrum.front()), std::abs(spectrum.back()));
    if (peak > 0.0 && ends > decay_tol * peak)
        throw accuracy_error("inverse_mellin: spectrum not decayed at contour truncation",
                             ends / peak);
    HalfLineFunction f(grid);
    int m = contour.size();
    const double inv2pi = 1.0 / (2.0 * M_PI);
    for (int j = 0; j < grid.size(); ++j) {
        double u = grid.u(j);
        cplx sum(0.0), comp(0.0);
        for (int i = 0; i < m; ++i) {
            // x^{-s} = e^{-u/2} e^{-i tau u}
            cplx term = spectrum[i] * std::polar(contour.weight(i), -contour.tau(i) * u) - comp;
            cplx t = sum + term;
            comp = (t - sum) - term;
            sum = t;
        }
        f.values[j] = sum * inv2pi / std::sqrt(grid.x(j));
    }
    return f;
}

double unitarity_defect(const HalfLineFunction& f, const CriticalLineGrid& contour) {
    std::vector<cplx> fm = mellin_transform(f, contour);
    double lhs = norm(f);
    lhs *= lhs;
    double rhs = 0.0;
    for (int i = 0; i < contour.size(); ++i) rhs += std::norm(fm[i]) * contour.weight(i);
    rhs /= 2.0 * M_PI;
    return std::abs(lhs - rhs);
}

MellinSlices symbol_mellin_slices(const AffineSymbol& W, const CriticalLineGrid& contour,
                                  double decay_tol) {
    const LogGrid& ag = W.a_grid;
    int na = ag.size(), nb = W.b_grid.size(), m = contour.size();
    // decay checks in both variables
    double peak = 0.0, a_edge = 0.0, b_edge = 0.0;
    for (int ia = 0; ia < na; ++ia)
        for (int ib = 0; ib < nb; ++ib) {
            double v = std::abs(W.at(ia, ib)) * std::sqrt(ag.x(ia));
            peak = std::max(peak, v);
            if (ia == 0 || ia == na - 1) a_edge = std::max(a_edge, v);
            if (ib == 0 || ib == nb - 1) b_edge = std::max(b_edge, v);
        }
    if (peak > 0.0 && std::max(a_edge, b_edge) > decay_tol * peak)
        throw accuracy_error("symbol_mellin: symbol not decayed at grid boundary",
                             std::max(a_edge, b_edge) / peak);

    MellinSlices out;
    out.contour = contour;
    out.b_grid = W.b_grid;
    out.values.assign((size_t)m * nb, cplx(0.0));
    std::vector<cplx> q(na);
    for (int ib = 0; ib < nb; ++ib) {
        for (int ia = 0; ia < na; ++ia)
            q[ia] = W.at(ia, ib) * ag.weight(ia) / std::sqrt(ag.x(ia));
        for (int i = 0; i < m; ++i)
            out.at(i, ib) = phase_sum(q, ag.u(0), ag.log_step(), contour.tau(i));
    }
    return out;
}

MellinSpectrum symbol_mellin(const AffineSymbol& W, const CriticalLineGrid& contour,
                             const UniformGrid& xi_grid, double decay_tol) {
    MellinSlices slices = symbol_mellin_slices(W, contour, decay_tol);
    int m = contour.size(), nb = W.b_grid.size(), nxi = xi_grid.size();
    MellinSpectrum out;
    out.contour = contour;
    out.xi_grid = xi_grid;
    out.values.assign((size_t)m * nxi, cplx(0.0));
    for (int i = 0; i < m; ++i) {
        for (int k = 0; k < nxi; ++k) {
            double xi = xi_grid.point(k);
            cplx rot = std::polar(1.0, -xi * W.b_grid.step());
            cplx ph = std::polar(1.0, -xi * W.b_grid.lo());
            cplx sum(0.0);
            for (int ib = 0; ib < nb; ++ib) {
                sum += slices.at(i, ib) * W.b_grid.weight(ib) * ph;
                ph *= rot;
            }
            out.at(i, k) = sum;
        }
    }
    return out;
}

MellinSlices invert_xi(const MellinSpectrum& spec, const UniformGrid& b_grid) {
    int m = spec.contour.size(), nxi = spec.xi_grid.size(), nb = b_grid.size();
    MellinSlices out;
    out.contour = spec.contour;
    out.b_grid = b_grid;
    out.values.assign((size_t)m * nb, cplx(0.0));
    const double inv2pi = 1.0 / (2.0 * M_PI);
    for (int i = 0; i < m; ++i) {
        for (int ib = 0; ib < nb; ++ib) {
            double b = b_grid.point(ib);
            cplx rot = std::polar(1.0, b * spec.xi_grid.step());
            cplx ph = std::polar(1.0, b * spec.xi_grid.lo());
            cplx sum(0.0);
            for (int k = 0; k < nxi; ++k) {
                sum += spec.at(i, k) * spec.xi_grid.weight(k) * ph;
                ph *= rot;
            }
            out.at(i, ib) = sum * inv2pi;
        }
    }
    return out;
}

} // namespace halfline
