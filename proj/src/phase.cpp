#include "halfline/phase.hpp"

#include <algorithm>
#include <cmath>

#include "halfline/special.hpp"

namespace halfline {

namespace {

// log-space amplitude of phi_{a,0}: C(hb) a^{1/h+1/2} x^{1/h} e^{-a x/h}
void coherent_profile(double a, const PlanckScale& hb, const LogGrid& g, double* out) {
    double h = hb.hbar;
    double lc = coherent_norm_log(hb) + (1.0 / h + 0.5) * std::log(a);
    for (int j = 0; j < g.size(); ++j) {
        double lx = g.u(j);
        double le = lc + lx / h - a * g.x(j) / h;
        out[j] = (le < -745.0) ? 0.0 : std::exp(le);
    }
}

} // namespace

CoherentState coherent_state(const PhasePoint& p, const PlanckScale& hb, const LogGrid& grid) {
    double peak = 1.0 / p.a;
    if (peak < 10.0 * grid.x_min() || peak > grid.x_max() / 10.0)
        throw resolution_error("coherent_state: peak x* = 1/a not resolved by the grid");
    HalfLineFunction f(grid);
    std::vector<double> amp(grid.size());
    coherent_profile(p.a, hb, grid, amp.data());
    for (int j = 0; j < grid.size(); ++j)
        f.values[j] = amp[j] * std::polar(1.0, p.b * grid.x(j) / hb.hbar);
    return CoherentState{p, hb, std::move(f)};
}

CoherentBank::CoherentBank(const LogGrid& grid, const PlanckScale& hb,
                           const std::vector<double>& a_values)
    : grid_(grid), a_values_(a_values), profiles_((size_t)a_values.size() * grid.size()) {
    for (size_t ia = 0; ia < a_values_.size(); ++ia)
        coherent_profile(a_values_[ia], hb, grid_, &profiles_[ia * grid_.size()]);
}

double identity_resolution_defect(const HalfLineFunction& probe, const PhaseWindow& window,
                                  const PlanckScale& hb) {
    const LogGrid& g = probe.grid;
    int n = g.size();
    double h = hb.hbar;
    double xs = window.x_support > 0.0 ? window.x_support : upper_support(probe);

    double la_lo = std::log(window.a_min), la_hi = std::log(window.a_max);
    double dla = (la_hi - la_lo) / (window.n_a - 1);

    std::vector<double> amp(n);
    std::vector<cplx> rec(n, cplx(0.0));
    std::vector<cplx> qprobe(n); // conj(profile)*w*probe reused per row
    double boundary = 0.0, interior = 0.0;

    for (int ia = 0; ia < window.n_a; ++ia) {
        double a = std::exp(la_lo + ia * dla);
        coherent_profile(a, hb, g, amp.data());
        // b-step: resolve oscillations against the joint support of the
        // profile and the probe
        double x_amp = 1.0 / a * 40.0; // profile decays ~ e^{-a x / h} past x ~ 1/a
        double x_eff = std::min({g.x_max(), xs, std::max(x_amp, 1.0 / a)});
        double B = window.b_factor * (1.0 + a);
        double db_need = M_PI * h / std::max(x_eff, 1e-12) * 0.5;
        int nb = 2 * std::max(40, (int)std::ceil(B / db_need)) + 1;
        double db = 2.0 * B / (nb - 1);
        double wa = ((ia == 0 || ia == window.n_a - 1) ? 0.5 : 1.0) * dla / a; // da db/a^2
        for (int j = 0; j < n; ++j) qprobe[j] = amp[j] * g.weight(j) * probe.values[j];
        // overlap(b) = sum_j e^{-i b x_j/h} qprobe_j; then
        // rec += phi_{a,b} * overlap(b) * weights
        std::vector<cplx> cur(n), rot(n);
        for (int j = 0; j < n; ++j) {
            cur[j] = std::polar(1.0, B * g.x(j) / h); // e^{-i b x/h} at b = -B
            rot[j] = std::polar(1.0, -db * g.x(j) / h);
        }
        for (int ib = 0; ib < nb; ++ib) {
            double wb = (ib == 0 || ib == nb - 1) ? 0.5 * db : db;
            cplx ov(0.0);
            for (int j = 0; j < n; ++j) ov += cur[j] * qprobe[j];
            double wgt = wa * wb;
            cplx f = ov * wgt;
            for (int j = 0; j < n; ++j) rec[j] += amp[j] * std::conj(cur[j]) * f;
            double mass = std::norm(ov) * wgt;
            if (ia == 0 || ia == window.n_a - 1 || ib == 0 || ib == nb - 1)
                boundary += mass;
            else
                interior += mass;
            for (int j = 0; j < n; ++j) cur[j] *= rot[j];
        }
    }
    if (interior > 0.0 && boundary / interior > 1e-3)
        throw coverage_error("identity_resolution_defect: window boundary carries too much "
                             "overlap mass",
                             boundary / interior);
    double num = 0.0, den = 0.0;
    const double inv = 1.0 / (2.0 * M_PI * h);
    for (int j = 0; j < n; ++j) {
        num += std::norm(rec[j] * inv - probe.values[j]) * g.weight(j);
        den += std::norm(probe.values[j]) * g.weight(j);
    }
    return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

AffineSymbol affine_wigner(const HalfLineFunction& psi, const LogGrid& a_targets,
                           const UniformGrid& b_targets, const PlanckScale& hb) {
    const LogGrid& g = psi.grid;
    int n = g.size(), na = a_targets.size(), nb = b_targets.size();
    AffineSymbol out(a_targets, b_targets);
    double h = hb.hbar;
#pragma omp parallel for schedule(static)
    for (int ia = 0; ia < na; ++ia) {
        double a = a_targets.x(ia);
        std::vector<cplx> tj(n);
        std::vector<double> cj(n);
        for (int j = 0; j < n; ++j) {
            double x = g.x(j);
            double ystar = 1.0 / (a * a * x);
            cj[j] = x - ystar;
            tj[j] = c_multiplier(a, x) * std::conj(psi.values[j]) * value_at(psi, ystar) *
                    g.weight(j) / h;
        }
        std::vector<cplx> cur(n), rot(n);
        for (int j = 0; j < n; ++j) {
            cur[j] = std::polar(1.0, -b_targets.lo() * cj[j] / h);
            rot[j] = std::polar(1.0, -b_targets.step() * cj[j] / h);
        }
        for (int ib = 0; ib < nb; ++ib) {
            cplx s(0.0);
            for (int j = 0; j < n; ++j) {
                s += tj[j] * cur[j];
                cur[j] *= rot[j];
            }
            out.at(ia, ib) = s;
        }
    }
    return out;
}

HusimiField husimi_pure(const HalfLineFunction& psi, const LogGrid& a_targets,
                        const UniformGrid& b_targets, const PlanckScale& hb) {
    const LogGrid& g = psi.grid;
    int n = g.size(), na = a_targets.size(), nb = b_targets.size();
    HusimiField out(a_targets, b_targets);
    double h = hb.hbar;
#pragma omp parallel for schedule(static)
    for (int ia = 0; ia < na; ++ia) {
        std::vector<double> amp(n);
        coherent_profile(a_targets.x(ia), hb, g, amp.data());
        std::vector<cplx> qj(n), cur(n), rot(n);
        for (int j = 0; j < n; ++j) {
            qj[j] = amp[j] * g.weight(j) * psi.values[j];
            cur[j] = std::polar(1.0, -b_targets.lo() * g.x(j) / h);
            rot[j] = std::polar(1.0, -b_targets.step() * g.x(j) / h);
        }
        for (int ib = 0; ib < nb; ++ib) {
            cplx ov(0.0);
            for (int j = 0; j < n; ++j) {
                ov += qj[j] * cur[j];
                cur[j] *= rot[j];
            }
            out.at(ia, ib) = std::norm(ov) / h;
        }
    }
    return out;
}

HusimiField husimi_operator(const OperatorMatrix& Wop, const LogGrid& a_targets,
                            const UniformGrid& b_targets, const PlanckScale& hb) {
    const LogGrid& g = Wop.grid;
    int n = g.size(), na = a_targets.size(), nb = b_targets.size();
    HusimiField out(a_targets, b_targets);
    double h = hb.hbar;
    for (int ia = 0; ia < na; ++ia) {
        std::vector<double> amp(n);
        coherent_profile(a_targets.x(ia), hb, g, amp.data());
        // A[i][j] = K[i][j] w_j amp_j, E[j][ib] = e^{i b x_j / h}
        std::vector<cplx> A((size_t)n * n), E((size_t)n * nb), V((size_t)n * nb);
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) {
            const cplx* row = &Wop.entries[(size_t)i * n];
            cplx* arow = &A[(size_t)i * n];
            for (int j = 0; j < n; ++j) arow[j] = row[j] * g.weight(j) * amp[j];
        }
        for (int j = 0; j < n; ++j) {
            cplx cur = std::polar(1.0, b_targets.lo() * g.x(j) / h);
            cplx rot = std::polar(1.0, b_targets.step() * g.x(j) / h);
            cplx* erow = &E[(size_t)j * nb];
            for (int ib = 0; ib < nb; ++ib) {
                erow[ib] = cur;
                cur *= rot;
            }
        }
        detail::zgemm_nn(n, nb, n, A.data(), E.data(), V.data());
        for (int ib = 0; ib < nb; ++ib) {
            cplx v(0.0);
            for (int i = 0; i < n; ++i)
                v += std::conj(amp[i] * E[(size_t)i * nb + ib]) * g.weight(i) * V[(size_t)i * nb + ib];
            out.at(ia, ib) = v.real() / h;
        }
    }
    return out;
}

cplx cross_matrix_element(const PhasePoint& p1, const PhasePoint& p2, const OperatorMatrix& Wop,
                          const PlanckScale& hb) {
    CoherentState c1 = coherent_state(p1, hb, Wop.grid);
    CoherentState c2 = coherent_state(p2, hb, Wop.grid);
    return inner_product(c1.state, apply_operator(Wop, c2.state));
}

cplx cross_matrix_element_mellin(const PhasePoint& p1, const PhasePoint& p2,
                                 const MellinSlices& wM, const PlanckScale& hb) {
    double h = hb.hbar;
    int m = wM.contour.size(), nb = wM.b_grid.size();
    // per-contour-point log Gamma(k)^2
    cplx sum(0.0);
    for (int i = 0; i < m; ++i) {
        cplx k = wM.contour.s(i) * 0.5 + cplx(1.0 / h + 1.0, 0.0);
        cplx lg2 = 2.0 * log_gamma(k);
        cplx inner(0.0);
        for (int ib = 0; ib < nb; ++ib) {
            double bp = wM.b_grid.point(ib);
            cplx z1(p1.a, p1.b - bp);
            cplx z2(p2.a, -(p2.b - bp));
            cplx L = std::log(z1) + std::log(z2) - 2.0 * std::log(h);
            inner += std::exp(lg2 - k * L) * wM.at(i, ib) * wM.b_grid.weight(ib);
        }
        sum += inner * wM.contour.weight(i);
    }
    double lpref = coherent_norm_log(hb) * 2.0 + (1.0 / h + 0.5) * std::log(p1.a * p2.a);
    double pref = std::exp(lpref) / std::sqrt(2.0 * M_PI * h) / (2.0 * M_PI);
    return pref * sum;
}

HusimiField husimi_from_mellin(const MellinSpectrum& wM, const LogGrid& a_targets,
                               const UniformGrid& b_targets, const PlanckScale& hb) {
    double h = hb.hbar;
    int m = wM.contour.size();
    // slice grid: same step as the targets (difference lattice stays uniform),
    // covering the alias-safe reconstruction range then trimmed to where the
    // slices actually carry mass
    double halfspan = M_PI / wM.xi_grid.step() * 0.75;
    double db = b_targets.step();
    int nbp = 2 * (int)std::ceil(halfspan / db) + 1;
    UniformGrid b_slices(-db * ((nbp - 1) / 2), db * ((nbp - 1) / 2), nbp);
    MellinSlices slices = invert_xi(wM, b_slices);
    {
        double smax = 0.0;
        for (const cplx& v : slices.values) smax = std::max(smax, std::abs(v));
        int lo = 0, hi = nbp - 1;
        auto col_mass = [&](int k) {
            double c = 0.0;
            for (int i = 0; i < m; ++i) c = std::max(c, std::abs(slices.at(i, k)));
            return c;
        };
        while (lo < hi - 8 && col_mass(lo) < 1e-13 * smax) ++lo;
        while (hi > lo + 8 && col_mass(hi) < 1e-13 * smax) --hi;
        if (lo > 0 || hi < nbp - 1) {
            int nkeep = hi - lo + 1;
            MellinSlices trimmed;
            trimmed.contour = slices.contour;
            trimmed.b_grid = UniformGrid(b_slices.point(lo), b_slices.point(hi), nkeep);
            trimmed.values.resize((size_t)m * nkeep);
            for (int i = 0; i < m; ++i)
                for (int k = 0; k < nkeep; ++k) trimmed.values[(size_t)i * nkeep + k] = slices.at(i, lo + k);
            slices = std::move(trimmed);
            b_slices = slices.b_grid;
            nbp = nkeep;
        }
    }

    int na = a_targets.size(), nb = b_targets.size();
    HusimiField out(a_targets, b_targets);

    // Gamma(k)^2 per contour point
    std::vector<cplx> lg2(m), kvec(m);
    for (int i = 0; i < m; ++i) {
        kvec[i] = wM.contour.s(i) * 0.5 + cplx(1.0 / h + 1.0, 0.0);
        lg2[i] = 2.0 * log_gamma(kvec[i]);
    }

    // difference lattice b - b' spans [b_lo - bp_hi, b_hi - bp_lo]
    int ndiff = nb + nbp - 1;
    double diff0 = b_targets.lo() - b_slices.hi();

#pragma omp parallel for schedule(static)
    for (int ia = 0; ia < na; ++ia) {
        double a = a_targets.x(ia);
        double lpref = 2.0 * coherent_norm_log(hb) + (2.0 / h + 1.0) * std::log(a);
        double pref = std::exp(lpref) / h / std::sqrt(2.0 * M_PI * h) / (2.0 * M_PI);
        // E[i][d] = exp(2 lgG(k_i) - k_i L(d)), L = log((a^2 + diff^2)/h^2)
        std::vector<cplx> E((size_t)m * ndiff);
        for (int d = 0; d < ndiff; ++d) {
            double diff = diff0 + d * db;
            double L = std::log((a * a + diff * diff) / (h * h));
            for (int i = 0; i < m; ++i) E[(size_t)i * ndiff + d] = std::exp(lg2[i] - kvec[i] * L);
        }
        for (int ib = 0; ib < nb; ++ib) {
            // b - b'_k = diff0 + (ib + nbp - 1 - k) db
            cplx acc(0.0);
            for (int i = 0; i < m; ++i) {
                const cplx* Er = &E[(size_t)i * ndiff + ib + nbp - 1];
                const cplx* Sr = &slices.values[(size_t)i * nbp];
                cplx inner(0.0);
                for (int k = 0; k < nbp; ++k) inner += Er[-k] * Sr[k] * b_slices.weight(k);
                acc += inner * wM.contour.weight(i);
            }
            out.at(ia, ib) = pref * acc.real();
        }
    }
    return out;
}

UniformGrid symbol_translation_window(const LogGrid& grid, double x_support, double hbar,
                                      double cap, double step_hint) {
    double B = std::min(cap, 0.75 * M_PI * hbar / (x_support * grid.log_step()));
    int nb = 2 * std::max(32, (int)std::ceil(B / step_hint)) + 1;
    return UniformGrid(-B, B, nb);
}

cplx continuation_prefactor(const PhasePoint& p, const ComplexDisplacement& d,
                            const PlanckScale& hb) {
    double h = hb.hbar;
    if (!(p.a + 2.0 * d.alpha > 0.0))
        throw domain_error("husimi_continuation: requires a + 2 alpha > 0");
    cplx mid(p.a + d.alpha, d.beta);
    double lmod = (1.0 / h + 0.5) * std::log((p.a + 2.0 * d.alpha) * p.a);
    return std::exp((2.0 / h + 1.0) * std::log(mid) - lmod);
}

cplx husimi_continuation(const PhasePoint& p, const ComplexDisplacement& d,
                         const OperatorMatrix& Wop, const PlanckScale& hb) {
    cplx q = continuation_prefactor(p, d, hb);
    PhasePoint shifted(p.a + 2.0 * d.alpha, p.b + 2.0 * d.beta);
    return q * cross_matrix_element(shifted, p, Wop, hb);
}

namespace {

// shared cone-window sweep: accumulates sum over the window of
// fn(a, b) * (da db / a^2) with the Nyquist-controlled b sampling
template <typename F>
void cone_sweep(const PhaseWindow& window, const PlanckScale& hb, double x_support, F&& fn) {
    double la_lo = std::log(window.a_min), la_hi = std::log(window.a_max);
    double dla = (la_hi - la_lo) / (window.n_a - 1);
    for (int ia = 0; ia < window.n_a; ++ia) {
        double a = std::exp(la_lo + ia * dla);
        double x_eff = std::min(x_support, std::max(40.0 / a, 1.0 / a));
        double B = window.b_factor * (1.0 + a);
        double db_need = M_PI * hb.hbar / std::max(x_eff, 1e-12) * 0.5;
        int nb = 2 * std::max(40, (int)std::ceil(B / db_need)) + 1;
        double db = 2.0 * B / (nb - 1);
        double wa = ((ia == 0 || ia == window.n_a - 1) ? 0.5 : 1.0) * dla / a;
        for (int ib = 0; ib < nb; ++ib) {
            double b = -B + ib * db;
            double wb = (ib == 0 || ib == nb - 1) ? 0.5 * db : db;
            fn(a, b, wa * wb);
        }
    }
}

} // namespace

double husimi_window_mass(const HalfLineFunction& psi, const PhaseWindow& window,
                          const PlanckScale& hb) {
    const LogGrid& g = psi.grid;
    int n = g.size();
    double h = hb.hbar;
    double xs = window.x_support > 0.0 ? window.x_support : upper_support(psi);
    double total = 0.0;
    std::vector<double> amp(n);
    double a_last = -1.0;
    cone_sweep(window, hb, xs, [&](double a, double b, double w) {
        if (a != a_last) {
            coherent_profile(a, hb, g, amp.data());
            a_last = a;
        }
        cplx ov(0.0);
        for (int j = 0; j < n; ++j)
            ov += amp[j] * std::polar(g.weight(j), -b * g.x(j) / h) * psi.values[j];
        total += std::norm(ov) / h * w;
    });
    return total / (2.0 * M_PI);
}

cplx wigner_window_integral(const HalfLineFunction& psi, const PhaseWindow& window,
                            const PlanckScale& hb) {
    const LogGrid& g = psi.grid;
    int n = g.size();
    double h = hb.hbar;
    double xs = window.x_support > 0.0 ? window.x_support : upper_support(psi);
    cplx total(0.0);
    std::vector<cplx> tj(n);
    std::vector<double> cj(n);
    double a_last = -1.0;
    cone_sweep(window, hb, xs, [&](double a, double b, double w) {
        if (a != a_last) {
            for (int j = 0; j < n; ++j) {
                double x = g.x(j);
                double ystar = 1.0 / (a * a * x);
                cj[j] = x - ystar;
                tj[j] = c_multiplier(a, x) * std::conj(psi.values[j]) * value_at(psi, ystar) *
                        g.weight(j) / h;
            }
            a_last = a;
        }
        cplx s(0.0);
        for (int j = 0; j < n; ++j) s += tj[j] * std::polar(1.0, -b * cj[j] / h);
        total += s * w;
    });
    return total;
}

} // namespace halfline
