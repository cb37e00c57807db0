#include "halfline/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#define LAPACK_COMPLEX_CPP
#include <lapacke.h>

#include "halfline/special.hpp"

namespace halfline {

PropagationPlan::PropagationPlan(const OperatorMatrix& H, const PlanckScale& hb, double herm_tol)
    : grid_(H.grid), hb_(hb) {
    double defect = hermiticity_defect(H);
    if (!(defect <= herm_tol))
        throw validity_error("PropagationPlan: kernel is not Hermitian within tolerance", defect);
    int n = grid_.size();
    sqw_.resize(n);
    for (int j = 0; j < n; ++j) sqw_[j] = std::sqrt(grid_.weight(j));
    vectors_.resize((size_t)n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) vectors_[(size_t)i * n + j] = sqw_[i] * H.at(i, j) * sqw_[j];
    eigenvalues_.resize(n);
    lapack_int info = LAPACKE_zheevd(LAPACK_ROW_MAJOR, 'V', 'U', n,
                                     reinterpret_cast<lapack_complex_double*>(vectors_.data()), n,
                                     eigenvalues_.data());
    if (info != 0) throw error("PropagationPlan: eigendecomposition failed");
}

HalfLineFunction PropagationPlan::eigenstate(int r) const {
    int n = grid_.size();
    HalfLineFunction f(grid_);
    for (int i = 0; i < n; ++i) f.values[i] = vectors_[(size_t)i * n + r] / sqw_[i];
    return f;
}

HalfLineFunction PropagationPlan::propagate(const HalfLineFunction& psi0, double t) const {
    if (psi0.grid != grid_) throw structural_error("propagate: state grid mismatch");
    int n = grid_.size();
    std::vector<cplx> sym(n), c(n, cplx(0.0));
    for (int i = 0; i < n; ++i) sym[i] = sqw_[i] * psi0.values[i];
    // c = Q^dagger sym
    for (int r = 0; r < n; ++r) {
        cplx s(0.0);
        for (int i = 0; i < n; ++i) s += std::conj(vectors_[(size_t)i * n + r]) * sym[i];
        c[r] = s * std::polar(1.0, -eigenvalues_[r] * t / hb_.hbar);
    }
    HalfLineFunction out(grid_);
    for (int i = 0; i < n; ++i) {
        cplx s(0.0);
        const cplx* row = &vectors_[(size_t)i * n];
        for (int r = 0; r < n; ++r) s += row[r] * c[r];
        out.values[i] = s / sqw_[i];
    }
    return out;
}

double PropagationPlan::energy(const HalfLineFunction& psi) const {
    if (psi.grid != grid_) throw structural_error("energy: state grid mismatch");
    int n = grid_.size();
    double e = 0.0;
    for (int r = 0; r < n; ++r) {
        cplx s(0.0);
        for (int i = 0; i < n; ++i)
            s += std::conj(vectors_[(size_t)i * n + r]) * sqw_[i] * psi.values[i];
        e += eigenvalues_[r] * std::norm(s);
    }
    return e;
}

HalfLineFunction propagate(const PropagationPlan& plan, const HalfLineFunction& psi0, double t) {
    return plan.propagate(psi0, t);
}

double husimi_rhs_direct(const PhasePoint& p, const OperatorMatrix& Wop, const OperatorMatrix& H,
                         const PlanckScale& hb) {
    CoherentState phi = coherent_state(p, hb, Wop.grid);
    HalfLineFunction wphi = apply_operator(Wop, phi.state);
    HalfLineFunction hwphi = apply_operator(H, wphi);
    double h = hb.hbar;
    return 2.0 / (h * h) * inner_product(phi.state, hwphi).imag();
}

double husimi_rhs_direct_pure(const PhasePoint& p, const HalfLineFunction& psi,
                              const HalfLineFunction& Hpsi, const PlanckScale& hb) {
    CoherentState phi = coherent_state(p, hb, psi.grid);
    double h = hb.hbar;
    cplx v = inner_product(phi.state, Hpsi) * inner_product(psi, phi.state);
    return 2.0 / (h * h) * v.imag();
}

namespace {

// contraction core shared by the general and rank-one kernel rates:
// rate = (2/hbar^2) Im sum_{a',b'} Phi * [Q * <phi_{a'b'}, g>] * (a'/4) w_{la} w_b
// where g = W phi_p and the Phi/Q pair cancels analytically but both
// factors are evaluated as declared.
struct PhiSweep {
    // per-contour data
    std::vector<cplx> gamma_w; // w_tau * exp(2 log Gamma(k))
    double kappa0;             // Re k = 5/4 + 1/hbar
    double tau0, dtau;
    // slice data
    const MellinSlices* hM;
    double lpref; // log of C^2 (2 pi hbar)^{-1/2} (2 pi)^{-1} without a-powers
    double hbar;

    PhiSweep(const MellinSlices& slices, const PlanckScale& hb) : hM(&slices), hbar(hb.hbar) {
        int m = slices.contour.size();
        gamma_w.resize(m);
        kappa0 = 1.25 + 1.0 / hbar;
        tau0 = slices.contour.tau(0);
        dtau = slices.contour.step();
        for (int i = 0; i < m; ++i) {
            cplx k(kappa0, slices.contour.tau(i) * 0.5);
            gamma_w[i] = std::exp(2.0 * log_gamma(k)) * slices.contour.weight(i);
        }
        lpref = 2.0 * coherent_norm_log(hb) -
                std::log(std::sqrt(2.0 * M_PI * hbar) * 2.0 * M_PI);
    }

    // <phi_{p1}, H phi_{p2}> via the contour formula
    cplx cross(const PhasePoint& p1, const PhasePoint& p2) const {
        int m = hM->contour.size(), nb = hM->b_grid.size();
        cplx total(0.0);
        for (int j = 0; j < nb; ++j) {
            double bp = hM->b_grid.point(j);
            cplx z1(p1.a, p1.b - bp);
            cplx z2(p2.a, -(p2.b - bp));
            cplx S = std::log(z1) + std::log(z2) - 2.0 * std::log(hbar);
            cplx base = std::exp(-kappa0 * S) * hM->b_grid.weight(j);
            cplx ph = std::exp(cplx(0.0, -0.5 * tau0) * S);
            cplx rot = std::exp(cplx(0.0, -0.5 * dtau) * S);
            cplx acc(0.0);
            for (int i = 0; i < m; ++i) {
                acc += gamma_w[i] * hM->values[(size_t)i * nb + j] * ph;
                ph *= rot;
            }
            total += base * acc;
        }
        double lp = lpref + (1.0 / hbar + 0.5) * std::log(p1.a * p2.a);
        return std::exp(lp) * total;
    }
};

double rhs_kernel_impl(const PhasePoint& p, const HalfLineFunction& g, const MellinSlices& hM,
                       const DisplacementWindow& window, const PlanckScale& hb,
                       int hpower_variant = 2, double slice_bsign = 1.0, int apower = 2) {
    // g = W phi_p; the continued Husimi factor is Q <phi_{a'b'}, g>.
    double h = hb.hbar;
    const LogGrid& grid = g.grid;
    int n = grid.size();
    PhiSweep sweep(hM, PlanckScale(h));
    // the overlap side tolerates edge-truncated profiles (the reconstruction
    // only needs the family on the span of the states in play), so the
    // scale window is not clamped to the coherent resolvability range
    double la_lo = std::log(p.a / window.a_ratio), la_hi = std::log(p.a * window.a_ratio);
    double dla = (la_hi - la_lo) / (window.n_a - 1);
    double xs_g = upper_support(g, 1e-9);

    std::vector<double> amp(n);
    std::vector<double> rates((size_t)window.n_a, 0.0);

#pragma omp parallel for schedule(static) firstprivate(amp)
    for (int ia = 0; ia < window.n_a; ++ia) {
        double a2 = std::exp(la_lo + ia * dla);
        double wa = (ia == 0 || ia == window.n_a - 1) ? 0.5 * dla : dla;
        // coherent profile of a'
        {
            double lc = coherent_norm_log(PlanckScale(h)) + (1.0 / h + 0.5) * std::log(a2);
            for (int j = 0; j < n; ++j) {
                double le = lc + grid.u(j) / h - a2 * grid.x(j) / h;
                amp[j] = (le < -745.0) ? 0.0 : std::exp(le);
            }
        }
        // Nyquist in the translation sweep: the overlap side oscillates at
        // the support of amp * g, the contour-formula side at the exact
        // displaced state's support (grid-capped); the product needs the sum
        double x_row = std::min(xs_g, (30.0 * h + 4.0) / a2) +
                       std::min(grid.x_max(), (30.0 * h + 4.0) / a2);
        double db_need = 0.6 * M_PI * h / std::max(x_row, 1e-12);
        int n_b = std::max(window.n_b, 2 * (int)std::ceil(window.b_halfwidth / db_need) + 1);
        double db = 2.0 * window.b_halfwidth / (n_b - 1);
        std::vector<cplx> qj(n), cur(n), rot(n);
        double b_lo = p.b - window.b_halfwidth;
        for (int j = 0; j < n; ++j) {
            qj[j] = amp[j] * grid.weight(j) * g.values[j];
            cur[j] = std::polar(1.0, -b_lo * grid.x(j) / h);
            rot[j] = std::polar(1.0, -db * grid.x(j) / h);
        }
        cplx row_sum(0.0);
        for (int ib = 0; ib < n_b; ++ib) {
            double b2 = b_lo + ib * db;
            double wb = (ib == 0 || ib == n_b - 1) ? 0.5 * db : db;
            cplx overlap(0.0);
            for (int j = 0; j < n; ++j) {
                overlap += qj[j] * cur[j];
                cur[j] *= rot[j];
            }
            ComplexDisplacement d{0.5 * (a2 - p.a), 0.5 * (b2 - p.b)};
            cplx q = continuation_prefactor(p, d, PlanckScale(h));
            cplx cont = q * overlap;
            // Phi = (2/(pi h)) a'^{-apower} Q^{-1} * cross-element
            PhasePoint p2(a2, b2);
            cplx cr;
            if (hpower_variant == 2 && slice_bsign > 0.0) {
                cr = sweep.cross(p, p2);
            } else {
                // documented convention variants: single-power hbar in the
                // complex base / flipped slice argument
                int m = hM.contour.size(), nbp = hM.b_grid.size();
                cplx total(0.0);
                for (int j = 0; j < nbp; ++j) {
                    double bp = slice_bsign * hM.b_grid.point(j);
                    cplx z1(p.a, p.b - bp);
                    cplx z2(p2.a, -(p2.b - bp));
                    cplx S = std::log(z1) + std::log(z2) -
                             (double)hpower_variant * std::log(h);
                    cplx base = std::exp(-sweep.kappa0 * S) * hM.b_grid.weight(j);
                    cplx ph = std::exp(cplx(0.0, -0.5 * sweep.tau0) * S);
                    cplx rotS = std::exp(cplx(0.0, -0.5 * sweep.dtau) * S);
                    cplx acc(0.0);
                    for (int i = 0; i < m; ++i) {
                        acc += sweep.gamma_w[i] * hM.values[(size_t)i * nbp + j] * ph;
                        ph *= rotS;
                    }
                    total += base * acc;
                }
                double lp = sweep.lpref + (1.0 / h + 0.5) * std::log(p.a * p2.a);
                cr = std::exp(lp) * total;
            }
            cplx phi_val = 2.0 / (M_PI * h) * std::pow(a2, -apower) / q * cr;
            // d(alpha) d(beta) = (a'/4) d(log a') d b'
            row_sum += phi_val * cont * (a2 / 4.0) * wa * wb;
        }
        rates[ia] = 2.0 / (h * h) * row_sum.imag();
    }
    double rate = 0.0;
    for (double r : rates) rate += r; // fixed order
    return rate;
}

} // namespace

cplx phi_kernel(const PhasePoint& p, const ComplexDisplacement& d, const MellinSlices& hM,
                const PlanckScale& hb) {
    if (!(p.a > 0.0) || !(p.a + 2.0 * d.alpha > 0.0))
        throw domain_error("phi_kernel: requires a > 0 and a + 2 alpha > 0");
    PhiSweep sweep(hM, hb);
    PhasePoint p2(p.a + 2.0 * d.alpha, p.b + 2.0 * d.beta);
    cplx q = continuation_prefactor(p, d, hb);
    cplx cr = sweep.cross(p, p2);
    return 2.0 / (M_PI * hb.hbar) * std::pow(p2.a, -2.0) / q * cr;
}

double husimi_rhs_kernel(const PhasePoint& p, const OperatorMatrix& Wop, const MellinSlices& hM,
                         const DisplacementWindow& window, const PlanckScale& hb) {
    CoherentState phi = coherent_state(p, hb, Wop.grid);
    HalfLineFunction g = apply_operator(Wop, phi.state);
    return rhs_kernel_impl(p, g, hM, window, hb);
}

double husimi_rhs_kernel_pure(const PhasePoint& p, const HalfLineFunction& psi,
                              const MellinSlices& hM, const DisplacementWindow& window,
                              const PlanckScale& hb) {
    CoherentState phi = coherent_state(p, hb, psi.grid);
    cplx c = inner_product(psi, phi.state);
    HalfLineFunction g = c * psi;
    return rhs_kernel_impl(p, g, hM, window, hb);
}

std::string conventions_text() {
    std::ostringstream os;
    os << "# conventions (frozen by the verification ladder)\n"
       << "#   U(a,b) f(x)        = sqrt(a) e^{+i b x/hbar} f(a x)\n"
       << "#   V(a,b) f(x)        = f(1/(a^2 x)) e^{+i b (1/(a^2 x) - x)/hbar}   (displayed form)\n"
       << "#   V*(a,b)            = U I U^{-1},  (I f)(x) = (1/x) f(1/x)          (unitary form)\n"
       << "#   quantize           : kernel w(x,y) = F(1/sqrt(xy), y-x),\n"
       << "#                        F(a,c) = (2 pi hbar)^{-1/2} int W(a,b) e^{-i b c/hbar} db\n"
       << "#   superposition      : W = (2/sqrt(2 pi hbar)) int W(a,b) V*(a,b) da db/a^2\n"
       << "#   inverse map        : W(a,b) = (2/sqrt(2 pi hbar)) Tr[W V*(a,b) C(a)]\n"
       << "#   identity           : Id = (1/(2 pi hbar)) int |phi_ab><phi_ab| da db/a^2\n"
       << "#   Husimi             : W~(a,b) = <phi_ab, W phi_ab>/hbar;  mass = (1/2pi) int W~ da db/a^2 = Tr W\n"
       << "#   contour formula    : W~ = C^2 a^{2/hbar+1}/hbar (2 pi hbar)^{-1/2} (2 pi)^{-1}\n"
       << "#                        int dtau dxi w_M(s,xi) Gamma(k)^2 ((a^2+(b-xi)^2)/hbar^2)^{-k},\n"
       << "#                        k = s/2 + 1/hbar + 1, s = 1/2 + i tau\n"
       << "#   continuation       : W~(a+al+i be, b+be-i al) = Q <phi_{a+2al,b+2be}, W phi_ab>/hbar,\n"
       << "#                        Q = ((a+al)+i be)^{2/hbar+1} / ((a+2al) a)^{1/hbar+1/2}\n"
       << "#   evolution law      : dW~/dt = (2/hbar) Im int Phi W~_cont d(al) d(be),\n"
       << "#                        Phi = (2/(pi hbar)) (a+2al)^{-2} Q^{-1} <phi_ab, H phi_{a+2al,b+2be}>_M\n"
       << "#   rate normalization : direct rate = (2/hbar^2) Im <phi, H W phi>\n";
    return os.str();
}

EvolutionReport verify_evolution(const AffineSymbol& h_symbol, const HalfLineFunction& psi0,
                                 const std::vector<PhasePoint>& probes, const PlanckScale& hb,
                                 const VerifyEvolutionParams& params) {
    EvolutionReport rep;
    rep.conventions = conventions_text();
    const LogGrid& grid = psi0.grid;
    double h = hb.hbar;

    OperatorMatrix H = quantize_kernel(h_symbol, grid, hb);
    PropagationPlan plan(H, hb);
    CriticalLineGrid contour(params.contour_tau_max, params.contour_m);
    MellinSlices hM = symbol_mellin_slices(h_symbol, contour);

    HalfLineFunction Hpsi = apply_operator(H, psi0);
    double delta = params.fd_delta;
    HalfLineFunction psi_p = plan.propagate(psi0, delta);
    HalfLineFunction psi_m = plan.propagate(psi0, -delta);
    HalfLineFunction psi_p2 = plan.propagate(psi0, 0.5 * delta);
    HalfLineFunction psi_m2 = plan.propagate(psi0, -0.5 * delta);

    for (const PhasePoint& p : probes) {
        ProbeReport pr{p, 0.0, 0.0, 0.0, 0.0, 0.0, ""};
        try {
            CoherentState phi = coherent_state(p, hb, grid);
            auto husimi_at = [&](const HalfLineFunction& st) {
                return std::norm(inner_product(phi.state, st)) / h;
            };
            double fd1 = (husimi_at(psi_p) - husimi_at(psi_m)) / (2.0 * delta);
            double fd2 = (husimi_at(psi_p2) - husimi_at(psi_m2)) / delta;
            pr.fd_rate = fd1;
            if (std::abs(fd1 - fd2) > 1e-5)
                pr.note = "fd-refinement residual " + std::to_string(std::abs(fd1 - fd2));
            pr.direct_rate = husimi_rhs_direct_pure(p, psi0, Hpsi, hb);
            pr.kernel_rate = husimi_rhs_kernel_pure(p, psi0, hM, params.window, hb);
            pr.fd_vs_direct = std::abs(pr.fd_rate - pr.direct_rate);
            pr.direct_vs_kernel = std::abs(pr.direct_rate - pr.kernel_rate);
        } catch (const error& e) {
            pr.note = e.what();
        }
        rep.max_fd_vs_direct = std::max(rep.max_fd_vs_direct, pr.fd_vs_direct);
        rep.max_direct_vs_kernel = std::max(rep.max_direct_vs_kernel, pr.direct_vs_kernel);
        rep.probes.push_back(pr);
    }

    // stationary state: top eigenstate of H (smooth, localized in the window)
    {
        int n = grid.size();
        int top = 0;
        for (int r = 1; r < n; ++r)
            if (plan.eigenvalues()[r] > plan.eigenvalues()[top]) top = r;
        HalfLineFunction chi = plan.eigenstate(top);
        HalfLineFunction Hchi = apply_operator(H, chi);
        double worst = 0.0;
        for (const PhasePoint& p : probes) {
            try {
                double dr = husimi_rhs_direct_pure(p, chi, Hchi, hb);
                double kr = husimi_rhs_kernel_pure(p, chi, hM, params.window, hb);
                CoherentState phi = coherent_state(p, hb, grid);
                HalfLineFunction cp = plan.propagate(chi, delta);
                HalfLineFunction cm = plan.propagate(chi, -delta);
                double fd = (std::norm(inner_product(phi.state, cp)) -
                             std::norm(inner_product(phi.state, cm))) /
                            (2.0 * delta * h);
                worst = std::max({worst, std::abs(dr), std::abs(kr), std::abs(fd)});
            } catch (const error&) {
            }
        }
        rep.stationary_max_rate = worst;
    }

    // conservation along the flow
    {
        double n0 = norm(psi0);
        double e0 = plan.energy(psi0);
        PhaseWindow mw;
        double m0 = husimi_window_mass(psi0, mw, hb);
        double nd = 0.0, ed = 0.0, md = 0.0;
        for (int k = 1; k <= params.t_samples; ++k) {
            double t = params.t_span * k / params.t_samples;
            HalfLineFunction pt = plan.propagate(psi0, t);
            nd = std::max(nd, std::abs(norm(pt) - n0) / n0);
            ed = std::max(ed, std::abs(plan.energy(pt) - e0) / std::max(std::abs(e0), 1e-12));
            md = std::max(md, std::abs(husimi_window_mass(pt, mw, hb) - m0) / m0);
        }
        rep.norm_drift = nd;
        rep.energy_drift = ed;
        rep.mass_drift = md;
    }

    if (params.with_variants) {
        // documented alternatives; residuals reported alongside the frozen choice
        struct V {
            const char* name;
            int hpow;
            double bsign;
            int apow;
        } vs[] = {
            {"frozen: hbar^2 base, left-Haar insertion", 2, 1.0, 2},
            {"variant: single hbar power in complex base", 1, 1.0, 2},
            {"variant: flipped slice argument", 2, -1.0, 2},
            {"variant: right-Haar insertion (a'^-1)", 2, 1.0, 1},
        };
        size_t nprobe = std::min<size_t>(probes.size(), 5);
        for (const auto& v : vs) {
            double worst = 0.0;
            for (size_t i = 0; i < nprobe; ++i) {
                try {
                    CoherentState phi = coherent_state(probes[i], hb, grid);
                    cplx c = inner_product(psi0, phi.state);
                    HalfLineFunction g = c * psi0;
                    double kr = rhs_kernel_impl(probes[i], g, hM, params.window, hb, v.hpow,
                                                v.bsign, v.apow);
                    double dr = husimi_rhs_direct_pure(probes[i], psi0, Hpsi, hb);
                    worst = std::max(worst, std::abs(kr - dr));
                } catch (const error&) {
                    worst = std::numeric_limits<double>::infinity();
                }
            }
            rep.variants.push_back({v.name, worst});
        }
    }
    return rep;
}

} // namespace halfline
