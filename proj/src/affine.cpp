#include "halfline/affine.hpp"

#include <algorithm>
#include <cmath>

namespace halfline {

AffineSymbol sample_symbol(const LogGrid& a_grid, const UniformGrid& b_grid,
                           const std::function<cplx(double, double)>& fn) {
    AffineSymbol W(a_grid, b_grid);
    for (int ia = 0; ia < a_grid.size(); ++ia)
        for (int ib = 0; ib < b_grid.size(); ++ib) W.at(ia, ib) = fn(a_grid.x(ia), b_grid.point(ib));
    return W;
}

HalfLineFunction u_action(const PhasePoint& p, const HalfLineFunction& f, const PlanckScale& hb) {
    HalfLineFunction out(f.grid);
    double sa = std::sqrt(p.a);
    for (int j = 0; j < f.grid.size(); ++j) {
        double x = f.grid.x(j);
        out.values[j] = sa * std::polar(1.0, p.b * x / hb.hbar) * value_at(f, p.a * x);
    }
    return out;
}

HalfLineFunction v_action(const PhasePoint& p, const HalfLineFunction& f, const PlanckScale& hb) {
    HalfLineFunction out(f.grid);
    double a2 = p.a * p.a;
    for (int j = 0; j < f.grid.size(); ++j) {
        double x = f.grid.x(j);
        double ystar = 1.0 / (a2 * x);
        out.values[j] = value_at(f, ystar) * std::polar(1.0, p.b * (ystar - x) / hb.hbar);
    }
    return out;
}

HalfLineFunction reflection_unitary(const PhasePoint& p, const HalfLineFunction& f,
                                    const PlanckScale& hb) {
    HalfLineFunction out(f.grid);
    double a2 = p.a * p.a;
    for (int j = 0; j < f.grid.size(); ++j) {
        double x = f.grid.x(j);
        double ystar = 1.0 / (a2 * x);
        out.values[j] =
            value_at(f, ystar) * std::polar(1.0 / (p.a * x), -p.b * (ystar - x) / hb.hbar);
    }
    return out;
}

double c_multiplier(double a, double x) {
    return 0.5 * (a * x + 1.0 / (a * x));
}

HalfLineFunction c_action(double a, const HalfLineFunction& f) {
    if (!(a > 0.0)) throw parameter_error("c_action requires a > 0");
    HalfLineFunction out(f.grid);
    for (int j = 0; j < f.grid.size(); ++j) out.values[j] = c_multiplier(a, f.grid.x(j)) * f.values[j];
    return out;
}

SymbolFourierTable::SymbolFourierTable(const AffineSymbol& W, const PlanckScale& hb, int a_refine,
                                       double c_step_hint) {
    hbar_ = hb.hbar;
    const LogGrid& ag = W.a_grid;
    const UniformGrid& bg = W.b_grid;
    int na0 = ag.size(), nb = bg.size();
    if (a_refine < 1) a_refine = 1;
    na_ = (na0 - 1) * a_refine + 1;
    ua_min_ = ag.u(0);
    dua_ = ag.log_step() / a_refine;

    // Beyond c_alias the trapezoid transform self-aliases; beyond it the
    // b-grid cannot resolve the kernel offset oscillation.
    double c_alias = 0.98 * M_PI * hbar_ / bg.step();

    // symbol values on the refined a-lattice (cubic interpolation in log a)
    std::vector<cplx> Wr((size_t)na_ * nb);
    for (int ia = 0; ia < na_; ++ia) {
        double pos = (double)ia / a_refine;
        if (ia % a_refine == 0) {
            int j = ia / a_refine;
            for (int ib = 0; ib < nb; ++ib) Wr[(size_t)ia * nb + ib] = W.at(j, ib);
        } else if (na0 >= 4) {
            int j0;
            double c[4];
            detail::cubic_stencil(pos, na0, j0, c);
            for (int ib = 0; ib < nb; ++ib) {
                cplx v(0.0);
                for (int k = 0; k < 4; ++k) v += c[k] * W.at(j0 + k, ib);
                Wr[(size_t)ia * nb + ib] = v;
            }
        } else {
            int j = std::min((int)pos, na0 - 1);
            for (int ib = 0; ib < nb; ++ib) Wr[(size_t)ia * nb + ib] = W.at(j, ib);
        }
    }

    // coarse probe of the c-decay to size the table
    double dc_probe = hbar_ / 4.0;
    int ncp = (int)std::floor(c_alias / dc_probe) + 1;
    double fmax = 0.0;
    std::vector<double> cprof(ncp, 0.0);
    const double fourier_norm = 1.0 / std::sqrt(2.0 * M_PI * hbar_);
    for (int ia = 0; ia < na_; ia += std::max(1, na_ / 128)) {
        const cplx* row = &Wr[(size_t)ia * nb];
        for (int ib = 0; ib < nb; ++ib) {
            cplx q = row[ib] * bg.weight(ib) * fourier_norm;
            if (q == cplx(0.0)) continue;
            cplx rot = std::polar(1.0, -bg.point(ib) * dc_probe / hbar_);
            cplx ph(1.0, 0.0);
            for (int ic = 0; ic < ncp; ++ic) {
                cprof[ic] += std::abs(q * ph); // envelope bound per |c| column
                ph *= rot;
            }
        }
    }
    // the envelope overestimates; measure the actual transform on the probe lattice
    std::vector<double> fprof(ncp, 0.0);
    for (int ia = 0; ia < na_; ia += std::max(1, na_ / 128)) {
        const cplx* row = &Wr[(size_t)ia * nb];
        std::vector<cplx> acc(ncp, cplx(0.0));
        for (int ib = 0; ib < nb; ++ib) {
            cplx q = row[ib] * bg.weight(ib) * fourier_norm;
            cplx rot = std::polar(1.0, -bg.point(ib) * dc_probe / hbar_);
            cplx ph(1.0, 0.0);
            for (int ic = 0; ic < ncp; ++ic) {
                acc[ic] += q * ph;
                ph *= rot;
            }
        }
        for (int ic = 0; ic < ncp; ++ic) fprof[ic] = std::max(fprof[ic], std::abs(acc[ic]));
    }
    for (double v : fprof) fmax = std::max(fmax, v);
    int ic_decay = ncp - 1;
    while (ic_decay > 8 && fprof[ic_decay] < 1e-15 * fmax && fprof[ic_decay - 1] < 1e-15 * fmax)
        --ic_decay;
    double c_need = std::min(c_alias, 1.25 * (ic_decay * dc_probe) + 4.0 * dc_probe);
    tail_fraction_ = fmax > 0.0 ? fprof[std::min(ncp - 1, (int)(c_need / dc_probe))] / fmax : 0.0;

    dc_ = (c_step_hint > 0.0) ? c_step_hint : 0.01 * hbar_;
    nc_ = (int)std::ceil(c_need / dc_) + 1;
    c_max_ = dc_ * (nc_ - 1);

    // full table over c in [-c_max, c_max]; store columns for c >= 0 and
    // c < 0 in one row of length 2*nc-1, index ic = 0 at c = -c_max.
    int ncols = 2 * nc_ - 1;
    table_.assign((size_t)na_ * ncols, cplx(0.0));
#pragma omp parallel for schedule(static)
    for (int ia = 0; ia < na_; ++ia) {
        const cplx* row = &Wr[(size_t)ia * nb];
        cplx* out = &table_[(size_t)ia * ncols];
        for (int ib = 0; ib < nb; ++ib) {
            cplx q = row[ib] * bg.weight(ib) * fourier_norm;
            if (q == cplx(0.0)) continue;
            double b = bg.point(ib);
            cplx rot = std::polar(1.0, -b * dc_ / hbar_);
            cplx ph = std::polar(1.0, b * c_max_ / hbar_); // e^{-i b (-c_max)/hbar}
            for (int ic = 0; ic < ncols; ++ic) {
                out[ic] += q * ph;
                ph *= rot;
            }
        }
    }
}

cplx SymbolFourierTable::eval(double a, double c) const {
    if (!(a > 0.0)) return cplx(0.0);
    double pa = (std::log(a) - ua_min_) / dua_;
    if (pa < 0.0 || pa > na_ - 1) return cplx(0.0);
    double pc = (c + c_max_) / dc_;
    int ncols = 2 * nc_ - 1;
    if (pc < 0.0 || pc > ncols - 1) return cplx(0.0);
    if (na_ < 4 || ncols < 4) return cplx(0.0);
    int ja, jc;
    double ca[4], cc[4];
    detail::cubic_stencil(pa, na_, ja, ca);
    detail::cubic_stencil(pc, ncols, jc, cc);
    cplx v(0.0);
    for (int k = 0; k < 4; ++k) {
        const cplx* row = &table_[(size_t)(ja + k) * ncols + jc];
        v += ca[k] * (cc[0] * row[0] + cc[1] * row[1] + cc[2] * row[2] + cc[3] * row[3]);
    }
    return v;
}

OperatorMatrix quantize_kernel(const AffineSymbol& W, const LogGrid& grid, const PlanckScale& hb,
                               double tail_tol) {
    SymbolFourierTable F(W, hb);
    if (F.tail_fraction() > tail_tol)
        throw resolution_error("quantize_kernel: symbol b-grid too coarse for the kernel "
                               "offsets (transform not decayed within the alias-safe window)");
    int n = grid.size();
    OperatorMatrix out(grid);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        double ui = grid.u(i), xi = grid.x(i);
        for (int j = 0; j < n; ++j) {
            double a = std::exp(-0.5 * (ui + grid.u(j)));
            out.at(i, j) = F.eval(a, grid.x(j) - xi);
        }
    }
    return out;
}

OperatorMatrix quantize_superposition(const AffineSymbol& W, const LogGrid& grid,
                                      const PlanckScale& hb, int oversample) {
    SymbolFourierTable F(W, hb);
    int n = grid.size();
    if (n < 4) throw parameter_error("quantize_superposition requires n >= 4");
    if (oversample < 2) oversample = 2;
    if (oversample % 2) ++oversample; // composite Simpson needs even cells
    OperatorMatrix out(grid);

    const double du = grid.log_step();
    const double dt = 0.5 * du / oversample;
    // scale lattice t_k = -u_max + k du/2 hits every pair midpoint
    // -(u_i+u_j)/2; the integrand is smooth inside each lattice cell, so
    // Simpson sub-weights apply cleanly.
    const double t_lo = -grid.u(n - 1);
    const int n_seg = 2 * (n - 1);
    const int n_nodes = n_seg * oversample + 1;

    const double u_min = grid.u(0), u_max = grid.u(n - 1);

    // accumulate per row; rows are independent, parallel over row blocks
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        double ui = grid.u(i), xi = grid.x(i);
        cplx* row = &out.entries[(size_t)i * n];
        for (int q = 0; q < n_nodes; ++q) {
            double t = t_lo + q * dt;
            double v = -2.0 * t - ui; // log of the reflected point
            if (v < u_min || v > u_max) continue;
            // composite Simpson weight on the aligned lattice
            double wt;
            if (q == 0 || q == n_nodes - 1)
                wt = dt / 3.0;
            else if (q % oversample == 0)
                wt = 2.0 * dt / 3.0; // cell boundary: 1/3 + 1/3
            else
                wt = (q % 2) ? 4.0 * dt / 3.0 : 2.0 * dt / 3.0;
            double a = std::exp(t);
            double ystar = std::exp(v);
            cplx fval = F.eval(a, ystar - xi);
            if (fval == cplx(0.0)) continue;
            double p = (v - u_min) / du;
            int j0;
            double cst[4];
            detail::cubic_stencil(p, n, j0, cst);
            cplx coef = wt * 2.0 / (a * a * xi) * fval;
            for (int k = 0; k < 4; ++k) row[j0 + k] += coef * cst[k] / grid.weight(j0 + k);
        }
    }
    return out;
}

AffineSymbol symbol_of(const OperatorMatrix& Wop, const LogGrid& a_targets,
                       const UniformGrid& b_targets, const PlanckScale& hb) {
    const LogGrid& g = Wop.grid;
    int n = g.size(), na = a_targets.size(), nb = b_targets.size();
    AffineSymbol out(a_targets, b_targets);
    const double norm_c = 2.0 / std::sqrt(2.0 * M_PI * hb.hbar);
#pragma omp parallel for schedule(static)
    for (int ia = 0; ia < na; ++ia) {
        double a = a_targets.x(ia);
        double a2 = a * a;
        // column-wise interpolation of the kernel along x = 1/(a^2 y)
        std::vector<cplx> gj(n, cplx(0.0));
        std::vector<double> cj(n);
        for (int j = 0; j < n; ++j) {
            double y = g.x(j);
            double xstar = 1.0 / (a2 * y);
            cj[j] = y - xstar;
            double p = g.position(xstar);
            if (p < 0.0 || p > n - 1) continue;
            int j0;
            double cst[4];
            detail::cubic_stencil(p, n, j0, cst);
            cplx kv(0.0);
            for (int k = 0; k < 4; ++k) kv += cst[k] * Wop.at(j0 + k, j);
            gj[j] = kv * g.weight(j) * 0.5 * (1.0 + 1.0 / (a2 * y * y));
        }
        // phase recurrence across the uniform b sweep
        std::vector<cplx> cur(n), rot(n);
        for (int j = 0; j < n; ++j) {
            cur[j] = std::polar(1.0, b_targets.lo() * cj[j] / hb.hbar);
            rot[j] = std::polar(1.0, b_targets.step() * cj[j] / hb.hbar);
        }
        for (int ib = 0; ib < nb; ++ib) {
            cplx s(0.0);
            for (int j = 0; j < n; ++j) {
                s += gj[j] * cur[j];
                cur[j] *= rot[j];
            }
            out.at(ia, ib) = norm_c * s;
        }
    }
    return out;
}

HalfLineFunction reflection_measure_probe(const HalfLineFunction& f, const PlanckScale& hb,
                                          ReflectionVariant variant, int a_power, int n_a,
                                          double b_max) {
    if (a_power != 1 && a_power != 2)
        throw parameter_error("reflection_measure_probe: a_power must be 1 or 2");
    const LogGrid& g = f.grid;
    // the reflected support 1/(a^2 x) stays on-grid for a in this range
    double a_lo = 1.0 / std::sqrt(g.x_max() * g.x_max());
    double a_hi = 1.0 / std::sqrt(g.x_min() * g.x_min());
    double t_lo = std::log(a_lo), t_hi = std::log(a_hi);
    double dt = (t_hi - t_lo) / (n_a - 1);
    HalfLineFunction out(g);
    double hbar = hb.hbar;
    for (int q = 0; q < n_a; ++q) {
        double t = t_lo + q * dt;
        double a = std::exp(t);
        double wt = (q == 0 || q == n_a - 1) ? 0.5 * dt : dt;
        // da/(2 a^p hbar) in log scale: a^{1-p} dt/(2 hbar)
        double mews = wt * std::pow(a, 1.0 - a_power) / (2.0 * hbar);
        for (int j = 0; j < g.size(); ++j) {
            double x = g.x(j);
            double ystar = 1.0 / (a * a * x);
            cplx fv = value_at(f, ystar);
            if (fv == cplx(0.0)) continue;
            double c = ystar - x;
            // int_{-B}^{B} e^{+-i b c / hbar} db = 2 hbar sin(B c / hbar)/c
            double bint = (std::abs(c) < 1e-12) ? 2.0 * b_max
                                                : 2.0 * hbar * std::sin(b_max * c / hbar) / c;
            double pref = (variant == ReflectionVariant::unitary) ? 1.0 / (a * x) : 1.0;
            out.values[j] += mews * pref * bint * fv;
        }
    }
    return out;
}

} // namespace halfline
