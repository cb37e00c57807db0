#include "halfline/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "halfline/evolution.hpp"
#include "halfline/mellin.hpp"
#include "halfline/phase.hpp"
#include "halfline/special.hpp"

namespace halfline {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    size_t e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

std::vector<double> parse_numbers(const std::string& s, char sep = ',') {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (item.empty()) continue;
        size_t pos = 0;
        double v = std::stod(item, &pos);
        if (pos != item.size()) throw config_error("bad numeric value '" + item + "'");
        out.push_back(v);
    }
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void set_key(RunConfig& c, const std::string& key, const std::string& val) {
    auto d = [&](double& slot) { slot = std::stod(val); };
    auto i = [&](int& slot) { slot = std::stoi(val); };
    if (key == "hbar") d(c.hbar);
    else if (key == "x_min") d(c.x_min);
    else if (key == "x_max") d(c.x_max);
    else if (key == "n") i(c.n);
    else if (key == "a_min") d(c.a_min);
    else if (key == "a_max") d(c.a_max);
    else if (key == "n_a") i(c.n_a);
    else if (key == "b_min") d(c.b_min);
    else if (key == "b_max") d(c.b_max);
    else if (key == "n_b") i(c.n_b);
    else if (key == "tau_max") d(c.tau_max);
    else if (key == "m") i(c.m);
    else if (key == "xi_max") d(c.xi_max);
    else if (key == "m_xi") i(c.m_xi);
    else if (key == "state") c.state = val;
    else if (key == "state_params") c.state_params = val;
    else if (key == "symbol_a") c.symbol_a = val;
    else if (key == "symbol_a_params") c.symbol_a_params = val;
    else if (key == "symbol_b") c.symbol_b = val;
    else if (key == "symbol_b_params") c.symbol_b_params = val;
    else if (key == "t_max") d(c.t_max);
    else if (key == "n_t") i(c.n_t);
    else if (key == "out_dir") c.out_dir = val;
    else if (key == "probes") i(c.probes);
    else if (key == "field_stride") i(c.field_stride);
    else if (key == "matrix_stride") i(c.matrix_stride);
    else throw config_error("unknown config key '" + key + "'");
}

const char* kAllKeys[] = {"hbar", "x_min", "x_max", "n", "a_min", "a_max", "n_a", "b_min",
                          "b_max", "n_b", "tau_max", "m", "xi_max", "m_xi", "state",
                          "state_params", "symbol_a", "symbol_a_params", "symbol_b",
                          "symbol_b_params", "t_max", "n_t", "out_dir", "probes",
                          "field_stride", "matrix_stride"};

void validate(const RunConfig& c) {
    if (!(c.hbar > 0.0)) throw config_error("hbar must be positive");
    if (!(c.x_min > 0.0 && c.x_max > c.x_min)) throw config_error("bad x range");
    if (c.n < 16) throw config_error("n too small");
    if (!(c.a_min > 0.0 && c.a_max > c.a_min)) throw config_error("bad a range");
    if (!(c.b_max > c.b_min)) throw config_error("bad b range");
    if (c.n_a < 2 || c.n_b < 2) throw config_error("bad window resolution");
    if (!(c.tau_max > 0.0) || c.m < 3 || c.m % 2 == 0) throw config_error("bad contour");
    if (!(c.xi_max > 0.0) || c.m_xi < 3) throw config_error("bad xi grid");
    if (c.n_t < 1 || !(c.t_max > 0.0)) throw config_error("bad time grid");
    if (c.probes < 1) throw config_error("probes must be >= 1");
    if (c.field_stride < 1 || c.matrix_stride < 1) throw config_error("bad stride");
}

double bump(double t) {
    if (!(std::abs(t) < 1.0)) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

} // namespace

std::map<std::string, std::string> RunConfig::echo() const {
    std::map<std::string, std::string> m_;
    m_["hbar"] = fmt(hbar);
    m_["x_min"] = fmt(x_min);
    m_["x_max"] = fmt(x_max);
    m_["n"] = std::to_string(n);
    m_["a_min"] = fmt(a_min);
    m_["a_max"] = fmt(a_max);
    m_["n_a"] = std::to_string(n_a);
    m_["b_min"] = fmt(b_min);
    m_["b_max"] = fmt(b_max);
    m_["n_b"] = std::to_string(n_b);
    m_["tau_max"] = fmt(tau_max);
    m_["m"] = std::to_string(m);
    m_["xi_max"] = fmt(xi_max);
    m_["m_xi"] = std::to_string(m_xi);
    m_["state"] = state;
    m_["state_params"] = state_params;
    m_["symbol_a"] = symbol_a;
    m_["symbol_a_params"] = symbol_a_params;
    m_["symbol_b"] = symbol_b;
    m_["symbol_b_params"] = symbol_b_params;
    m_["t_max"] = fmt(t_max);
    m_["n_t"] = std::to_string(n_t);
    m_["out_dir"] = out_dir;
    m_["probes"] = std::to_string(probes);
    m_["field_stride"] = std::to_string(field_stride);
    m_["matrix_stride"] = std::to_string(matrix_stride);
    return m_;
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        try {
            set_key(cfg, key, val);
        } catch (const std::invalid_argument&) {
            throw config_error("line " + std::to_string(lineno) + ": bad value for '" + key + "'");
        }
    }
    validate(cfg);
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw config_error("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

void apply_env_overrides(RunConfig& cfg) {
    for (const char* key : kAllKeys) {
        std::string env = "HALFLINE_";
        for (const char* p = key; *p; ++p) env += (char)std::toupper(*p);
        if (const char* val = std::getenv(env.c_str())) set_key(cfg, key, val);
    }
    validate(cfg);
}

LogGrid grid_from(const RunConfig& cfg) {
    return make_log_grid(cfg.x_min, cfg.x_max, cfg.n);
}

HalfLineFunction state_from(const RunConfig& cfg, const LogGrid& grid) {
    PlanckScale hb(cfg.hbar);
    if (cfg.state == "coherent") {
        auto p = parse_numbers(cfg.state_params);
        if (p.size() != 2) throw config_error("coherent state takes params a,b");
        return coherent_state(PhasePoint(p[0], p[1]), hb, grid).state;
    }
    if (cfg.state == "monomial") {
        auto p = parse_numbers(cfg.state_params);
        if (p.size() != 2) throw config_error("monomial state takes params k,c");
        double k = p[0], c = p[1];
        if (!(c > 0.0)) throw config_error("monomial state needs c > 0");
        HalfLineFunction f = sample(grid, [&](double x) { return std::pow(x, k) * std::exp(-c * x); });
        double nn = norm(f);
        if (!(nn > 0.0)) throw config_error("monomial state vanishes on the grid");
        return (1.0 / nn) * f;
    }
    if (cfg.state == "coherent_sum") {
        // params: a1,b1,re1,im1; a2,b2,re2,im2; ...
        std::stringstream ss(cfg.state_params);
        std::string chunk;
        HalfLineFunction acc(grid);
        bool any = false;
        while (std::getline(ss, chunk, ';')) {
            auto p = parse_numbers(chunk);
            if (p.size() != 4) throw config_error("coherent_sum terms take a,b,re,im");
            HalfLineFunction st = coherent_state(PhasePoint(p[0], p[1]), hb, grid).state;
            acc = acc + cplx(p[2], p[3]) * st;
            any = true;
        }
        if (!any) throw config_error("coherent_sum needs at least one term");
        double nn = norm(acc);
        if (!(nn > 0.0)) throw config_error("coherent_sum vanishes");
        return (1.0 / nn) * acc;
    }
    throw config_error("unknown state family '" + cfg.state + "'");
}

namespace {

std::function<double(double)> symbol_a_factor(const RunConfig& cfg) {
    auto p = parse_numbers(cfg.symbol_a_params);
    if (cfg.symbol_a == "exp_scale") {
        if (p.size() != 1 || !(p[0] > 0.0)) throw config_error("exp_scale takes one positive param");
        double c = p[0];
        return [c](double a) { return std::exp(-c * (a + 1.0 / a)); };
    }
    if (cfg.symbol_a == "bump") {
        if (p.size() != 2 || !(p[0] > 0.0) || !(p[1] > 0.0))
            throw config_error("bump (scale) takes center,width > 0");
        double c = p[0], w = p[1];
        return [c, w](double a) { return bump(std::log(a / c) / w); };
    }
    throw config_error("unknown symbol_a family '" + cfg.symbol_a + "'");
}

std::function<double(double)> symbol_b_factor(const RunConfig& cfg) {
    auto p = parse_numbers(cfg.symbol_b_params);
    if (cfg.symbol_b == "gauss") {
        if (p.size() != 2 || !(p[1] > 0.0)) throw config_error("gauss takes center,width > 0");
        double c = p[0], w = p[1];
        return [c, w](double b) { double t = (b - c) / w; return std::exp(-t * t); };
    }
    if (cfg.symbol_b == "bump") {
        if (p.size() != 2 || !(p[1] > 0.0)) throw config_error("bump takes center,width > 0");
        double c = p[0], w = p[1];
        return [c, w](double b) { return bump((b - c) / w); };
    }
    throw config_error("unknown symbol_b family '" + cfg.symbol_b + "'");
}

} // namespace

AffineSymbol symbol_from_on(const RunConfig& cfg, const LogGrid& a_grid, const UniformGrid& b_grid) {
    auto fa = symbol_a_factor(cfg);
    auto fb = symbol_b_factor(cfg);
    return sample_symbol(a_grid, b_grid, [&](double a, double b) { return cplx(fa(a) * fb(b), 0.0); });
}

AffineSymbol symbol_from(const RunConfig& cfg) {
    LogGrid ag = make_log_grid(cfg.a_min, cfg.a_max, cfg.n_a);
    UniformGrid bg(cfg.b_min, cfg.b_max, cfg.n_b);
    return symbol_from_on(cfg, ag, bg);
}

TableWriter::TableWriter(const std::string& path, const std::string& title,
                         const std::map<std::string, std::string>& header,
                         const std::vector<std::string>& columns) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw error("cannot open output file '" + path + "'");
    f_ = f;
    std::fprintf(f, "# %s\n", title.c_str());
    for (const auto& [k, v] : header) std::fprintf(f, "# %s = %s\n", k.c_str(), v.c_str());
    std::fprintf(f, "# columns:");
    for (const auto& c : columns) std::fprintf(f, " %s", c.c_str());
    std::fprintf(f, "\n");
}

TableWriter::~TableWriter() {
    if (f_) std::fclose((std::FILE*)f_);
}

void TableWriter::row(const std::vector<double>& values) {
    std::FILE* f = (std::FILE*)f_;
    for (size_t i = 0; i < values.size(); ++i)
        std::fprintf(f, i ? " %.17g" : "%.17g", values[i]);
    std::fprintf(f, "\n");
}

void TableWriter::comment(const std::string& line) {
    std::fprintf((std::FILE*)f_, "# %s\n", line.c_str());
}

Table read_table(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw error("cannot open table '" + path + "'");
    Table t;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string body = trim(line.substr(1));
            if (body.rfind("columns:", 0) == 0) {
                std::stringstream ss(body.substr(8));
                std::string c;
                while (ss >> c) t.columns.push_back(c);
            } else {
                size_t eq = body.find('=');
                if (eq != std::string::npos)
                    t.header[trim(body.substr(0, eq))] = trim(body.substr(eq + 1));
            }
            continue;
        }
        std::stringstream ss(line);
        std::vector<double> row;
        double v;
        while (ss >> v) row.push_back(v);
        if (!row.empty()) t.rows.push_back(std::move(row));
    }
    return t;
}

namespace {

std::map<std::string, std::string> full_header(const RunConfig& cfg) {
    return cfg.echo();
}

void write_conventions(TableWriter& w) {
    std::stringstream ss(conventions_text());
    std::string line;
    while (std::getline(ss, line)) {
        if (!line.empty() && line[0] == '#') line = trim(line.substr(1));
        w.comment(line);
    }
}

struct FieldGrids {
    LogGrid a;
    UniformGrid b;
};

FieldGrids field_grids(const RunConfig& cfg, int stride = 1) {
    int na = std::max(2, cfg.n_a / stride);
    int nb = std::max(2, cfg.n_b / stride);
    return {make_log_grid(cfg.a_min, cfg.a_max, na), UniformGrid(cfg.b_min, cfg.b_max, nb)};
}

// wide scale-grid hosting the symbol of a projector, adequate for the
// Mellin decay precondition
LogGrid wide_symbol_grid() { return make_log_grid(1e-6, 1e6, 768); }

int guard(const std::function<int()>& body) {
    try {
        return body();
    } catch (const config_error& e) {
        std::fprintf(stderr, "error: config: %s\n", e.what());
        return 2;
    } catch (const accuracy_error& e) {
        std::fprintf(stderr, "error: gate: %s\n", e.what());
        return 3;
    } catch (const coverage_error& e) {
        std::fprintf(stderr, "error: gate: %s\n", e.what());
        return 3;
    } catch (const resolution_error& e) {
        std::fprintf(stderr, "error: gate: %s\n", e.what());
        return 3;
    } catch (const error& e) {
        std::fprintf(stderr, "error: internal: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: internal: %s\n", e.what());
        return 4;
    }
}

} // namespace

int cmd_husimi(const RunConfig& cfg) {
    return guard([&]() -> int {
        std::filesystem::create_directories(cfg.out_dir);
        PlanckScale hb(cfg.hbar);
        LogGrid grid = grid_from(cfg);
        HalfLineFunction psi = state_from(cfg, grid);

        FieldGrids full = field_grids(cfg);
        HusimiField direct = husimi_pure(psi, full.a, full.b, hb);
        {
            TableWriter w(cfg.out_dir + "/husimi_direct.dat", "husimi field, inner-product path",
                          full_header(cfg), {"a", "b", "value"});
            write_conventions(w);
            for (int ia = 0; ia < full.a.size(); ++ia)
                for (int ib = 0; ib < full.b.size(); ++ib)
                    w.row({full.a.x(ia), full.b.point(ib), direct.at(ia, ib)});
        }

        // second path: symbol of the projector -> mixed transform -> contour formula
        FieldGrids dec = field_grids(cfg, cfg.field_stride);
        OperatorMatrix proj = rank_one(psi);
        UniformGrid sym_b = symbol_translation_window(grid, upper_support(psi), cfg.hbar);
        AffineSymbol sym = symbol_of(proj, wide_symbol_grid(), sym_b, hb);
        CriticalLineGrid contour(cfg.tau_max, cfg.m);
        UniformGrid xi(-cfg.xi_max, cfg.xi_max, cfg.m_xi);
        MellinSpectrum spec = symbol_mellin(sym, contour, xi);
        HusimiField viaM = husimi_from_mellin(spec, dec.a, dec.b, hb);
        HusimiField directDec = husimi_pure(psi, dec.a, dec.b, hb);

        double maxdiff = 0.0, sup = 0.0;
        for (size_t k = 0; k < viaM.values.size(); ++k) {
            maxdiff = std::max(maxdiff, std::abs(viaM.values[k] - directDec.values[k]));
            sup = std::max(sup, std::abs(directDec.values[k]));
        }
        {
            TableWriter w(cfg.out_dir + "/husimi_mellin.dat", "husimi field, contour-formula path",
                          full_header(cfg), {"a", "b", "value"});
            write_conventions(w);
            for (int ia = 0; ia < dec.a.size(); ++ia)
                for (int ib = 0; ib < dec.b.size(); ++ib)
                    w.row({dec.a.x(ia), dec.b.point(ib), viaM.at(ia, ib)});
        }
        {
            TableWriter w(cfg.out_dir + "/husimi_diff.dat", "pointwise difference of the two paths",
                          full_header(cfg), {"a", "b", "difference"});
            for (int ia = 0; ia < dec.a.size(); ++ia)
                for (int ib = 0; ib < dec.b.size(); ++ib)
                    w.row({dec.a.x(ia), dec.b.point(ib), viaM.at(ia, ib) - directDec.at(ia, ib)});
        }
        {
            PhaseWindow mw;
            double mass = husimi_window_mass(psi, mw, hb);
            double peak = 0.0;
            for (double v : direct.values) peak = std::max(peak, v);
            TableWriter w(cfg.out_dir + "/husimi_diagnostics.dat", "window diagnostics",
                          full_header(cfg),
                          {"window_mass", "norm_sq", "peak", "expected_peak", "two_path_sup_diff"});
            w.row({mass, norm(psi) * norm(psi), peak, 1.0 / cfg.hbar, maxdiff / std::max(sup, 1e-300)});
        }
        if (maxdiff / std::max(sup, 1e-300) > 1e-3) {
            std::fprintf(stderr, "error: gate: husimi two-path difference %.3e exceeds 1e-3\n",
                         maxdiff / sup);
            return 3;
        }
        return 0;
    });
}

int cmd_wigner(const RunConfig& cfg) {
    return guard([&]() -> int {
        std::filesystem::create_directories(cfg.out_dir);
        PlanckScale hb(cfg.hbar);
        LogGrid grid = grid_from(cfg);
        HalfLineFunction psi = state_from(cfg, grid);
        FieldGrids full = field_grids(cfg);
        AffineSymbol wig = affine_wigner(psi, full.a, full.b, hb);
        {
            TableWriter w(cfg.out_dir + "/wigner.dat", "scale-translation distribution",
                          full_header(cfg), {"a", "b", "re", "im"});
            write_conventions(w);
            for (int ia = 0; ia < full.a.size(); ++ia)
                for (int ib = 0; ib < full.b.size(); ++ib)
                    w.row({full.a.x(ia), full.b.point(ib), wig.at(ia, ib).real(),
                           wig.at(ia, ib).imag()});
        }
        {
            PhaseWindow mw;
            cplx integral = wigner_window_integral(psi, mw, hb);
            double n2 = norm(psi) * norm(psi);
            TableWriter w(cfg.out_dir + "/wigner_diagnostics.dat",
                          "window integral against both normalizations", full_header(cfg),
                          {"integral_re", "integral_im", "pi_norm_sq", "norm", "norm_sq"});
            w.row({integral.real(), integral.imag(), M_PI * n2, norm(psi), n2});
        }
        return 0;
    });
}

int cmd_quantize(const RunConfig& cfg) {
    return guard([&]() -> int {
        std::filesystem::create_directories(cfg.out_dir);
        PlanckScale hb(cfg.hbar);
        LogGrid grid = grid_from(cfg);
        AffineSymbol sym = symbol_from(cfg);
        OperatorMatrix K = quantize_kernel(sym, grid, hb);
        {
            TableWriter w(cfg.out_dir + "/kernel_matrix.dat", "quantized kernel (strided dump)",
                          full_header(cfg), {"i", "j", "x_i", "x_j", "re", "im"});
            write_conventions(w);
            for (int i = 0; i < grid.size(); i += cfg.matrix_stride)
                for (int j = 0; j < grid.size(); j += cfg.matrix_stride)
                    w.row({(double)i, (double)j, grid.x(i), grid.x(j), K.at(i, j).real(),
                           K.at(i, j).imag()});
        }
        // round-trip error map on the inner half window
        FieldGrids dec = field_grids(cfg, cfg.field_stride);
        AffineSymbol back = symbol_of(K, dec.a, dec.b, hb);
        AffineSymbol tsym = symbol_from_on(cfg, dec.a, dec.b);
        double supref = 0.0, maxerr_inner = 0.0;
        for (const cplx& v : tsym.values) supref = std::max(supref, std::abs(v));
        {
            TableWriter w(cfg.out_dir + "/roundtrip_error.dat",
                          "inverse-map reconstruction error (inner half window flagged)",
                          full_header(cfg), {"a", "b", "err", "inner"});
            double la_lo = std::log(cfg.a_min), la_hi = std::log(cfg.a_max);
            double la_q = 0.25 * (la_hi - la_lo);
            double b_q = 0.25 * (cfg.b_max - cfg.b_min);
            for (int ia = 0; ia < dec.a.size(); ++ia)
                for (int ib = 0; ib < dec.b.size(); ++ib) {
                    double a = dec.a.x(ia), b = dec.b.point(ib);
                    bool inner = std::log(a) > la_lo + la_q && std::log(a) < la_hi - la_q &&
                                 b > cfg.b_min + b_q && b < cfg.b_max - b_q;
                    double err = std::abs(back.at(ia, ib) - tsym.at(ia, ib));
                    if (inner) maxerr_inner = std::max(maxerr_inner, err);
                    w.row({a, b, err, inner ? 1.0 : 0.0});
                }
            w.comment("sup_inner_rel = " + fmt(maxerr_inner / supref));
        }
        if (maxerr_inner / supref > 1e-3) {
            std::fprintf(stderr, "error: gate: round-trip inner error %.3e exceeds 1e-3\n",
                         maxerr_inner / supref);
            return 3;
        }
        return 0;
    });
}

int cmd_evolve(const RunConfig& cfg) {
    return guard([&]() -> int {
        std::filesystem::create_directories(cfg.out_dir);
        PlanckScale hb(cfg.hbar);
        LogGrid grid = grid_from(cfg);
        HalfLineFunction psi = state_from(cfg, grid);
        AffineSymbol sym = symbol_from(cfg);
        OperatorMatrix H = quantize_kernel(sym, grid, hb);
        PropagationPlan plan(H, hb);
        FieldGrids dec = field_grids(cfg, cfg.field_stride);
        PhaseWindow mw;
        double n0 = norm(psi), e0 = plan.energy(psi), m0 = husimi_window_mass(psi, mw, hb);
        TableWriter cons(cfg.out_dir + "/conservation.dat", "norm/energy/mass along the flow",
                         full_header(cfg), {"t", "norm", "energy", "window_mass"});
        write_conventions(cons);
        cons.row({0.0, n0, e0, m0});
        for (int k = 0; k <= cfg.n_t; ++k) {
            double t = cfg.t_max * k / cfg.n_t;
            HalfLineFunction pt = plan.propagate(psi, t);
            HusimiField f = husimi_pure(pt, dec.a, dec.b, hb);
            char name[64];
            std::snprintf(name, sizeof(name), "/husimi_t%03d.dat", k);
            TableWriter w(cfg.out_dir + name, "husimi snapshot", full_header(cfg),
                          {"t", "a", "b", "value"});
            for (int ia = 0; ia < dec.a.size(); ++ia)
                for (int ib = 0; ib < dec.b.size(); ++ib)
                    w.row({t, dec.a.x(ia), dec.b.point(ib), f.at(ia, ib)});
            if (k > 0)
                cons.row({t, norm(pt), plan.energy(pt), husimi_window_mass(pt, mw, hb)});
        }
        return 0;
    });
}

int cmd_verify(const RunConfig& cfg) {
    return guard([&]() -> int {
        std::filesystem::create_directories(cfg.out_dir);
        PlanckScale hb(cfg.hbar);
        LogGrid grid = grid_from(cfg);
        HalfLineFunction psi = state_from(cfg, grid);
        bool gate_failed = false;
        TableWriter rep(cfg.out_dir + "/verify_report.dat", "invariant suite", full_header(cfg),
                        {"check", "value", "tolerance", "pass"});
        write_conventions(rep);
        int check_id = 0;
        auto gate = [&](const std::string& name, double value, double tol) {
            bool ok = value <= tol;
            if (!ok) gate_failed = true;
            rep.comment("check " + std::to_string(++check_id) + ": " + name);
            rep.row({(double)check_id, value, tol, ok ? 1.0 : 0.0});
        };

        // identity resolution
        {
            PhaseWindow w;
            double d1 = identity_resolution_defect(
                coherent_state(PhasePoint(1.0, 0.0), hb, grid).state, w, hb);
            gate("identity resolution, coherent probe", d1, 1e-3);
            HalfLineFunction mono =
                sample(grid, [](double x) { return cplx(x * x * std::exp(-x), 0.0); });
            mono = (1.0 / norm(mono)) * mono;
            double d2 = identity_resolution_defect(mono, w, hb);
            gate("identity resolution, x^2 e^-x probe", d2, 5e-3);
        }
        // two-path husimi agreement on the quantized symbol
        {
            AffineSymbol sym = symbol_from(cfg);
            OperatorMatrix K = quantize_kernel(sym, grid, hb);
            LogGrid ia = make_log_grid(std::sqrt(cfg.a_min * 1.0), std::sqrt(cfg.a_max * 1.0), 33);
            UniformGrid ibg(0.5 * cfg.b_min, 0.5 * cfg.b_max, 33);
            HusimiField direct = husimi_operator(K, ia, ibg, hb);
            CriticalLineGrid contour(cfg.tau_max, cfg.m);
            UniformGrid xi(-cfg.xi_max, cfg.xi_max, cfg.m_xi);
            MellinSpectrum spec = symbol_mellin(sym, contour, xi);
            HusimiField viaM = husimi_from_mellin(spec, ia, ibg, hb);
            double sup = 0.0, diff = 0.0;
            for (size_t k = 0; k < direct.values.size(); ++k) {
                sup = std::max(sup, std::abs(direct.values[k]));
                diff = std::max(diff, std::abs(direct.values[k] - viaM.values[k]));
            }
            gate("husimi two-path sup-rel difference", diff / sup, 1e-3);
            // positivity on a positive operator (coherent projector)
            HalfLineFunction cst = coherent_state(PhasePoint(1.0, 0.0), hb, grid).state;
            OperatorMatrix proj = rank_one(cst);
            HusimiField hop = husimi_operator(proj, ia, ibg, hb);
            double neg1 = 0.0;
            for (double v : hop.values) neg1 = std::min(neg1, v);
            UniformGrid sym_b = symbol_translation_window(grid, upper_support(cst), cfg.hbar);
            AffineSymbol psym = symbol_of(proj, wide_symbol_grid(), sym_b, hb);
            MellinSpectrum pspec = symbol_mellin(psym, contour, xi);
            HusimiField hmel = husimi_from_mellin(pspec, ia, ibg, hb);
            double neg2 = 0.0;
            for (double v : hmel.values) neg2 = std::min(neg2, v);
            gate("husimi positivity (direct path)", -neg1, 1e-12);
            gate("husimi positivity (contour path)", -neg2, 1e-10);
        }
        // evolution three-way
        {
            AffineSymbol sym = symbol_from(cfg);
            std::vector<PhasePoint> probes;
            int side = std::max(1, (int)std::lround(std::sqrt((double)cfg.probes)));
            for (int i = 0; i < side && (int)probes.size() < cfg.probes; ++i)
                for (int j = 0; j < side && (int)probes.size() < cfg.probes; ++j) {
                    double a = 0.7 * std::pow(1.8 / 0.7, side == 1 ? 0.5 : (double)i / (side - 1));
                    double b = -1.5 + (side == 1 ? 1.5 : 3.0 * j / (side - 1));
                    probes.emplace_back(a, b);
                }
            VerifyEvolutionParams params;
            EvolutionReport er = verify_evolution(sym, psi, probes, hb, params);
            gate("rate: |finite difference - direct|", er.max_fd_vs_direct, 1e-5);
            gate("rate: |direct - contour kernel|", er.max_direct_vs_kernel, 1e-3);
            gate("stationary-state rates", er.stationary_max_rate, 1e-4);
            gate("norm drift", er.norm_drift, 1e-8);
            gate("energy drift", er.energy_drift, 1e-8);
            gate("husimi mass drift", er.mass_drift, 1e-2);
            {
                TableWriter w(cfg.out_dir + "/theorem_rates.dat", "three-way rate comparison",
                              full_header(cfg),
                              {"a", "b", "fd", "direct", "kernel", "fd_vs_direct",
                               "direct_vs_kernel"});
                for (const auto& pr : er.probes)
                    w.row({pr.p.a, pr.p.b, pr.fd_rate, pr.direct_rate, pr.kernel_rate,
                           pr.fd_vs_direct, pr.direct_vs_kernel});
            }
            {
                TableWriter w(cfg.out_dir + "/variant_residuals.dat",
                              "per-variant |kernel - direct| residuals", full_header(cfg),
                              {"variant_id", "max_abs_residual"});
                for (size_t i = 0; i < er.variants.size(); ++i) {
                    w.comment("variant " + std::to_string(i) + ": " + er.variants[i].name);
                    w.row({(double)i, er.variants[i].max_abs_residual});
                }
            }
            {
                std::ofstream conv(cfg.out_dir + "/conventions.dat");
                conv << er.conventions;
            }
        }
        if (gate_failed) {
            std::fprintf(stderr, "error: gate: one or more verification gates failed\n");
            return 3;
        }
        return 0;
    });
}

} // namespace halfline
