#pragma once

#include <map>
#include <string>
#include <vector>

#include "halfline/affine.hpp"
#include "halfline/grid.hpp"

namespace halfline {

/// Flat key=value run configuration; unknown keys are rejected.
struct RunConfig {
    double hbar = 1.0;
    // half-line grid
    double x_min = 1e-4, x_max = 40.0;
    int n = 2048;
    // phase-space field window
    double a_min = 0.1, a_max = 10.0;
    int n_a = 256;
    double b_min = -12.0, b_max = 12.0;
    int n_b = 512;
    // critical-line contour and xi grid
    double tau_max = 60.0;
    int m = 481;
    double xi_max = 16.0;
    int m_xi = 257;
    // state and symbol families
    std::string state = "coherent";
    std::string state_params = "1,0";
    std::string symbol_a = "exp_scale";
    std::string symbol_a_params = "0.5";
    std::string symbol_b = "gauss";
    std::string symbol_b_params = "0,1";
    // evolution
    double t_max = 5.0;
    int n_t = 6;
    // output controls
    std::string out_dir = "out";
    int probes = 25;
    int field_stride = 4;  // decimation of the slow field paths
    int matrix_stride = 8; // decimation of kernel matrix dumps

    std::map<std::string, std::string> echo() const;
};

/// Parse `key = value` lines ('#' comments); then apply HALFLINE_<KEY>
/// environment overrides. Throws config_error on unknown keys or bad values.
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text);
void apply_env_overrides(RunConfig& cfg);

LogGrid grid_from(const RunConfig& cfg);
HalfLineFunction state_from(const RunConfig& cfg, const LogGrid& grid);
/// Symbol sampled on the window [a_min,a_max] x [b_min,b_max] of the config.
AffineSymbol symbol_from(const RunConfig& cfg);
/// Same families on an explicit product grid.
AffineSymbol symbol_from_on(const RunConfig& cfg, const LogGrid& a_grid, const UniformGrid& b_grid);

/// Columnar text output: '#' header lines (config echo + conventions +
/// column names), then space-separated rows printed with %.17g.
class TableWriter {
public:
    TableWriter(const std::string& path, const std::string& title,
                const std::map<std::string, std::string>& header,
                const std::vector<std::string>& columns);
    ~TableWriter();
    void row(const std::vector<double>& values);
    void comment(const std::string& line);

private:
    void* f_;
};

struct Table {
    std::map<std::string, std::string> header;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// Round-trip parser for the documented output format.
Table read_table(const std::string& path);

// Subcommands; return a process exit code:
//   0 success, 2 config error, 3 numerical gate failure, 4 internal error.
int cmd_husimi(const RunConfig& cfg);
int cmd_wigner(const RunConfig& cfg);
int cmd_quantize(const RunConfig& cfg);
int cmd_verify(const RunConfig& cfg);
int cmd_evolve(const RunConfig& cfg);

} // namespace halfline
