#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "halfline/cli.hpp"
#include "halfline/phase.hpp"

using namespace halfline;

TEST_CASE("config parsing: defaults, comments, overrides, rejection") {
    RunConfig c = parse_config_text("# comment only\n\n");
    CHECK(c.hbar == 1.0);
    CHECK(c.n == 2048);

    RunConfig c2 = parse_config_text("hbar = 2\nn = 512 # inline comment\nstate = monomial\n"
                                     "state_params = 2, 1.5\n");
    CHECK(c2.hbar == 2.0);
    CHECK(c2.n == 512);
    CHECK(c2.state == "monomial");

    CHECK_THROWS_AS(parse_config_text("unknown_key = 3\n"), config_error);
    CHECK_THROWS_AS(parse_config_text("hbar\n"), config_error);
    CHECK_THROWS_AS(parse_config_text("hbar = frog\n"), config_error);
    CHECK_THROWS_AS(parse_config_text("hbar = -1\n"), config_error);
    CHECK_THROWS_AS(parse_config_text("m = 480\n"), config_error); // even contour count
}

TEST_CASE("environment overrides") {
    RunConfig c = parse_config_text("hbar = 1\n");
    setenv("HALFLINE_HBAR", "0.5", 1);
    setenv("HALFLINE_N", "256", 1);
    apply_env_overrides(c);
    unsetenv("HALFLINE_HBAR");
    unsetenv("HALFLINE_N");
    CHECK(c.hbar == 0.5);
    CHECK(c.n == 256);
}

TEST_CASE("state families") {
    RunConfig c;
    c.n = 512;
    LogGrid g = grid_from(c);
    PlanckScale hb(c.hbar);

    c.state = "coherent";
    c.state_params = "1.2,0.4";
    HalfLineFunction s1 = state_from(c, g);
    CHECK(std::abs(norm(s1) - 1.0) < 1e-8);

    c.state = "monomial";
    c.state_params = "2,1";
    HalfLineFunction s2 = state_from(c, g);
    CHECK(std::abs(norm(s2) - 1.0) < 1e-12);

    c.state = "coherent_sum";
    c.state_params = "1,0,1,0; 1.5,0.8,0,0.5";
    HalfLineFunction s3 = state_from(c, g);
    CHECK(std::abs(norm(s3) - 1.0) < 1e-12);

    c.state = "plane_wave";
    CHECK_THROWS_AS(state_from(c, g), config_error);
    c.state = "monomial";
    c.state_params = "2";
    CHECK_THROWS_AS(state_from(c, g), config_error);
}

TEST_CASE("table writer round trip") {
    std::filesystem::create_directories("test_out");
    RunConfig c;
    {
        TableWriter w("test_out/t.dat", "round trip probe", c.echo(), {"x", "re", "im"});
        w.comment("free comment");
        w.row({1.0 / 3.0, -2.718281828459045e-7, 3.14159});
        w.row({1e-300, 5.0e200, -0.0});
    }
    Table t = read_table("test_out/t.dat");
    REQUIRE(t.columns.size() == 3);
    CHECK(t.columns[1] == "re");
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][0] == 1.0 / 3.0);
    CHECK(t.rows[0][1] == -2.718281828459045e-7);
    CHECK(t.rows[1][1] == 5.0e200);
    CHECK(t.header.at("n") == "2048");
}

namespace {

RunConfig mini_config(const std::string& out) {
    RunConfig c;
    c.n = 384;
    c.x_min = 1e-4;
    c.x_max = 40.0;
    c.a_min = 0.3;
    c.a_max = 3.0;
    c.n_a = 24;
    c.b_min = -3.0;
    c.b_max = 3.0;
    c.n_b = 25;
    c.tau_max = 30.0;
    c.m = 241;
    c.xi_max = 12.0;
    c.m_xi = 193;
    c.probes = 4;
    c.field_stride = 2;
    c.n_t = 2;
    c.t_max = 1.0;
    c.out_dir = out;
    return c;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("husimi command: output files and peak diagnostic") {
    RunConfig c = mini_config("test_out/husimi");
    int rc = cmd_husimi(c);
    CHECK(rc == 0);
    Table diag = read_table("test_out/husimi/husimi_diagnostics.dat");
    REQUIRE(diag.rows.size() == 1);
    double peak = diag.rows[0][2], expected = diag.rows[0][3];
    CHECK(std::abs(peak - expected) < 0.01 * expected);
    Table field = read_table("test_out/husimi/husimi_direct.dat");
    CHECK(field.rows.size() == (size_t)c.n_a * c.n_b);
    CHECK(field.columns == std::vector<std::string>{"a", "b", "value"});
}

TEST_CASE("wigner command reports both normalizations") {
    RunConfig c = mini_config("test_out/wigner");
    CHECK(cmd_wigner(c) == 0);
    Table diag = read_table("test_out/wigner/wigner_diagnostics.dat");
    REQUIRE(diag.rows.size() == 1);
    // integral = pi ||psi||^2 for the normalized coherent state
    CHECK(std::abs(diag.rows[0][0] - diag.rows[0][2]) < 5e-3 * diag.rows[0][2]);
}

TEST_CASE("quantize command round trip gate") {
    RunConfig c = mini_config("test_out/quantize");
    c.a_min = 0.01;
    c.a_max = 100.0;
    c.n_a = 192;
    c.b_min = -8.0;
    c.b_max = 8.0;
    c.n_b = 257;
    CHECK(cmd_quantize(c) == 0);
    Table m = read_table("test_out/quantize/kernel_matrix.dat");
    CHECK(m.columns.size() == 6);
    CHECK(!m.rows.empty());
}

TEST_CASE("verify command is deterministic") {
    RunConfig c1 = mini_config("test_out/verify1");
    c1.a_min = 0.01;
    c1.a_max = 100.0;
    c1.n_a = 128;
    c1.b_min = -8.0;
    c1.b_max = 8.0;
    c1.n_b = 193;
    RunConfig c2 = c1;
    c2.out_dir = "test_out/verify2";
    int r1 = cmd_verify(c1);
    int r2 = cmd_verify(c2);
    CHECK(r1 == r2);
    for (const char* name : {"verify_report.dat", "theorem_rates.dat", "variant_residuals.dat",
                             "conventions.dat"}) {
        std::string a = slurp(std::string("test_out/verify1/") + name);
        std::string b = slurp(std::string("test_out/verify2/") + name);
        bool identical = a == b;
        CHECK(identical);
        CHECK(!a.empty());
    }
    // header echoes the config except the output directory
    Table t1 = read_table("test_out/verify1/verify_report.dat");
    CHECK(t1.header.at("n") == "384");
}

TEST_CASE("evolve command writes snapshots and conservation data") {
    RunConfig c = mini_config("test_out/evolve");
    c.a_min = 0.01;
    c.a_max = 100.0;
    c.n_a = 128;
    c.b_min = -8.0;
    c.b_max = 8.0;
    c.n_b = 193;
    CHECK(cmd_evolve(c) == 0);
    Table cons = read_table("test_out/evolve/conservation.dat");
    REQUIRE(cons.rows.size() >= 3);
    for (const auto& row : cons.rows) {
        CHECK(std::abs(row[1] - 1.0) < 1e-8);                      // norm
        CHECK(std::abs(row[3] - cons.rows[0][3]) < 0.01 * cons.rows[0][3]); // mass
    }
    CHECK(std::filesystem::exists("test_out/evolve/husimi_t000.dat"));
    CHECK(std::filesystem::exists("test_out/evolve/husimi_t002.dat"));
}
