#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "halfline/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"phase-space analysis on the half-line: scale/translation "
                 "quantization, Husimi and Wigner transforms, Mellin numerics, "
                 "and Schrodinger evolution checks"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int probes = -1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "config file (key = value lines)");
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        sub->add_option("--probes", probes, "number of probe phase points");
    };
    CLI::App* husimi = app.add_subcommand("husimi", "Husimi field by both computation paths");
    CLI::App* wigner = app.add_subcommand("wigner", "scale-translation distribution of a state");
    CLI::App* quantize = app.add_subcommand("quantize", "kernel dump and round-trip error map");
    CLI::App* verify = app.add_subcommand("verify", "full invariant suite with pass/fail gates");
    CLI::App* evolve = app.add_subcommand("evolve", "Husimi snapshots along the flow");
    for (CLI::App* sub : {husimi, wigner, quantize, verify, evolve}) add_common(sub);

    CLI11_PARSE(app, argc, argv);

    halfline::RunConfig cfg;
    try {
        if (!config_path.empty()) cfg = halfline::parse_config_file(config_path);
        halfline::apply_env_overrides(cfg);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (probes > 0) cfg.probes = probes;
    } catch (const halfline::config_error& e) {
        std::fprintf(stderr, "error: config: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: config: %s\n", e.what());
        return 2;
    }

    if (husimi->parsed()) return halfline::cmd_husimi(cfg);
    if (wigner->parsed()) return halfline::cmd_wigner(cfg);
    if (quantize->parsed()) return halfline::cmd_quantize(cfg);
    if (verify->parsed()) return halfline::cmd_verify(cfg);
    if (evolve->parsed()) return halfline::cmd_evolve(cfg);
    return 2;
}
