// Command-line front end: scenario simulation, admissibility checks,
// nonrelativistic-limit sweeps, and canned scenario generation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rcsbf/io.hpp"

namespace {

std::vector<double> parse_c_list(const std::string& text) {
    std::vector<double> cs;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) cs.push_back(std::stod(item));
    }
    return cs;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Relativistic Cucker-Smale flocking with inter-particle bonding force"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::string c_list = "10,20,40,80";
    std::string scenario_name;
    std::uint64_t seed = 0;

    auto* sim = app.add_subcommand("simulate", "Run a scenario from a config file");
    sim->add_option("--config", config_path, "Scenario config (JSON)")->required();
    sim->add_option("--out", out_dir, "Output directory");

    auto* chk = app.add_subcommand("check", "Print the admissibility report for a config");
    chk->add_option("--config", config_path, "Scenario config (JSON)")->required();

    auto* swp = app.add_subcommand("sweep-c", "Nonrelativistic-limit sweep over c values");
    swp->add_option("--config", config_path, "Base scenario config (JSON)")->required();
    swp->add_option("--c", c_list, "Comma-separated speed-of-light values");
    swp->add_option("--out", out_dir, "Output directory");

    auto* scn = app.add_subcommand("scenario", "Generate and run a canned scenario");
    scn->add_option("name", scenario_name, "One of: pattern, collision, flocking, sphere")
        ->required();
    scn->add_option("--seed", seed, "Random seed");
    scn->add_option("--out", out_dir, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            const rcsbf::ScenarioSpec spec = rcsbf::load_scenario_file(config_path);
            const rcsbf::RunArtifacts art = rcsbf::run_scenario(spec, out_dir);
            std::cout << art.summary().dump(2) << "\n";
            return 0;
        }
        if (chk->parsed()) {
            const rcsbf::ScenarioSpec spec = rcsbf::load_scenario_file(config_path);
            const rcsbf::ScenarioRuntime rt = rcsbf::materialize(spec);
            const rcsbf::GeometryBackend* b = rt.backend ? &*rt.backend : nullptr;
            const auto rep =
                rcsbf::admissibility_report(rt.initial_state, rt.params, b, rt.classical);
            std::cout << rcsbf::to_json(rep).dump(2) << "\n";
            return 0;
        }
        if (swp->parsed()) {
            const rcsbf::ScenarioSpec spec = rcsbf::load_scenario_file(config_path);
            const rcsbf::ScenarioSpec& base =
                spec.kind == rcsbf::ScenarioSpec::Kind::LimitSweep ? *spec.sweep_base : spec;
            std::vector<double> cs = spec.kind == rcsbf::ScenarioSpec::Kind::LimitSweep
                                         ? spec.sweep_cs
                                         : parse_c_list(c_list);
            if (swp->count("--c") > 0) cs = parse_c_list(c_list);
            const rcsbf::SweepResult res =
                rcsbf::run_limit_sweep(base, cs, base.stepper.t_end);
            std::filesystem::create_directories(out_dir);
            std::ofstream out(std::filesystem::path(out_dir) / "sweep.json");
            out << rcsbf::to_json(res).dump(2) << "\n";
            std::cout << rcsbf::to_json(res).dump(2) << "\n";
            return 0;
        }
        if (scn->parsed()) {
            rcsbf::ScenarioSpec spec;
            if (scenario_name == "pattern") {
                spec = rcsbf::make_default_pattern_scenario(seed);
            } else if (scenario_name == "collision") {
                spec = rcsbf::make_default_collision_scenario();
            } else if (scenario_name == "flocking") {
                spec = rcsbf::make_default_flocking_scenario(seed);
            } else if (scenario_name == "sphere") {
                spec = rcsbf::make_default_sphere_scenario(seed);
            } else {
                std::cerr << "unknown scenario '" << scenario_name << "'\n";
                return 2;
            }
            std::filesystem::create_directories(out_dir);
            std::ofstream cfg(std::filesystem::path(out_dir) / "config.json");
            cfg << rcsbf::serialize_scenario(spec).dump(2) << "\n";
            const rcsbf::RunArtifacts art = rcsbf::run_scenario(spec, out_dir);
            std::cout << art.summary().dump(2) << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
