#ifndef RCSBF_IO_HPP
#define RCSBF_IO_HPP

#include <string>

#include <json.hpp>

#include "rcsbf/scenario.hpp"

namespace rcsbf {

using Json = nlohmann::ordered_json;

// Config file <-> ScenarioSpec (1:1 field mapping; see docs/config.md).
ScenarioSpec parse_scenario(const Json& config);
ScenarioSpec parse_scenario_text(const std::string& text);
ScenarioSpec load_scenario_file(const std::string& path);
Json serialize_scenario(const ScenarioSpec& spec);

Json to_json(const EnergyReport& r);
Json to_json(const FlockingReport& r);
Json to_json(const AdmissibilityReport& r);
Json to_json(const Termination& t);
Json to_json(const SweepResult& r);

// Trajectory CSV: header t,particle,x0..x{m-1},w0..w{m-1}, one row per
// particle per record, %.17g formatting.
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

// Diagnostics JSON lines: one object per record with fields t, kinetic,
// potential, total, production, max_rel_speed, min_pair_dist,
// max_pair_dist, momentum_sum_norm.
void write_diagnostics_jsonl(const std::string& path, const Trajectory& traj);

struct RunArtifacts {
    std::string trajectory_path;
    std::string diagnostics_path;
    AdmissibilityReport admissibility;
    FlockingReport final_flocking;
    double energy_identity_residual = 0.0;
    Termination termination;

    Json summary() const;
};

// Executes the scenario, writes trajectory.csv and diagnostics.jsonl under
// out_dir, and returns the summary.
RunArtifacts run_scenario(const ScenarioSpec& spec, const std::string& out_dir);

}  // namespace rcsbf

#endif  // RCSBF_IO_HPP
