#include "rcsbf/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "rcsbf/trajectory_analysis.hpp"

namespace rcsbf {

namespace {

Json matrix_to_json(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) throw ParamError("config: expected a non-empty matrix");
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j[0].size());
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (static_cast<int>(j[i].size()) != cols) throw ParamError("config: ragged matrix");
        for (int k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
    }
    return m;
}

Json kernel_to_json(const KernelSpec& k) {
    Json j;
    if (k.kind == KernelSpec::Kind::CuckerSmale) {
        j["kind"] = "cucker_smale";
        j["beta"] = k.beta;
    } else {
        j["kind"] = "constant";
        j["phi0"] = k.phi0;
    }
    return j;
}

KernelSpec kernel_from_json(const Json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "cucker_smale") return KernelSpec::cucker_smale(j.at("beta").get<double>());
    if (kind == "constant") return KernelSpec::constant(j.at("phi0").get<double>());
    throw ParamError("config: unknown kernel kind '" + kind + "'");
}

Json params_to_json(const ModelParams& p) {
    Json j;
    if (p.c.is_infinite()) {
        j["c"] = "infinite";
    } else {
        j["c"] = p.c.value();
    }
    j["kappa0"] = p.kappa0;
    j["kappa1"] = p.kappa1;
    j["kappa2"] = p.kappa2;
    j["kernel"] = kernel_to_json(p.kernel);
    j["N"] = p.N;
    j["d"] = p.d;
    if (p.targets.size() > 0) j["targets"] = matrix_to_json(p.targets.matrix());
    return j;
}

ModelParams params_from_json(const Json& j) {
    ModelParams p;
    const auto& c = j.at("c");
    if (c.is_string()) {
        if (c.get<std::string>() != "infinite") throw ParamError("config: c must be a number or \"infinite\"");
        p.c = SpeedOfLight::infinite();
    } else {
        p.c = SpeedOfLight::finite(c.get<double>());
    }
    p.kappa0 = j.at("kappa0").get<double>();
    p.kappa1 = j.at("kappa1").get<double>();
    p.kappa2 = j.at("kappa2").get<double>();
    p.kernel = kernel_from_json(j.at("kernel"));
    p.N = j.at("N").get<int>();
    p.d = j.at("d").get<int>();
    if (j.contains("targets")) p.targets = TargetDistances(matrix_from_json(j["targets"]));
    return p;
}

Json stepper_to_json(const StepperConfig& s) {
    Json j;
    j["scheme"] = s.scheme == StepperConfig::Scheme::RK4 ? "rk4" : "euler";
    j["dt"] = s.dt;
    j["t_end"] = s.t_end;
    j["collision_epsilon"] = s.collision_epsilon;
    j["record_stride"] = s.record_stride;
    return j;
}

StepperConfig stepper_from_json(const Json& j) {
    StepperConfig s;
    const std::string scheme = j.at("scheme").get<std::string>();
    if (scheme == "rk4") {
        s.scheme = StepperConfig::Scheme::RK4;
    } else if (scheme == "euler") {
        s.scheme = StepperConfig::Scheme::Euler;
    } else {
        throw ParamError("config: unknown stepper scheme '" + scheme + "'");
    }
    s.dt = j.at("dt").get<double>();
    s.t_end = j.at("t_end").get<double>();
    s.collision_epsilon = j.at("collision_epsilon").get<double>();
    s.record_stride = j.at("record_stride").get<int>();
    return s;
}

Json backend_to_json(const GeometryBackend& b) {
    Json j;
    switch (b.kind()) {
        case GeometryBackend::Kind::Euclidean:
            j["kind"] = "euclidean";
            break;
        case GeometryBackend::Kind::Sphere:
            j["kind"] = "sphere";
            j["radius"] = b.radius();
            break;
        case GeometryBackend::Kind::Hyperbolic:
            j["kind"] = "hyperbolic";
            j["radius"] = b.radius();
            break;
    }
    j["d"] = b.dim();
    return j;
}

GeometryBackend backend_from_json(const Json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    const int d = j.at("d").get<int>();
    if (kind == "euclidean") return GeometryBackend::euclidean(d);
    if (kind == "sphere") return GeometryBackend::sphere(d, j.at("radius").get<double>());
    if (kind == "hyperbolic") return GeometryBackend::hyperbolic(d, j.at("radius").get<double>());
    throw ParamError("config: unknown backend kind '" + kind + "'");
}

std::string kind_name(ScenarioSpec::Kind k) {
    switch (k) {
        case ScenarioSpec::Kind::Pattern: return "pattern";
        case ScenarioSpec::Kind::CollisionExample: return "collision";
        case ScenarioSpec::Kind::Flocking: return "flocking";
        case ScenarioSpec::Kind::LimitSweep: return "limit_sweep";
        case ScenarioSpec::Kind::Manifold: return "manifold";
    }
    return "flocking";
}

}  // namespace

Json serialize_scenario(const ScenarioSpec& spec) {
    Json j;
    j["kind"] = kind_name(spec.kind);
    j["seed"] = spec.seed;
    j["params"] = params_to_json(spec.params);
    j["stepper"] = stepper_to_json(spec.stepper);
    switch (spec.kind) {
        case ScenarioSpec::Kind::Pattern: {
            Json pts = Json::array();
            for (const auto& p : spec.pattern_points) {
                Json row = Json::array();
                for (int k = 0; k < p.size(); ++k) row.push_back(p[k]);
                pts.push_back(std::move(row));
            }
            j["pattern"] = {{"points", std::move(pts)},
                            {"position_jitter", spec.pattern_position_jitter},
                            {"velocity_scale", spec.pattern_velocity_scale}};
            break;
        }
        case ScenarioSpec::Kind::CollisionExample:
            j["collision"] = {{"R", spec.collision_R},
                              {"x0", {spec.collision_x1, spec.collision_x2}},
                              {"v0", {spec.collision_v1, spec.collision_v2}}};
            break;
        case ScenarioSpec::Kind::Flocking:
            j["flocking"] = {{"box", spec.flocking_box},
                             {"momentum_scale", spec.flocking_momentum_scale},
                             {"min_separation", spec.flocking_min_separation},
                             {"target_distance", spec.flocking_target_distance}};
            break;
        case ScenarioSpec::Kind::Manifold: {
            Json m;
            m["backend"] = backend_to_json(*spec.backend);
            m["cap_radius"] = spec.manifold_cap_radius;
            m["momentum_scale"] = spec.manifold_momentum_scale;
            if (spec.initial_x) m["x0"] = matrix_to_json(*spec.initial_x);
            if (spec.initial_w) m["w0"] = matrix_to_json(*spec.initial_w);
            j["manifold"] = std::move(m);
            break;
        }
        case ScenarioSpec::Kind::LimitSweep: {
            Json s;
            s["cs"] = spec.sweep_cs;
            s["base"] = serialize_scenario(*spec.sweep_base);
            j["sweep"] = std::move(s);
            break;
        }
    }
    return j;
}

ScenarioSpec parse_scenario(const Json& config) {
    ScenarioSpec spec;
    const std::string kind = config.at("kind").get<std::string>();
    if (kind == "pattern") {
        spec.kind = ScenarioSpec::Kind::Pattern;
    } else if (kind == "collision") {
        spec.kind = ScenarioSpec::Kind::CollisionExample;
    } else if (kind == "flocking") {
        spec.kind = ScenarioSpec::Kind::Flocking;
    } else if (kind == "manifold" || kind == "sphere") {
        spec.kind = ScenarioSpec::Kind::Manifold;
    } else if (kind == "limit_sweep") {
        spec.kind = ScenarioSpec::Kind::LimitSweep;
    } else {
        throw ParamError("config: unknown scenario kind '" + kind + "'");
    }
    spec.seed = config.value("seed", 0ULL);
    spec.params = params_from_json(config.at("params"));
    spec.stepper = stepper_from_json(config.at("stepper"));

    switch (spec.kind) {
        case ScenarioSpec::Kind::Pattern: {
            const Json& p = config.at("pattern");
            for (const auto& row : p.at("points")) {
                Eigen::VectorXd v(row.size());
                for (std::size_t k = 0; k < row.size(); ++k) v[k] = row[k].get<double>();
                spec.pattern_points.push_back(std::move(v));
            }
            spec.pattern_position_jitter = p.value("position_jitter", 0.05);
            spec.pattern_velocity_scale = p.value("velocity_scale", 0.05);
            break;
        }
        case ScenarioSpec::Kind::CollisionExample: {
            const Json& c = config.at("collision");
            spec.collision_R = c.at("R").get<double>();
            spec.collision_x1 = c.at("x0")[0].get<double>();
            spec.collision_x2 = c.at("x0")[1].get<double>();
            spec.collision_v1 = c.at("v0")[0].get<double>();
            spec.collision_v2 = c.at("v0")[1].get<double>();
            break;
        }
        case ScenarioSpec::Kind::Flocking: {
            const Json f = config.value("flocking", Json::object());
            spec.flocking_box = f.value("box", 2.0);
            spec.flocking_momentum_scale = f.value("momentum_scale", 0.2);
            spec.flocking_min_separation = f.value("min_separation", 0.1);
            spec.flocking_target_distance = f.value("target_distance", 2.0);
            break;
        }
        case ScenarioSpec::Kind::Manifold: {
            const Json& m = config.at("manifold");
            spec.backend = backend_from_json(m.at("backend"));
            spec.manifold_cap_radius = m.value("cap_radius", 0.7);
            spec.manifold_momentum_scale = m.value("momentum_scale", 0.1);
            if (m.contains("x0")) spec.initial_x = matrix_from_json(m["x0"]);
            if (m.contains("w0")) spec.initial_w = matrix_from_json(m["w0"]);
            break;
        }
        case ScenarioSpec::Kind::LimitSweep: {
            const Json& s = config.at("sweep");
            spec.sweep_cs = s.at("cs").get<std::vector<double>>();
            spec.sweep_base = std::make_shared<ScenarioSpec>(parse_scenario(s.at("base")));
            break;
        }
    }
    return spec;
}

ScenarioSpec parse_scenario_text(const std::string& text) {
    return parse_scenario(Json::parse(text));
}

ScenarioSpec load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    Json j;
    in >> j;
    return parse_scenario(j);
}

Json to_json(const EnergyReport& r) {
    return Json{{"kinetic", r.kinetic},
                {"potential", r.potential},
                {"total", r.total},
                {"production", r.production}};
}

Json to_json(const FlockingReport& r) {
    return Json{{"max_rel_speed", r.max_rel_speed},
                {"min_pair_dist", r.min_pair_dist},
                {"max_pair_dist", r.max_pair_dist},
                {"momentum_sum_norm", r.momentum_sum_norm}};
}

Json to_json(const AdmissibilityReport& r) {
    Json j{{"r_lower", r.r_lower},
           {"r_upper", r.r_upper},
           {"collision_avoidance_ok", r.collision_avoidance_ok},
           {"flocking_hypotheses_ok", r.flocking_hypotheses_ok}};
    if (r.manifold_wellposed_ok.has_value()) {
        j["manifold_wellposed_ok"] = *r.manifold_wellposed_ok;
    } else {
        j["manifold_wellposed_ok"] = "not_applicable";
    }
    return j;
}

Json to_json(const Termination& t) {
    Json j;
    switch (t.kind) {
        case Termination::Kind::Completed:
            j["kind"] = "completed";
            break;
        case Termination::Kind::CollisionDetected:
            j["kind"] = "collision_detected";
            j["t"] = t.t;
            j["pair"] = {t.pair_i, t.pair_j};
            break;
        case Termination::Kind::InjectivityViolated:
            j["kind"] = "injectivity_violated";
            j["t"] = t.t;
            j["pair"] = {t.pair_i, t.pair_j};
            break;
    }
    return j;
}

Json to_json(const SweepResult& r) {
    return Json{{"cs", r.cs}, {"sup_D", r.sup_Ds}, {"slope", r.slope}};
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError("cannot open for writing: " + path);
    const int m = traj.states.empty() ? 0 : static_cast<int>(traj.states.front().x.cols());
    std::string header = "t,particle";
    for (int k = 0; k < m; ++k) header += ",x" + std::to_string(k);
    for (int k = 0; k < m; ++k) header += ",w" + std::to_string(k);
    std::fprintf(f, "%s\n", header.c_str());
    for (std::size_t r = 0; r < traj.record_count(); ++r) {
        const SystemState& s = traj.states[r];
        for (int i = 0; i < s.particle_count(); ++i) {
            std::fprintf(f, "%.17g,%d", traj.times[r], i);
            for (int k = 0; k < m; ++k) std::fprintf(f, ",%.17g", s.x(i, k));
            for (int k = 0; k < m; ++k) std::fprintf(f, ",%.17g", s.w(i, k));
            std::fputc('\n', f);
        }
    }
    if (std::fclose(f) != 0) throw IoError("failed to close: " + path);
}

void write_diagnostics_jsonl(const std::string& path, const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    for (std::size_t r = 0; r < traj.record_count(); ++r) {
        Json j;
        j["t"] = traj.times[r];
        j["kinetic"] = traj.energies[r].kinetic;
        j["potential"] = traj.energies[r].potential;
        j["total"] = traj.energies[r].total;
        j["production"] = traj.energies[r].production;
        j["max_rel_speed"] = traj.flockings[r].max_rel_speed;
        j["min_pair_dist"] = traj.flockings[r].min_pair_dist;
        j["max_pair_dist"] = traj.flockings[r].max_pair_dist;
        j["momentum_sum_norm"] = traj.flockings[r].momentum_sum_norm;
        out << j.dump() << '\n';
    }
    if (!out) throw IoError("failed while writing: " + path);
}

Json RunArtifacts::summary() const {
    Json j;
    j["admissibility"] = to_json(admissibility);
    j["final_flocking"] = to_json(final_flocking);
    j["energy_identity_residual"] = energy_identity_residual;
    j["termination"] = to_json(termination);
    j["trajectory_path"] = trajectory_path;
    j["diagnostics_path"] = diagnostics_path;
    return j;
}

RunArtifacts run_scenario(const ScenarioSpec& spec, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory: " + out_dir);

    const ScenarioRuntime rt = materialize(spec);
    const GeometryBackend* b = rt.backend ? &*rt.backend : nullptr;
    const Trajectory traj = simulate(rt.initial_state, rt.params, spec.stepper, b, rt.classical);

    RunArtifacts art;
    art.trajectory_path = (fs::path(out_dir) / "trajectory.csv").string();
    art.diagnostics_path = (fs::path(out_dir) / "diagnostics.jsonl").string();
    write_trajectory_csv(art.trajectory_path, traj);
    write_diagnostics_jsonl(art.diagnostics_path, traj);
    art.admissibility = admissibility_report(rt.initial_state, rt.params, b, rt.classical);
    art.final_flocking = traj.flockings.back();
    art.energy_identity_residual = energy_identity_residual(traj);
    art.termination = traj.termination;

    std::ofstream sum((fs::path(out_dir) / "summary.json").string());
    sum << art.summary().dump(2) << '\n';
    return art;
}

}  // namespace rcsbf
