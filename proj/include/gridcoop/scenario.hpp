#pragma once

#include "gridcoop/coordination.hpp"
#include "gridcoop/feeder.hpp"
#include "gridcoop/inverter.hpp"
#include "gridcoop/profiles.hpp"
#include "gridcoop/simulation.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gridcoop {

/// Parsed scenario document. Paths are resolved against the scenario's
/// directory. See docs/file_formats.md for the grammar.
struct ScenarioFile {
    std::string feeder_path;
    std::string profiles_path;
    std::vector<InverterAgent> agents;
    std::vector<std::pair<std::string, std::string>> links;
    SimConfig config;
    std::vector<ControlMethod> methods;
};

/// Throws ParseError on syntax problems; cross-references are checked later.
ScenarioFile parse_scenario(std::string_view text, const std::string& base_dir);
ScenarioFile load_scenario(const std::string& path);

/// Scenario with its referenced files read and cross-checked.
struct LoadedScenario {
    ScenarioFile file;
    FeederModel feeder;
    Profiles profiles;
    /// Present when the declared links give a globally reachable agent.
    std::optional<CommTopology> topology;
};

/// Reads the feeder and profile files and resolves topology links.
/// Throws on unreadable or invalid inputs; an unreachable topology is
/// left empty rather than thrown, so non-communicating methods still run.
LoadedScenario prepare_scenario(const ScenarioFile& file);

struct ValidationCheck {
    std::string name;
    bool passed = false;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;

    bool ok() const;
    /// True when the scenario file itself (or a file it references) could not be read.
    bool missing_file = false;
};

/// Static checks without running: scenario syntax, feeder, profiles,
/// window coverage, agents, topology reachability (only when a method in
/// `methods` communicates), simulation settings. Never throws.
ValidationReport validate_scenario(const std::string& path, const std::vector<ControlMethod>& methods);
ValidationReport validate_scenario(const std::string& path);

/// Runs one method with the scenario's settings.
ScenarioResults run_method(const LoadedScenario& scenario, ControlMethod method);

/// All five methods, no-control first. Runs may proceed on separate threads.
std::vector<ScenarioResults> run_comparison(const LoadedScenario& scenario, bool concurrent = true);

}  // namespace gridcoop
