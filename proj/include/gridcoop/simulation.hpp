#pragma once

#include "gridcoop/coordination.hpp"
#include "gridcoop/feeder.hpp"
#include "gridcoop/inverter.hpp"
#include "gridcoop/power_flow.hpp"
#include "gridcoop/profiles.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gridcoop {

struct SimConfig {
    /// Half-open window [window_start, window_end) in seconds of day.
    double window_start = 6.5 * 3600.0;
    double window_end = 17.5 * 3600.0;
    int sim_step = 10;
    int control_period = 20;
    ControlMethod method = ControlMethod::NoControl;
    SolverOptions power_flow;
    VoltVarParams volt_var;
    /// Allow active-power curtailment so the ratio may reach +/-1.
    bool var_priority = true;

    /// Throws ValidationError on a bad window, step or cadence.
    void validate() const;
    std::size_t step_count() const;
};

struct AgentSample {
    double v = 0.0;             // per-unit at the agent's bus
    double p_available_kw = 0.0;
    double q_available_kvar = 0.0;
    double p_kw = 0.0;
    double q_kvar = 0.0;
    double alpha = 0.0;
    double f_v = 0.0;
};

struct StepRecord {
    double time = 0.0;
    double ghi = 0.0;
    double load_multiplier = 0.0;
    std::vector<AgentSample> agents;
    double loss_kw = 0.0;
    double loss_kvar = 0.0;
};

struct AgentSummary {
    std::string id;
    double delivered_kwh = 0.0;
    double available_kwh = 0.0;
    double integrated_abs_q_kvarh = 0.0;
    double mean_abs_alpha = 0.0;
    double mean_abs_deviation = 0.0;  // time mean of |1 - v|
};

struct ScenarioSummary {
    double fv_sum = 0.0;                  // sum over steps of F_v
    double fv_sum_then_square = 0.0;      // (sum over steps of F_v)^2
    double fv_square_per_step_sum = 0.0;  // sum over steps of F_v^2
    double mean_loss_kw = 0.0;
    double mean_loss_kvar = 0.0;
    std::vector<AgentSummary> agents;
};

struct AbortInfo {
    std::size_t step = 0;
    double time = 0.0;
    std::string message;
};

struct ScenarioResults {
    ControlMethod method = ControlMethod::NoControl;
    std::vector<std::string> agent_ids;
    std::vector<std::string> agent_buses;
    double step_seconds = 0.0;
    std::vector<StepRecord> steps;
    bool complete = true;
    std::optional<AbortInfo> abort;
    /// Control rounds whose dynamic weights degenerated to uniform ones.
    std::size_t uniform_fallback_rounds = 0;
    ScenarioSummary summary;
};

struct ObjectiveTerms {
    std::vector<double> per_agent;
    double total = 0.0;
};

/// f_m = (1 - v_m)^2 / 2 for each agent and their sum.
ObjectiveTerms objective_terms(const std::vector<double>& voltages);

/// Runs one control method over the window. `topology` is required only
/// for communication methods. Throws ValidationError before the first step
/// on inconsistent inputs; a power-flow failure mid-run instead returns
/// the steps so far with `complete == false` and `abort` set.
ScenarioResults run_scenario(const FeederModel& feeder, const std::vector<InverterAgent>& agents,
                             const std::optional<CommTopology>& topology, const Profiles& profiles,
                             const SimConfig& config);

/// Aggregates derived purely from `results.steps`.
ScenarioSummary summarize(const ScenarioResults& results);

/// Per agent, 100 * (E_baseline - E) / E_baseline over delivered AC energy.
/// nullopt where the baseline delivered nothing. Throws ValidationError
/// when the two runs do not line up.
std::vector<std::optional<double>> curtailment_report(const ScenarioResults& results, const ScenarioResults& baseline);

}  // namespace gridcoop
