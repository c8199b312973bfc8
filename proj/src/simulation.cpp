#include "gridcoop/simulation.hpp"

#include "gridcoop/error.hpp"
#include "gridcoop/number_format.hpp"

#include <cmath>
#include <unordered_set>

namespace gridcoop {

void SimConfig::validate() const {
    if (!std::isfinite(window_start) || !std::isfinite(window_end) || !(window_end > window_start)) {
        throw ValidationError("simulation window end must be after its start");
    }
    if (sim_step <= 0) {
        throw ValidationError("simulation step must be positive");
    }
    if (control_period <= 0 || control_period % sim_step != 0) {
        throw ValidationError("control period must be a positive multiple of the simulation step");
    }
    if (!(power_flow.tolerance > 0.0) || power_flow.max_iterations <= 0) {
        throw ValidationError("power flow tolerance and iteration limit must be positive");
    }
    volt_var.validate();
}

std::size_t SimConfig::step_count() const {
    return static_cast<std::size_t>(std::ceil((window_end - window_start) / sim_step));
}

ObjectiveTerms objective_terms(const std::vector<double>& voltages) {
    ObjectiveTerms out;
    out.per_agent.reserve(voltages.size());
    for (double v : voltages) {
        double d = 1.0 - v;
        out.per_agent.push_back(0.5 * d * d);
        out.total += out.per_agent.back();
    }
    return out;
}

namespace {

struct PreparedAgent {
    std::size_t bus = 0;       // index in the normalized feeder
    double b_mm = 0.0;         // per-unit self-susceptance
};

void check_inputs(const FeederModel& feeder, const std::vector<InverterAgent>& agents,
                  const std::optional<CommTopology>& topology, const Profiles& profiles, const SimConfig& config) {
    config.validate();
    validate_feeder(feeder);
    profiles.validate();
    if (agents.empty()) {
        throw ValidationError("scenario has no inverter agents");
    }
    std::unordered_set<std::string> ids;
    for (const auto& agent : agents) {
        agent.validate();
        if (!ids.insert(agent.id).second) {
            throw ValidationError("duplicate agent id '" + agent.id + "'");
        }
        if (!feeder.has_bus(agent.bus)) {
            throw ValidationError("agent '" + agent.id + "' is attached to unknown bus '" + agent.bus + "'");
        }
    }
    if (!profiles.covers(config.window_start, config.window_end)) {
        throw ValidationError("profiles do not cover the simulation window");
    }
    if (uses_communication(config.method)) {
        if (!topology) {
            throw ValidationError(std::string("method ") + std::string(method_name(config.method)) +
                                  " needs a communication topology");
        }
        if (topology->size() != agents.size()) {
            throw ValidationError("communication topology size does not match agent count");
        }
        if (!has_globally_reachable_node(topology->links)) {
            throw ValidationError("communication topology has no globally reachable agent");
        }
    }
}

}  // namespace

ScenarioResults run_scenario(const FeederModel& feeder, const std::vector<InverterAgent>& agents,
                             const std::optional<CommTopology>& topology, const Profiles& profiles,
                             const SimConfig& config) {
    check_inputs(feeder, agents, topology, profiles, config);

    const auto normalized = to_per_unit(feeder);
    const double s_base = normalized.s_base_kva;
    const std::size_t m = agents.size();
    const auto em = static_cast<Eigen::Index>(m);

    std::vector<PreparedAgent> prepared;
    prepared.reserve(m);
    for (const auto& agent : agents) {
        prepared.push_back(PreparedAgent{normalized.index_of(agent.bus), self_susceptance(feeder, agent.bus)});
    }

    ScenarioResults results;
    results.method = config.method;
    results.step_seconds = config.sim_step;
    for (const auto& agent : agents) {
        results.agent_ids.push_back(agent.id);
        results.agent_buses.push_back(agent.bus);
    }

    std::optional<CoefficientMatrix> fixed_coefficients;
    if (config.method == ControlMethod::AdaptiveFixedWeights) {
        fixed_coefficients = normalize(fixed_weights(*topology), *topology);
    }

    RoundInputs round;
    round.alpha = Eigen::VectorXd::Zero(em);
    round.beta = Eigen::VectorXd::Zero(em);
    round.rating = Eigen::VectorXd::Zero(em);
    round.volt_var = Eigen::VectorXd::Zero(em);
    round.alpha_limit = Eigen::VectorXd::Zero(em);
    round.gradient.assign(m, std::nullopt);
    for (std::size_t i = 0; i < m; ++i) {
        auto ei = static_cast<Eigen::Index>(i);
        round.alpha(ei) = config.method == ControlMethod::NoControl ? 0.0 : std::clamp(agents[i].alpha, -1.0, 1.0);
        round.beta(ei) = agents[i].beta;
        round.rating(ei) = agents[i].rating_kva;
    }

    std::vector<DispatchResult> output(m);
    std::vector<double> p_available(m, 0.0);
    std::vector<double> q_available(m, 0.0);

    auto dispatch_all = [&] {
        for (std::size_t i = 0; i < m; ++i) {
            double q_command = round.alpha(static_cast<Eigen::Index>(i)) * agents[i].rating_kva;
            output[i] = dispatch(agents[i], q_command, p_available[i]);
        }
    };
    auto solve_now = [&](double load_multiplier) {
        auto injections = load_injections(normalized, load_multiplier);
        for (std::size_t i = 0; i < m; ++i) {
            injections.add(prepared[i].bus, {output[i].p_kw / s_base, output[i].q_kvar / s_base});
        }
        return solve(normalized, injections, normalized.slack_voltage_pu, config.power_flow);
    };
    auto abort_at = [&](std::size_t k, double t, const VoltageSolution& sol) {
        results.complete = false;
        std::string why = sol.collapsed ? "voltage collapse" : "power flow did not converge";
        results.abort = AbortInfo{k, t,
                                  why + " at step " + std::to_string(k) + " (t=" + format_double(t) +
                                      " s, mismatch " + format_double(sol.max_mismatch) + ")"};
    };

    const std::size_t steps = config.step_count();
    const std::size_t control_every = static_cast<std::size_t>(config.control_period / config.sim_step);
    std::optional<VoltageSolution> telemetry;
    results.steps.reserve(steps);

    for (std::size_t k = 0; k < steps; ++k) {
        const double t = config.window_start + static_cast<double>(k) * config.sim_step;
        const auto sample = profiles.at(t);
        for (std::size_t i = 0; i < m; ++i) {
            p_available[i] = dc_power(agents[i].dc_capacity_kw, sample.ghi);
        }

        if (k % control_every == 0) {
            if (!telemetry) {
                // No earlier step to measure from: observe the initial dispatch.
                dispatch_all();
                auto initial = solve_now(sample.load_multiplier);
                if (!initial.converged) {
                    abort_at(k, t, initial);
                    break;
                }
                telemetry = std::move(initial);
            }

            // Headroom is what the rating leaves beside the active power the
            // inverter is injecting right now, so Q <= Q-bar holds even while
            // curtailing.
            Eigen::VectorXd q_avail_pu(em);
            for (std::size_t i = 0; i < m; ++i) {
                q_available[i] = available_reactive(agents[i].rating_kva, output[i].p_kw);
                auto ei = static_cast<Eigen::Index>(i);
                double v = telemetry->magnitude(prepared[i].bus);
                q_avail_pu(ei) = q_available[i] / s_base;
                round.gradient[i] = gradient(q_avail_pu(ei), v, output[i].q_kvar / s_base, prepared[i].b_mm);
                round.volt_var(ei) = volt_var(v, config.volt_var, q_available[i]);
                round.alpha_limit(ei) = alpha_limit(agents[i].rating_kva, q_available[i], config.var_priority);
            }

            std::optional<CoefficientMatrix> dynamic_coefficients;
            const CoefficientMatrix* coefficients = nullptr;
            if (config.method == ControlMethod::AdaptiveFixedWeights) {
                coefficients = &*fixed_coefficients;
            } else if (config.method == ControlMethod::AdaptiveDynamicWeights) {
                auto weights = dynamic_weights(*topology, q_avail_pu);
                if (weights.uniform_fallback) ++results.uniform_fallback_rounds;
                dynamic_coefficients = normalize(weights, *topology);
                coefficients = &*dynamic_coefficients;
            }
            round.alpha = update_estimates(config.method, round, coefficients);
        }

        dispatch_all();
        auto solution = solve_now(sample.load_multiplier);
        if (!solution.converged) {
            abort_at(k, t, solution);
            break;
        }
        auto loss = losses(normalized, solution);

        StepRecord record;
        record.time = t;
        record.ghi = sample.ghi;
        record.load_multiplier = sample.load_multiplier;
        record.loss_kw = loss.active * s_base;
        record.loss_kvar = loss.reactive * s_base;
        record.agents.reserve(m);
        for (std::size_t i = 0; i < m; ++i) {
            AgentSample a;
            a.v = solution.magnitude(prepared[i].bus);
            a.p_available_kw = p_available[i];
            a.q_available_kvar = available_reactive(agents[i].rating_kva, output[i].p_kw);
            a.p_kw = output[i].p_kw;
            a.q_kvar = output[i].q_kvar;
            a.alpha = fair_ratio(output[i].q_kvar, agents[i].rating_kva);
            a.f_v = 0.5 * (1.0 - a.v) * (1.0 - a.v);
            record.agents.push_back(a);
        }
        results.steps.push_back(std::move(record));
        telemetry = std::move(solution);
    }

    results.summary = summarize(results);
    return results;
}

ScenarioSummary summarize(const ScenarioResults& results) {
    ScenarioSummary s;
    const std::size_t m = results.agent_ids.size();
    s.agents.resize(m);
    for (std::size_t i = 0; i < m; ++i) s.agents[i].id = results.agent_ids[i];

    const double hours = results.step_seconds / 3600.0;
    for (const auto& step : results.steps) {
        double fv = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const auto& a = step.agents[i];
            fv += a.f_v;
            s.agents[i].delivered_kwh += a.p_kw * hours;
            s.agents[i].available_kwh += a.p_available_kw * hours;
            s.agents[i].integrated_abs_q_kvarh += std::abs(a.q_kvar) * hours;
            s.agents[i].mean_abs_alpha += std::abs(a.alpha);
            s.agents[i].mean_abs_deviation += std::abs(1.0 - a.v);
        }
        s.fv_sum += fv;
        s.fv_square_per_step_sum += fv * fv;
        s.mean_loss_kw += step.loss_kw;
        s.mean_loss_kvar += step.loss_kvar;
    }
    s.fv_sum_then_square = s.fv_sum * s.fv_sum;
    if (!results.steps.empty()) {
        const auto n = static_cast<double>(results.steps.size());
        s.mean_loss_kw /= n;
        s.mean_loss_kvar /= n;
        for (auto& a : s.agents) {
            a.mean_abs_alpha /= n;
            a.mean_abs_deviation /= n;
        }
    }
    return s;
}

std::vector<std::optional<double>> curtailment_report(const ScenarioResults& results, const ScenarioResults& baseline) {
    if (results.agent_ids != baseline.agent_ids) {
        throw ValidationError("curtailment report: runs have different agents");
    }
    if (results.steps.size() != baseline.steps.size() || results.step_seconds != baseline.step_seconds) {
        throw ValidationError("curtailment report: runs cover different windows");
    }
    for (std::size_t k = 0; k < results.steps.size(); ++k) {
        if (results.steps[k].time != baseline.steps[k].time) {
            throw ValidationError("curtailment report: step times differ");
        }
    }
    auto method = summarize(results);
    auto base = summarize(baseline);
    std::vector<std::optional<double>> out;
    for (std::size_t i = 0; i < results.agent_ids.size(); ++i) {
        double e_base = base.agents[i].delivered_kwh;
        if (!(e_base > 0.0)) {
            out.emplace_back(std::nullopt);
        } else {
            out.emplace_back(100.0 * (e_base - method.agents[i].delivered_kwh) / e_base);
        }
    }
    return out;
}

}  // namespace gridcoop
