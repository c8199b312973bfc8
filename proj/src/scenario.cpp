#include "gridcoop/scenario.hpp"

#include "gridcoop/error.hpp"
#include "gridcoop/record_text.hpp"

#include <algorithm>
#include <filesystem>
#include <future>
#include <unordered_map>

namespace gridcoop {

namespace {

std::string resolve(const std::string& base_dir, const std::string& path) {
    std::filesystem::path p(path);
    if (p.is_absolute() || base_dir.empty()) return p.lexically_normal().string();
    return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

bool parse_bool(const Record& record, std::string_view key, bool fallback) {
    auto text = record.find(key);
    if (!text) return fallback;
    if (*text == "true" || *text == "yes" || *text == "1") return true;
    if (*text == "false" || *text == "no" || *text == "0") return false;
    throw ParseError(record.line, "field '" + std::string(key) + "' must be true or false");
}

int parse_seconds(const Record& record, std::string_view key, int fallback) {
    auto value = record.optional_integer(key);
    if (!value) return fallback;
    if (*value <= 0 || *value > 86400) {
        throw ParseError(record.line, "field '" + std::string(key) + "' out of range");
    }
    return static_cast<int>(*value);
}

std::optional<double> time_field(const Record& record, std::string_view key) {
    auto text = record.find(key);
    if (!text) return std::nullopt;
    auto t = parse_time_of_day(*text);
    if (!t) throw ParseError(record.line, "field '" + std::string(key) + "' is not a time of day");
    return t;
}

std::vector<std::pair<std::size_t, std::size_t>> resolve_links(const ScenarioFile& file) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < file.agents.size(); ++i) index.emplace(file.agents[i].id, i);
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const auto& [a, b] : file.links) {
        auto ia = index.find(a);
        auto ib = index.find(b);
        if (ia == index.end() || ib == index.end()) {
            throw ValidationError("topology link " + a + "-" + b + " references an unknown agent");
        }
        out.emplace_back(ia->second, ib->second);
    }
    return out;
}

void check_agents(const ScenarioFile& file, const FeederModel& feeder) {
    if (file.agents.empty()) throw ValidationError("scenario defines no agents");
    std::unordered_map<std::string, int> seen;
    for (const auto& agent : file.agents) {
        agent.validate();
        if (seen[agent.id]++) throw ValidationError("duplicate agent id '" + agent.id + "'");
        if (!feeder.has_bus(agent.bus)) {
            throw ValidationError("agent '" + agent.id + "' is attached to unknown bus '" + agent.bus + "'");
        }
    }
}

}  // namespace

ScenarioFile parse_scenario(std::string_view text, const std::string& base_dir) {
    auto doc = parse_record_text(text);
    doc.expect_sections({"files", "agents", "topology", "simulation", "voltvar"});

    ScenarioFile file;
    auto files = doc.section("files");
    if (!files) throw ParseError(0, "missing [files] section");
    auto f = files->merged();
    f.expect_only({"feeder", "profiles"});
    file.feeder_path = resolve(base_dir, f.require("feeder"));
    file.profiles_path = resolve(base_dir, f.require("profiles"));

    double default_beta = kDefaultStepGain;
    std::optional<ControlMethod> method;
    bool all_methods = false;
    if (auto sim = doc.section("simulation")) {
        auto r = sim->merged();
        r.expect_only({"window_start", "window_end", "sim_step", "control_period", "method", "beta", "tolerance",
                       "max_iterations", "var_priority"});
        if (auto t = time_field(r, "window_start")) file.config.window_start = *t;
        if (auto t = time_field(r, "window_end")) file.config.window_end = *t;
        file.config.sim_step = parse_seconds(r, "sim_step", file.config.sim_step);
        file.config.control_period = parse_seconds(r, "control_period", file.config.control_period);
        if (auto b = r.optional_double("beta")) default_beta = *b;
        if (auto tol = r.optional_double("tolerance")) file.config.power_flow.tolerance = *tol;
        if (auto it = r.optional_integer("max_iterations")) {
            if (*it <= 0 || *it > 1000000) throw ParseError(r.line, "max_iterations out of range");
            file.config.power_flow.max_iterations = static_cast<int>(*it);
        }
        file.config.var_priority = parse_bool(r, "var_priority", true);
        if (auto name = r.find("method")) {
            if (*name == "all") {
                all_methods = true;
            } else {
                method = parse_method(*name);
                if (!method) throw ParseError(r.line, "unknown method '" + *name + "'");
            }
        }
    }
    if (all_methods) {
        file.methods.assign(std::begin(kAllMethods), std::end(kAllMethods));
    } else {
        file.methods.push_back(method.value_or(ControlMethod::AdaptiveDynamicWeights));
    }
    file.config.method = file.methods.front();

    if (auto vv = doc.section("voltvar")) {
        auto r = vv->merged();
        r.expect_only({"v_ref", "deadband_low", "deadband_high", "v_min", "v_max"});
        auto& p = file.config.volt_var;
        p.v_ref = r.optional_double("v_ref").value_or(p.v_ref);
        p.deadband_low = r.optional_double("deadband_low").value_or(p.deadband_low);
        p.deadband_high = r.optional_double("deadband_high").value_or(p.deadband_high);
        p.v_min = r.optional_double("v_min").value_or(p.v_min);
        p.v_max = r.optional_double("v_max").value_or(p.v_max);
    }

    if (auto agents = doc.section("agents")) {
        for (const auto& r : agents->records) {
            r.expect_only({"id", "bus", "rating_kva", "dc_kw", "beta", "alpha"});
            InverterAgent agent;
            agent.id = r.require("id");
            agent.bus = r.require("bus");
            agent.rating_kva = r.require_double("rating_kva");
            agent.dc_capacity_kw = r.require_double("dc_kw");
            agent.beta = r.optional_double("beta").value_or(default_beta);
            agent.alpha = r.optional_double("alpha").value_or(0.0);
            file.agents.push_back(std::move(agent));
        }
    }

    if (auto topo = doc.section("topology")) {
        for (const auto& r : topo->records) {
            r.expect_only({"a", "b"});
            file.links.emplace_back(r.require("a"), r.require("b"));
        }
    }
    return file;
}

ScenarioFile load_scenario(const std::string& path) {
    auto text = read_text_file(path);
    return parse_scenario(text, std::filesystem::path(path).parent_path().string());
}

LoadedScenario prepare_scenario(const ScenarioFile& file) {
    LoadedScenario out{file, load_feeder(file.feeder_path), load_profiles(file.profiles_path), std::nullopt};
    out.profiles.validate();
    file.config.validate();
    check_agents(file, out.feeder);
    auto links = resolve_links(file);
    try {
        out.topology = build_topology(links, file.agents.size());
    } catch (const ValidationError&) {
        out.topology.reset();
    }
    return out;
}

bool ValidationReport::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

ValidationReport validate_scenario(const std::string& path) {
    try {
        return validate_scenario(path, load_scenario(path).methods);
    } catch (const std::exception&) {
        return validate_scenario(path, {});
    }
}

ValidationReport validate_scenario(const std::string& path, const std::vector<ControlMethod>& methods) {
    ValidationReport report;
    auto record = [&](std::string name, auto&& check) {
        ValidationCheck c{std::move(name), false, ""};
        try {
            c.message = check();
            c.passed = true;
        } catch (const FileNotFoundError& e) {
            c.message = e.what();
            report.missing_file = true;
        } catch (const std::exception& e) {
            c.message = e.what();
        }
        report.checks.push_back(std::move(c));
        return report.checks.back().passed;
    };
    auto skipped = [&](std::string name) {
        report.checks.push_back(ValidationCheck{std::move(name), false, "skipped: prerequisite check failed"});
    };

    std::optional<ScenarioFile> file;
    if (!record("scenario_file", [&] {
            file = load_scenario(path);
            return std::string("parsed");
        })) {
        for (auto name : {"feeder", "profiles", "profile_coverage", "agents", "topology", "simulation"}) skipped(name);
        return report;
    }

    std::optional<FeederModel> feeder;
    record("feeder", [&] {
        feeder = load_feeder(file->feeder_path);
        return std::to_string(feeder->buses.size()) + " buses, radial";
    });

    std::optional<Profiles> profiles;
    record("profiles", [&] {
        profiles = load_profiles(file->profiles_path);
        profiles->validate();
        return std::to_string(profiles->time.size()) + " samples";
    });

    if (profiles) {
        record("profile_coverage", [&] {
            if (!profiles->covers(file->config.window_start, file->config.window_end)) {
                throw ValidationError("profiles span " + std::to_string(profiles->time.front()) + "-" +
                                      std::to_string(profiles->time.back()) + " s, window needs " +
                                      std::to_string(file->config.window_start) + "-" +
                                      std::to_string(file->config.window_end) + " s");
            }
            return std::string("window covered");
        });
    } else {
        skipped("profile_coverage");
    }

    if (feeder) {
        record("agents", [&] {
            check_agents(*file, *feeder);
            return std::to_string(file->agents.size()) + " agents";
        });
    } else {
        skipped("agents");
    }

    record("topology", [&] {
        auto links = resolve_links(*file);
        bool needed = std::any_of(methods.begin(), methods.end(), uses_communication);
        if (!needed) {
            return std::string("not required by the selected methods");
        }
        build_topology(links, std::max<std::size_t>(file->agents.size(), 1));
        return std::string("globally reachable agent present");
    });

    record("simulation", [&] {
        file->config.validate();
        return std::to_string(file->config.step_count()) + " steps";
    });
    return report;
}

ScenarioResults run_method(const LoadedScenario& scenario, ControlMethod method) {
    auto config = scenario.file.config;
    config.method = method;
    return run_scenario(scenario.feeder, scenario.file.agents, scenario.topology, scenario.profiles, config);
}

std::vector<ScenarioResults> run_comparison(const LoadedScenario& scenario, bool concurrent) {
    std::vector<ScenarioResults> runs;
    if (!concurrent) {
        for (auto method : kAllMethods) runs.push_back(run_method(scenario, method));
        return runs;
    }
    std::vector<std::future<ScenarioResults>> pending;
    for (auto method : kAllMethods) {
        pending.push_back(std::async(std::launch::async, [&scenario, method] { return run_method(scenario, method); }));
    }
    for (auto& f : pending) runs.push_back(f.get());
    return runs;
}

}  // namespace gridcoop
