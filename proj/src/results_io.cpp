#include "gridcoop/results_io.hpp"

#include "gridcoop/error.hpp"
#include "gridcoop/number_format.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace gridcoop {

namespace {

constexpr const char* kStepHeader =
    "time,agent,bus,ghi,load_mult,v_pu,p_avail_kw,q_avail_kvar,p_kw,q_kvar,alpha,f_v,loss_kw,loss_kvar";
constexpr std::size_t kStepColumns = 14;

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

nlohmann::json optional_number(const std::optional<double>& value) {
    return value ? nlohmann::json(*value) : nlohmann::json(nullptr);
}

}  // namespace

void write_step_csv(std::ostream& out, const ScenarioResults& results) {
    out << kStepHeader << '\n';
    for (const auto& step : results.steps) {
        for (std::size_t i = 0; i < step.agents.size(); ++i) {
            const auto& a = step.agents[i];
            out << format_double(step.time) << ',' << results.agent_ids[i] << ',' << results.agent_buses[i] << ','
                << format_double(step.ghi) << ',' << format_double(step.load_multiplier) << ','
                << format_double(a.v) << ',' << format_double(a.p_available_kw) << ','
                << format_double(a.q_available_kvar) << ',' << format_double(a.p_kw) << ','
                << format_double(a.q_kvar) << ',' << format_double(a.alpha) << ',' << format_double(a.f_v) << ','
                << format_double(step.loss_kw) << ',' << format_double(step.loss_kvar) << '\n';
        }
    }
}

std::string step_csv(const ScenarioResults& results) {
    std::ostringstream ss;
    write_step_csv(ss, results);
    return ss.str();
}

ScenarioResults read_step_csv(std::string_view csv) {
    ScenarioResults out;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    bool header = false;
    std::size_t agent_cursor = 0;
    while (pos < csv.size()) {
        auto nl = csv.find('\n', pos);
        auto line = csv.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? csv.size() : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (!header) {
            if (line != kStepHeader) throw ParseError(line_no, "unexpected step table header");
            header = true;
            continue;
        }
        auto f = split_commas(line);
        if (f.size() != kStepColumns) {
            throw ParseError(line_no, "expected " + std::to_string(kStepColumns) + " columns");
        }
        std::vector<double> num(kStepColumns, 0.0);
        for (std::size_t c = 0; c < kStepColumns; ++c) {
            if (c == 1 || c == 2) continue;
            auto v = parse_double(f[c]);
            if (!v) throw ParseError(line_no, "column " + std::to_string(c + 1) + " is not a number");
            num[c] = *v;
        }

        bool new_step = out.steps.empty() || out.steps.back().time != num[0];
        if (new_step) {
            if (!out.steps.empty() && agent_cursor != out.agent_ids.size()) {
                throw ParseError(line_no, "previous step is missing agent rows");
            }
            StepRecord step;
            step.time = num[0];
            step.ghi = num[3];
            step.load_multiplier = num[4];
            step.loss_kw = num[12];
            step.loss_kvar = num[13];
            out.steps.push_back(std::move(step));
            agent_cursor = 0;
        }
        if (out.steps.size() == 1) {
            out.agent_ids.emplace_back(f[1]);
            out.agent_buses.emplace_back(f[2]);
        } else if (agent_cursor >= out.agent_ids.size() || out.agent_ids[agent_cursor] != f[1]) {
            throw ParseError(line_no, "agent rows out of order");
        }
        ++agent_cursor;
        out.steps.back().agents.push_back(AgentSample{num[5], num[6], num[7], num[8], num[9], num[10], num[11]});
    }
    if (!header) throw ParseError(0, "empty step table");
    if (out.steps.size() > 1) out.step_seconds = out.steps[1].time - out.steps[0].time;
    return out;
}

nlohmann::json summary_json(const ScenarioResults& results, const std::vector<std::optional<double>>& curtailment_pct) {
    const auto& s = results.summary;
    nlohmann::json j;
    j["method"] = std::string(method_name(results.method));
    j["complete"] = results.complete;
    j["uniform_fallback_rounds"] = results.uniform_fallback_rounds;
    if (results.abort) {
        j["abort"] = {{"step", results.abort->step}, {"time", results.abort->time}, {"message", results.abort->message}};
    }
    j["steps"] = results.steps.size();
    j["fv_sum"] = s.fv_sum;
    j["fv_sum_then_square"] = s.fv_sum_then_square;
    j["fv_square_per_step_sum"] = s.fv_square_per_step_sum;
    j["mean_loss_kw"] = s.mean_loss_kw;
    j["mean_loss_kvar"] = s.mean_loss_kvar;
    auto agents = nlohmann::json::array();
    for (std::size_t i = 0; i < s.agents.size(); ++i) {
        const auto& a = s.agents[i];
        agents.push_back({{"id", a.id},
                          {"bus", results.agent_buses[i]},
                          {"delivered_kwh", a.delivered_kwh},
                          {"available_kwh", a.available_kwh},
                          {"integrated_abs_q_kvarh", a.integrated_abs_q_kvarh},
                          {"mean_abs_alpha", a.mean_abs_alpha},
                          {"mean_abs_deviation", a.mean_abs_deviation},
                          {"curtailment_pct", i < curtailment_pct.size() ? optional_number(curtailment_pct[i])
                                                                         : nlohmann::json(nullptr)}});
    }
    j["agents"] = std::move(agents);
    return j;
}

nlohmann::json comparison_json(const std::vector<ScenarioResults>& runs) {
    if (runs.empty()) throw ValidationError("comparison needs at least one run");
    nlohmann::json j;
    auto methods = nlohmann::json::array();
    std::vector<std::pair<double, std::string>> ranking;
    for (const auto& run : runs) {
        methods.push_back(summary_json(run, curtailment_report(run, runs.front())));
        ranking.emplace_back(run.summary.fv_sum_then_square, std::string(method_name(run.method)));
    }
    std::stable_sort(ranking.begin(), ranking.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    j["baseline"] = std::string(method_name(runs.front().method));
    j["methods"] = std::move(methods);
    auto order = nlohmann::json::array();
    for (const auto& [value, name] : ranking) order.push_back(name);
    j["ranking_by_fv_sum_then_square"] = std::move(order);
    return j;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw Error("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

}  // namespace gridcoop
