// gridcoop: quasi-static feeder simulation with coordinated smart-inverter
// reactive power control.
//
//   gridcoop run --scenario data/two_pv.scn --method ac-dw --out results/
//   gridcoop run --scenario data/two_pv.scn --compare --out results/
//   gridcoop run --scenario data/two_pv.scn --validate

#include "gridcoop/error.hpp"
#include "gridcoop/results_io.hpp"
#include "gridcoop/scenario.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <string>

namespace {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kFileNotFound = 3,
    kInvalidScenario = 4,
    kAborted = 5,
};

nlohmann::json report_json(const gridcoop::ValidationReport& report) {
    nlohmann::json j;
    j["ok"] = report.ok();
    auto checks = nlohmann::json::array();
    for (const auto& c : report.checks) {
        checks.push_back({{"check", c.name}, {"passed", c.passed}, {"message", c.message}});
    }
    j["checks"] = std::move(checks);
    return j;
}

int failure_code(const gridcoop::ValidationReport& report) {
    return report.missing_file ? kFileNotFound : kInvalidScenario;
}

void write_run(const std::string& out_dir, const gridcoop::ScenarioResults& run,
               const gridcoop::ScenarioResults& baseline) {
    const std::string stem = out_dir + "/" + std::string(gridcoop::method_name(run.method));
    gridcoop::write_file_atomic(stem + "_steps.csv", gridcoop::step_csv(run));
    auto summary = gridcoop::summary_json(run, gridcoop::curtailment_report(run, baseline));
    gridcoop::write_file_atomic(stem + "_summary.json", summary.dump(2) + "\n");
}

void print_line(const gridcoop::ScenarioResults& run) {
    std::cout << gridcoop::method_name(run.method) << ": " << run.steps.size() << " steps, F_v sum "
              << run.summary.fv_sum << ", mean loss " << run.summary.mean_loss_kw << " kW"
              << (run.complete ? "" : "  [ABORTED: " + run.abort->message + "]") << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quasi-static feeder simulator with coordinated smart-inverter Volt-Var control"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string method_text;
    std::string out_dir = "results";
    bool compare = false;
    bool validate_only = false;

    auto* run = app.add_subcommand("run", "Run a scenario, compare all methods, or validate");
    run->add_option("--scenario", scenario_path, "Scenario file")->required();
    run->add_option("--method", method_text, "noctl | fc | ac-nocm | ac-fw | ac-dw")
        ->check(CLI::IsMember({"noctl", "fc", "ac-nocm", "ac-fw", "ac-dw"}));
    run->add_flag("--compare", compare, "Run all five control methods");
    run->add_option("--out", out_dir, "Output directory");
    run->add_flag("--validate", validate_only, "Check the scenario without running it");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }
    if (compare && !method_text.empty()) {
        std::cerr << "error: --compare and --method are mutually exclusive\n";
        return kUsage;
    }

    try {
        std::vector<gridcoop::ControlMethod> methods;
        if (compare) {
            methods.assign(std::begin(gridcoop::kAllMethods), std::end(gridcoop::kAllMethods));
        } else if (!method_text.empty()) {
            methods.push_back(*gridcoop::parse_method(method_text));
        }

        auto report = methods.empty() ? gridcoop::validate_scenario(scenario_path)
                                      : gridcoop::validate_scenario(scenario_path, methods);
        if (validate_only) {
            std::cout << report_json(report).dump(2) << "\n";
            return report.ok() ? kOk : failure_code(report);
        }
        if (!report.ok()) {
            std::cerr << "scenario validation failed:\n" << report_json(report).dump(2) << "\n";
            return failure_code(report);
        }

        auto scenario = gridcoop::prepare_scenario(gridcoop::load_scenario(scenario_path));
        if (methods.empty()) methods = scenario.file.methods;
        std::filesystem::create_directories(out_dir);

        std::vector<gridcoop::ScenarioResults> runs;
        if (compare) {
            runs = gridcoop::run_comparison(scenario);
        } else {
            // Curtailment is always reported against a no-control baseline.
            runs.push_back(gridcoop::run_method(scenario, gridcoop::ControlMethod::NoControl));
            for (auto method : methods) {
                if (method != gridcoop::ControlMethod::NoControl) runs.push_back(gridcoop::run_method(scenario, method));
            }
        }

        const auto& baseline = runs.front();
        bool all_complete = true;
        for (const auto& r : runs) {
            bool requested = std::find(methods.begin(), methods.end(), r.method) != methods.end();
            if (!requested) continue;
            write_run(out_dir, r, baseline);
            print_line(r);
            all_complete = all_complete && r.complete;
        }
        if (compare) {
            auto comparison = gridcoop::comparison_json(runs);
            gridcoop::write_file_atomic(out_dir + "/comparison.json", comparison.dump(2) + "\n");
            std::cout << "ranking by F_v^2: " << comparison["ranking_by_fv_sum_then_square"].dump() << "\n";
        }
        return all_complete && baseline.complete ? kOk : kAborted;
    } catch (const gridcoop::FileNotFoundError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFileNotFound;
    } catch (const gridcoop::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalidScenario;
    } catch (const gridcoop::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalidScenario;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
}
