#include <catch_amalgamated.hpp>

#include "gridcoop/error.hpp"
#include "gridcoop/results_io.hpp"
#include "gridcoop/scenario.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace gridcoop;

namespace {

ScenarioResults random_results(std::mt19937_64& rng, std::size_t steps, std::size_t agents) {
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    ScenarioResults r;
    for (std::size_t i = 0; i < agents; ++i) {
        r.agent_ids.push_back("pv" + std::to_string(i));
        r.agent_buses.push_back(std::to_string(100 + i));
    }
    for (std::size_t k = 0; k < steps; ++k) {
        StepRecord s;
        s.time = 23400.0 + 10.0 * static_cast<double>(k);
        s.ghi = u(rng);
        s.load_multiplier = u(rng) * 1e-7;
        s.loss_kw = u(rng);
        s.loss_kvar = u(rng) / 3.0;
        for (std::size_t i = 0; i < agents; ++i) {
            s.agents.push_back({1.0 + u(rng) * 1e-4, u(rng), u(rng), u(rng), u(rng), u(rng) / 7.0, u(rng) * 1e-9});
        }
        r.steps.push_back(std::move(s));
    }
    r.step_seconds = 10.0;
    return r;
}

}  // namespace

TEST_CASE("results io: step CSV round-trips exactly") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        auto original = random_results(rng, 1 + rng() % 50, 1 + rng() % 4);
        auto text = step_csv(original);
        auto back = read_step_csv(text);
        REQUIRE(back.agent_ids == original.agent_ids);
        REQUIRE(back.agent_buses == original.agent_buses);
        REQUIRE(back.steps.size() == original.steps.size());
        for (std::size_t k = 0; k < back.steps.size(); ++k) {
            const auto& a = back.steps[k];
            const auto& b = original.steps[k];
            CHECK(a.time == b.time);
            CHECK(a.ghi == b.ghi);
            CHECK(a.load_multiplier == b.load_multiplier);
            CHECK(a.loss_kw == b.loss_kw);
            CHECK(a.loss_kvar == b.loss_kvar);
            REQUIRE(a.agents.size() == b.agents.size());
            for (std::size_t i = 0; i < a.agents.size(); ++i) {
                CHECK(std::memcmp(&a.agents[i], &b.agents[i], sizeof(AgentSample)) == 0);
            }
        }
        CHECK(step_csv(back) == text);
    }
}

TEST_CASE("results io: header and malformed rows") {
    std::mt19937_64 rng(1);
    auto text = step_csv(random_results(rng, 2, 2));
    CHECK(text.rfind("time,agent,bus,ghi,load_mult,v_pu,p_avail_kw,q_avail_kvar,p_kw,q_kvar,alpha,f_v,loss_kw,loss_kvar\n", 0) == 0);
    CHECK_THROWS_AS(read_step_csv(""), ParseError);
    CHECK_THROWS_AS(read_step_csv("time,agent\n"), ParseError);
    auto broken = text + "1,pv0,100,1,1,1,1,1,1,1,1,1,1\n";
    CHECK_THROWS_AS(read_step_csv(broken), ParseError);
    auto bad_number = text + "99999,pv0,100,x,1,1,1,1,1,1,1,1,1,1\n";
    CHECK_THROWS_AS(read_step_csv(bad_number), ParseError);
}

TEST_CASE("results io: comparison document") {
    auto scenario = prepare_scenario(load_scenario(std::string(GRIDCOOP_DATA_DIR) + "/two_pv.scn"));
    std::vector<ScenarioResults> runs;
    for (auto m : {ControlMethod::NoControl, ControlMethod::AdaptiveNoComm}) runs.push_back(run_method(scenario, m));
    auto j = comparison_json(runs);
    CHECK(j["baseline"] == "noctl");
    REQUIRE(j["methods"].size() == 2);
    CHECK(j["methods"][0]["agents"][0]["curtailment_pct"] == 0.0);
    CHECK(j["methods"][1]["agents"][1]["curtailment_pct"].get<double>() > 99.0);
    CHECK(j["ranking_by_fv_sum_then_square"][0] == "ac-nocm");
    CHECK(j["methods"][1]["complete"] == true);
    CHECK(j["methods"][1]["steps"] == 3960);
    CHECK_THROWS_AS(comparison_json({}), ValidationError);
}

TEST_CASE("results io: atomic write replaces the target") {
    auto dir = std::filesystem::temp_directory_path() / "gridcoop_io_test";
    std::filesystem::create_directories(dir);
    auto path = (dir / "out.txt").string();
    write_file_atomic(path, "first");
    write_file_atomic(path, "second");
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == "second");
    CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
    std::filesystem::remove_all(dir);
}
