#include <catch_amalgamated.hpp>

#include "gridcoop/error.hpp"
#include "gridcoop/inverter.hpp"

#include <cmath>
#include <random>

using namespace gridcoop;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

InverterAgent agent(double rating, double dc = 0.0) {
    InverterAgent a;
    a.id = "pv";
    a.bus = "1";
    a.rating_kva = rating;
    a.dc_capacity_kw = dc;
    return a;
}

}  // namespace

TEST_CASE("inverter: headroom examples") {
    CHECK(available_reactive(1500, 0) == 1500);
    CHECK(available_reactive(1500, 1500) == 0);
    CHECK(available_reactive(75, 45) == 60);
    CHECK(available_reactive(1500, 1800) == 0);
    CHECK_THROWS_AS(available_reactive(-1, 0), ValidationError);
    CHECK_THROWS_AS(available_reactive(1, -1), ValidationError);
}

TEST_CASE("inverter: headroom satisfies the Pythagorean identity") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20000; ++i) {
        double s = 1.0 + 2000.0 * u(rng);
        double p = 1.2 * s * u(rng);
        double q = available_reactive(s, p);
        double p_eff = std::min(p, s);
        CHECK_THAT(q * q + p_eff * p_eff, WithinRel(s * s, 1e-12));
        CHECK(q >= 0.0);
        CHECK(q <= s);
    }
}

TEST_CASE("inverter: fair ratio and DC power") {
    CHECK(fair_ratio(0, 75) == 0);
    CHECK(fair_ratio(-75, 75) == -1);
    CHECK_THAT(fair_ratio(-25, 75), WithinAbs(-1.0 / 3.0, 1e-15));
    CHECK(dc_power(1800, 1000) == 1800);
    CHECK(dc_power(90, 500) == 45);
    CHECK(dc_power(90, 0) == 0);
}

TEST_CASE("inverter: Volt-Var curve examples") {
    VoltVarParams vv;
    CHECK(volt_var(1.00, vv, 60) == 0);
    CHECK(volt_var(1.08, vv, 60) == -60);
    CHECK(volt_var(1.20, vv, 60) == -60);
    CHECK(volt_var(0.92, vv, 60) == 60);
    CHECK(volt_var(0.80, vv, 60) == 60);
    CHECK_THAT(volt_var(1.05, vv, 60), WithinAbs(-30.0, 1e-12));
    CHECK_THAT(volt_var(0.95, vv, 60), WithinAbs(30.0, 1e-12));
    CHECK(volt_var(1.02, vv, 60) == 0);
    CHECK(volt_var(0.98, vv, 60) == 0);
}

TEST_CASE("inverter: Volt-Var curve is non-increasing, bounded and continuous") {
    VoltVarParams vv;
    const double q = 100.0;
    double prev = volt_var(0.85, vv, q);
    for (double v = 0.85; v <= 1.15; v += 1e-4) {
        double out = volt_var(v, vv, q);
        CHECK(out <= prev + 1e-12);
        CHECK(std::abs(out) <= q);
        CHECK(std::abs(out - prev) <= q * 1e-4 / 0.06 + 1e-9);
        prev = out;
    }
    VoltVarParams bad;
    bad.deadband_low = 0.90;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("inverter: gradient") {
    CHECK(gradient(0.3, 1.0, -0.1, -12.0) == 0.0);
    CHECK(gradient(0.0, 1.04, -0.1, -12.0) == 0.0);
    auto pinned = gradient(1.0, 1.05, -0.5, -10.0);
    REQUIRE(pinned);
    CHECK_THAT(*pinned, WithinAbs(0.0049881235154394295, 1e-15));
    CHECK_FALSE(gradient(0.1, 1.05, 0.0, 0.0));
    CHECK_FALSE(gradient(0.1, 1.0, 1.0, 1.0));

    SECTION("zero exactly at V = 1 or zero headroom across inputs") {
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int i = 0; i < 10000; ++i) {
            double q_out = u(rng), b = -20.0 + u(rng), q_av = 1.0 + u(rng), v = 1.0 + 0.1 * u(rng);
            auto at_one = gradient(q_av, 1.0, q_out, b);
            REQUIRE(at_one);
            CHECK(std::abs(*at_one) <= 1e-12);
            auto no_room = gradient(0.0, v, q_out, b);
            REQUIRE(no_room);
            CHECK(std::abs(*no_room) <= 1e-12);
            // Overvoltage on an inductive feeder pushes the ratio down.
            auto g = gradient(q_av, v, q_out, b);
            REQUIRE(g);
            if (v > 1.0) CHECK(*g >= 0.0);
            if (v < 1.0) CHECK(*g <= 0.0);
        }
    }
}

TEST_CASE("inverter: dispatch examples") {
    auto r = dispatch(agent(1500), 0, 1000);
    CHECK(r.p_kw == 1000);
    CHECK(r.q_kvar == 0);
    CHECK(r.curtailed_kw == 0);
    CHECK_FALSE(r.saturated);

    r = dispatch(agent(75), -75, 90);
    CHECK(r.p_kw == 0);
    CHECK(r.q_kvar == -75);
    CHECK(r.curtailed_kw == 90);
    CHECK(r.saturated);

    r = dispatch(agent(1500), -900, 1800);
    CHECK(r.q_kvar == -900);
    CHECK_THAT(r.p_kw, WithinAbs(1200, 1e-9));
    CHECK_THAT(r.curtailed_kw, WithinAbs(600, 1e-9));

    r = dispatch(agent(100), 250, 10);
    CHECK(r.q_kvar == 100);
    CHECK(r.p_kw == 0);
    CHECK(r.saturated);
}

TEST_CASE("inverter: dispatch respects the rating and gives vars priority") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20000; ++i) {
        double s = 1.0 + 1000.0 * u(rng);
        double q_cmd = (u(rng) * 2.4 - 1.2) * s;
        double p_av = 1.3 * s * u(rng);
        auto r = dispatch(agent(s), q_cmd, p_av);
        CHECK(r.p_kw * r.p_kw + r.q_kvar * r.q_kvar <= s * s * (1 + 1e-12));
        CHECK(r.p_kw >= 0.0);
        CHECK(r.p_kw <= p_av);
        CHECK_THAT(r.p_kw + r.curtailed_kw, WithinAbs(p_av, 1e-9 * s));
        // The command is honoured whenever it fits the rating.
        if (std::abs(q_cmd) <= s) CHECK(r.q_kvar == q_cmd);
        else CHECK(std::abs(r.q_kvar) == s);
    }
}

TEST_CASE("inverter: ratio limits") {
    CHECK(alpha_limit(75, 0, true) == 1.0);
    CHECK(alpha_limit(75, 45, false) == 0.6);
    CHECK(alpha_limit(75, 75, false) == 1.0);
    auto a = agent(0);
    CHECK_THROWS_AS(a.validate(), ValidationError);
    a = agent(10);
    a.beta = 0;
    CHECK_THROWS_AS(a.validate(), ValidationError);
}
