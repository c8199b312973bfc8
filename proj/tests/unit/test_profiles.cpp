#include <catch_amalgamated.hpp>

#include "gridcoop/error.hpp"
#include "gridcoop/inverter.hpp"
#include "gridcoop/profiles.hpp"

#include <algorithm>
#include <string>

using namespace gridcoop;

namespace {

std::size_t parse_error_line(const std::string& csv) {
    try {
        parse_profiles(csv);
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

}  // namespace

TEST_CASE("profiles: parse and hold") {
    auto p = parse_profiles("time,ghi,load_mult\n06:00,0,0.5\n06:00:30,10,0.6\n21660,20.5,0.7\n");
    REQUIRE(p.time.size() == 3);
    CHECK(p.time[0] == 21600);
    CHECK(p.time[1] == 21630);
    CHECK(p.time[2] == 21660);
    CHECK(p.at(21600).ghi == 0);
    CHECK(p.at(21629.9).ghi == 0);
    CHECK(p.at(21630).ghi == 10);
    CHECK(p.at(21640).load_multiplier == 0.6);
    CHECK(p.at(99999).ghi == 20.5);
    CHECK_THROWS_AS(p.at(0), ValidationError);
    CHECK(p.covers(21600, 21660));
    CHECK_FALSE(p.covers(21500, 21660));
    CHECK_FALSE(p.covers(21600, 21700));
}

TEST_CASE("profiles: time of day") {
    CHECK(parse_time_of_day("17:30") == 63000);
    CHECK(parse_time_of_day("00:00:01.5") == 1.5);
    CHECK(parse_time_of_day("24:00") == 86400);
    CHECK(parse_time_of_day("120") == 120);
    CHECK_FALSE(parse_time_of_day("7:60"));
    CHECK_FALSE(parse_time_of_day("a:00"));
    CHECK_FALSE(parse_time_of_day("1:2:3:4"));
}

TEST_CASE("profiles: structured errors") {
    CHECK(parse_error_line("time,ghi,load_mult\n10,0,1\n5,0,1\n") == 3);
    CHECK(parse_error_line("time,ghi,load_mult\n10,0,1\n10,0,1\n") == 3);
    CHECK(parse_error_line("time,ghi\n10,0\n") == 1);
    CHECK(parse_error_line("time,ghi,load_mult\n10,-1,1\n") == 2);
    CHECK(parse_error_line("time,ghi,load_mult\n10,x,1\n") == 2);
    CHECK(parse_error_line("time,ghi,load_mult\n10,1\n") == 2);
    CHECK(parse_error_line("time,ghi,load_mult\n10,nan,1\n") == 2);
    CHECK_THROWS_AS(parse_profiles("time,ghi,load_mult\n"), Error);
    CHECK_THROWS_AS(load_profiles("/nonexistent/profile.csv"), FileNotFoundError);
}

TEST_CASE("profiles: bundled clear-sky day") {
    auto p = load_profiles(std::string(GRIDCOOP_DATA_DIR) + "/clear_sky_profile.csv");
    CHECK(p.covers(6.5 * 3600, 17.5 * 3600));
    auto peak = std::max_element(p.ghi.begin(), p.ghi.end()) - p.ghi.begin();
    CHECK(std::abs(p.time[static_cast<std::size_t>(peak)] - 12 * 3600) <= 60);
    CHECK(p.at(2 * 3600).ghi == 0);
    CHECK(p.at(22 * 3600).ghi == 0);
    // DC output scales with irradiance against the 1000 W/m^2 nameplate.
    auto noon = p.at(12 * 3600).ghi;
    CHECK(dc_power(1800, noon) == 1800 * noon / 1000);
    for (double m : p.load_multiplier) {
        CHECK(m > 0.0);
        CHECK(m <= 1.0);
    }
}
