#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gridcoop {

/// Irradiance and load-multiplier series, held constant between samples.
struct Profiles {
    std::vector<double> time;  // seconds of day, strictly increasing
    std::vector<double> ghi;   // W/m^2
    std::vector<double> load_multiplier;

    struct Sample {
        double ghi = 0.0;
        double load_multiplier = 0.0;
    };

    /// Zero-order hold: the last sample at or before `t`. Throws
    /// ValidationError when `t` precedes the first sample.
    Sample at(double t) const;

    bool covers(double start, double end) const;

    /// Throws ValidationError on ordering, sign or length violations.
    void validate() const;
};

/// CSV with header `time,ghi,load_mult`. Time is seconds of day or HH:MM[:SS].
/// Throws ParseError with the offending line.
Profiles parse_profiles(std::string_view csv);
Profiles load_profiles(const std::string& path);

/// Seconds of day from "HH:MM", "HH:MM:SS" or a plain number; nullopt when malformed.
std::optional<double> parse_time_of_day(std::string_view text);

}  // namespace gridcoop
