#include "gridcoop/profiles.hpp"

#include "gridcoop/error.hpp"
#include "gridcoop/number_format.hpp"
#include "gridcoop/record_text.hpp"

#include <algorithm>
#include <cmath>

namespace gridcoop {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(delim, start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace

std::optional<double> parse_time_of_day(std::string_view text) {
    if (text.find(':') == std::string_view::npos) {
        return parse_double(text);
    }
    auto parts = split(text, ':');
    if (parts.size() < 2 || parts.size() > 3) return std::nullopt;
    auto hours = parse_integer(parts[0]);
    auto minutes = parse_integer(parts[1]);
    std::optional<double> seconds = 0.0;
    if (parts.size() == 3) seconds = parse_double(parts[2]);
    if (!hours || !minutes || !seconds) return std::nullopt;
    if (*hours < 0 || *minutes < 0 || *minutes >= 60 || *seconds < 0.0 || *seconds >= 60.0) return std::nullopt;
    return static_cast<double>(*hours) * 3600.0 + static_cast<double>(*minutes) * 60.0 + *seconds;
}

Profiles::Sample Profiles::at(double t) const {
    auto it = std::upper_bound(time.begin(), time.end(), t);
    if (it == time.begin()) {
        throw ValidationError("profile has no sample at or before t=" + format_double(t));
    }
    auto idx = static_cast<std::size_t>(std::distance(time.begin(), it) - 1);
    return Sample{ghi[idx], load_multiplier[idx]};
}

bool Profiles::covers(double start, double end) const {
    return !time.empty() && time.front() <= start && time.back() >= end;
}

void Profiles::validate() const {
    if (time.size() != ghi.size() || time.size() != load_multiplier.size()) {
        throw ValidationError("profile columns differ in length");
    }
    if (time.empty()) {
        throw ValidationError("profile has no samples");
    }
    for (std::size_t i = 0; i < time.size(); ++i) {
        if (!std::isfinite(time[i]) || !std::isfinite(ghi[i]) || !std::isfinite(load_multiplier[i])) {
            throw ValidationError("profile sample " + std::to_string(i) + " is not finite");
        }
        if (i > 0 && !(time[i] > time[i - 1])) {
            throw ValidationError("profile timestamps must be strictly increasing");
        }
        if (ghi[i] < 0.0 || load_multiplier[i] < 0.0) {
            throw ValidationError("profile values must be non-negative");
        }
    }
}

Profiles parse_profiles(std::string_view csv) {
    Profiles out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool have_header = false;
    while (pos < csv.size()) {
        auto nl = csv.find('\n', pos);
        auto line = trim(csv.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
        pos = nl == std::string_view::npos ? csv.size() : nl + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;

        auto fields = split(line, ',');
        if (!have_header) {
            if (fields.size() != 3 || fields[0] != "time" || fields[1] != "ghi" || fields[2] != "load_mult") {
                throw ParseError(line_no, "expected header 'time,ghi,load_mult'");
            }
            have_header = true;
            continue;
        }
        if (fields.size() != 3) {
            throw ParseError(line_no, "expected 3 fields, found " + std::to_string(fields.size()));
        }
        auto t = parse_time_of_day(fields[0]);
        auto g = parse_double(fields[1]);
        auto m = parse_double(fields[2]);
        if (!t || !std::isfinite(*t)) throw ParseError(line_no, "bad time '" + std::string(fields[0]) + "'");
        if (!g || !std::isfinite(*g)) throw ParseError(line_no, "bad ghi '" + std::string(fields[1]) + "'");
        if (!m || !std::isfinite(*m)) throw ParseError(line_no, "bad load_mult '" + std::string(fields[2]) + "'");
        if (!out.time.empty() && !(*t > out.time.back())) {
            throw ParseError(line_no, "timestamps out of order");
        }
        if (*g < 0.0 || *m < 0.0) {
            throw ParseError(line_no, "negative profile value");
        }
        out.time.push_back(*t);
        out.ghi.push_back(*g);
        out.load_multiplier.push_back(*m);
    }
    if (!have_header) {
        throw ParseError(0, "profile file is empty");
    }
    if (out.time.empty()) {
        throw ParseError(0, "profile file has no samples");
    }
    return out;
}

Profiles load_profiles(const std::string& path) {
    return parse_profiles(read_text_file(path));
}

}  // namespace gridcoop
