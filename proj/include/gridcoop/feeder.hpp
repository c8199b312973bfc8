#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gridcoop {

/// Bus with its line-to-neutral nominal voltage in kV.
struct Bus {
    std::string id;
    double nominal_kv = 0.0;
};

/// Series-only line model; shunt charging is not represented.
struct Line {
    std::string from_bus;
    std::string to_bus;
    double resistance_ohm = 0.0;
    double reactance_ohm = 0.0;
};

/// Constant-power load at load multiplier 1.0.
struct Load {
    std::string bus;
    double p_kw = 0.0;
    double q_kvar = 0.0;
};

/// Injection at nominal voltage; scales with |V|^2 in the solver.
struct ShuntCapacitor {
    std::string bus;
    double q_kvar = 0.0;
};

inline constexpr double kDefaultSystemBaseKva = 3490.0;

struct FeederModel {
    std::vector<Bus> buses;
    std::vector<Line> lines;
    std::vector<Load> loads;
    std::vector<ShuntCapacitor> capacitors;
    std::string slack_bus;
    double slack_voltage_pu = 1.0;
    double s_base_kva = kDefaultSystemBaseKva;

    /// Index into `buses`; throws ValidationError on an unknown id.
    std::size_t bus_index(std::string_view id) const;
    bool has_bus(std::string_view id) const;

    double total_load_kw() const;
    double total_load_kvar() const;
};

/// Throws ValidationError describing the first violated invariant:
/// unique bus ids, positive voltages, dangling references, a radial and
/// connected line graph, matching nominal voltage across each line.
void validate_feeder(const FeederModel& feeder);

/// Parses and validates a feeder definition document (see docs/file_formats.md).
FeederModel parse_feeder(std::string_view text);
FeederModel load_feeder(const std::string& path);

/// Per-unit impedance base in ohms for a bus voltage and system power base.
double impedance_base_ohm(double nominal_kv, double s_base_kva);

/// Self-susceptance B_mm in per-unit: sum of Im(1/z) over every line
/// incident to `bus`. Throws ValidationError on an unknown bus.
double self_susceptance(const FeederModel& feeder, std::string_view bus);

/// Radial feeder in per-unit, buses ordered breadth-first from the slack
/// so that parent[i] < i for every non-slack bus. Index 0 is the slack.
struct NormalizedFeeder {
    std::vector<std::string> bus_ids;
    std::vector<double> nominal_kv;
    std::vector<int> parent;
    /// Impedance of the line joining bus i to parent[i]; entry 0 unused.
    std::vector<std::complex<double>> branch_impedance;
    /// Source line index in the physical model, and whether the physical
    /// line was declared child-to-parent.
    std::vector<std::size_t> branch_line;
    std::vector<bool> branch_reversed;
    /// Per-bus totals: load at multiplier 1.0 (consumption positive) and
    /// capacitor rating.
    std::vector<std::complex<double>> load;
    std::vector<double> capacitor_q;
    /// Individual records, kept so the physical model can be rebuilt.
    std::vector<std::pair<std::size_t, std::complex<double>>> load_records;
    std::vector<std::pair<std::size_t, double>> capacitor_records;
    double s_base_kva = kDefaultSystemBaseKva;
    double slack_voltage_pu = 1.0;
    std::string slack_bus;

    std::size_t size() const { return bus_ids.size(); }
    /// Throws ValidationError on an unknown id.
    std::size_t index_of(std::string_view id) const;
};

NormalizedFeeder to_per_unit(const FeederModel& feeder);

/// Inverse of to_per_unit. Buses come back in breadth-first order; lines,
/// loads and capacitors in their original order and orientation.
FeederModel from_per_unit(const NormalizedFeeder& normalized);

}  // namespace gridcoop
