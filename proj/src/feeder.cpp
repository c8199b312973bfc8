#include "gridcoop/feeder.hpp"

#include "gridcoop/error.hpp"
#include "gridcoop/record_text.hpp"

#include <cmath>
#include <numeric>
#include <queue>
#include <unordered_map>
#include <unordered_set>

namespace gridcoop {

namespace {

bool finite(double x) {
    return std::isfinite(x);
}

// Union-find over bus indices, used for the radiality check.
class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent_[b] = a;
        return true;
    }

private:
    std::vector<std::size_t> parent_;
};

std::complex<double> line_impedance_pu(const Line& line, double nominal_kv, double s_base_kva) {
    double z_base = impedance_base_ohm(nominal_kv, s_base_kva);
    return {line.resistance_ohm / z_base, line.reactance_ohm / z_base};
}

}  // namespace

std::size_t FeederModel::bus_index(std::string_view id) const {
    for (std::size_t i = 0; i < buses.size(); ++i) {
        if (buses[i].id == id) return i;
    }
    throw ValidationError("unknown bus '" + std::string(id) + "'");
}

bool FeederModel::has_bus(std::string_view id) const {
    for (const auto& bus : buses) {
        if (bus.id == id) return true;
    }
    return false;
}

double FeederModel::total_load_kw() const {
    double total = 0.0;
    for (const auto& load : loads) total += load.p_kw;
    return total;
}

double FeederModel::total_load_kvar() const {
    double total = 0.0;
    for (const auto& load : loads) total += load.q_kvar;
    return total;
}

double impedance_base_ohm(double nominal_kv, double s_base_kva) {
    return nominal_kv * nominal_kv * 1000.0 / s_base_kva;
}

void validate_feeder(const FeederModel& feeder) {
    if (!(feeder.s_base_kva > 0.0) || !finite(feeder.s_base_kva)) {
        throw ValidationError("system power base must be positive");
    }
    if (!(feeder.slack_voltage_pu > 0.0) || !finite(feeder.slack_voltage_pu)) {
        throw ValidationError("slack voltage setpoint must be positive");
    }
    if (feeder.buses.empty()) {
        throw ValidationError("feeder has no buses");
    }

    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < feeder.buses.size(); ++i) {
        const auto& bus = feeder.buses[i];
        if (bus.id.empty()) {
            throw ValidationError("bus with empty id");
        }
        if (!index.emplace(bus.id, i).second) {
            throw ValidationError("duplicate bus id '" + bus.id + "'");
        }
        if (!(bus.nominal_kv > 0.0) || !finite(bus.nominal_kv)) {
            throw ValidationError("bus '" + bus.id + "' nominal voltage must be positive");
        }
    }

    if (feeder.slack_bus.empty()) {
        throw ValidationError("missing slack bus");
    }
    if (!index.count(feeder.slack_bus)) {
        throw ValidationError("slack bus '" + feeder.slack_bus + "' does not exist");
    }

    auto lookup = [&](const std::string& id, const char* what) {
        auto it = index.find(id);
        if (it == index.end()) {
            throw ValidationError(std::string(what) + " references unknown bus '" + id + "'");
        }
        return it->second;
    };

    DisjointSets sets(feeder.buses.size());
    for (const auto& line : feeder.lines) {
        auto from = lookup(line.from_bus, "line");
        auto to = lookup(line.to_bus, "line");
        if (from == to) {
            throw ValidationError("line " + line.from_bus + "-" + line.to_bus + " connects a bus to itself");
        }
        if (!(line.resistance_ohm >= 0.0) || !finite(line.resistance_ohm)) {
            throw ValidationError("line " + line.from_bus + "-" + line.to_bus + " resistance must be non-negative");
        }
        if (line.reactance_ohm == 0.0 || !finite(line.reactance_ohm)) {
            throw ValidationError("line " + line.from_bus + "-" + line.to_bus + " reactance must be finite and nonzero");
        }
        if (feeder.buses[from].nominal_kv != feeder.buses[to].nominal_kv) {
            throw ValidationError("line " + line.from_bus + "-" + line.to_bus +
                                  " joins buses of different nominal voltage");
        }
        if (!sets.unite(from, to)) {
            throw ValidationError("non-radial topology: line " + line.from_bus + "-" + line.to_bus + " closes a loop");
        }
    }
    if (feeder.lines.size() + 1 != feeder.buses.size()) {
        throw ValidationError("feeder is not connected: " + std::to_string(feeder.buses.size()) + " buses but " +
                              std::to_string(feeder.lines.size()) + " lines");
    }

    for (const auto& load : feeder.loads) {
        lookup(load.bus, "load");
        if (!(load.p_kw >= 0.0) || !finite(load.p_kw) || !finite(load.q_kvar)) {
            throw ValidationError("load at '" + load.bus + "' must have finite, non-negative active power");
        }
    }
    for (const auto& cap : feeder.capacitors) {
        lookup(cap.bus, "capacitor");
        if (!(cap.q_kvar >= 0.0) || !finite(cap.q_kvar)) {
            throw ValidationError("capacitor at '" + cap.bus + "' must have non-negative rating");
        }
    }
}

FeederModel parse_feeder(std::string_view text) {
    auto doc = parse_record_text(text);
    doc.expect_sections({"bases", "buses", "lines", "loads", "capacitors", "slack"});

    FeederModel feeder;
    std::optional<double> default_kv;
    if (auto bases = doc.section("bases")) {
        auto record = bases->merged();
        record.expect_only({"s_base_kva", "kv"});
        if (auto s = record.optional_double("s_base_kva")) feeder.s_base_kva = *s;
        default_kv = record.optional_double("kv");
    }

    if (auto buses = doc.section("buses")) {
        for (const auto& record : buses->records) {
            record.expect_only({"id", "kv"});
            Bus bus;
            bus.id = record.require("id");
            if (auto kv = record.optional_double("kv")) {
                bus.nominal_kv = *kv;
            } else if (default_kv) {
                bus.nominal_kv = *default_kv;
            } else {
                throw ParseError(record.line, "missing field 'kv' and no default in [bases]");
            }
            feeder.buses.push_back(std::move(bus));
        }
    }

    if (auto lines = doc.section("lines")) {
        for (const auto& record : lines->records) {
            record.expect_only({"from", "to", "r", "x"});
            feeder.lines.push_back(Line{record.require("from"), record.require("to"), record.require_double("r"),
                                        record.require_double("x")});
        }
    }

    if (auto loads = doc.section("loads")) {
        for (const auto& record : loads->records) {
            record.expect_only({"bus", "p", "q"});
            feeder.loads.push_back(
                Load{record.require("bus"), record.require_double("p"), record.optional_double("q").value_or(0.0)});
        }
    }

    if (auto caps = doc.section("capacitors")) {
        for (const auto& record : caps->records) {
            record.expect_only({"bus", "q"});
            feeder.capacitors.push_back(ShuntCapacitor{record.require("bus"), record.require_double("q")});
        }
    }

    if (auto slack = doc.section("slack")) {
        auto record = slack->merged();
        record.expect_only({"bus", "v"});
        feeder.slack_bus = record.require("bus");
        feeder.slack_voltage_pu = record.optional_double("v").value_or(1.0);
    }

    validate_feeder(feeder);
    return feeder;
}

FeederModel load_feeder(const std::string& path) {
    return parse_feeder(read_text_file(path));
}

double self_susceptance(const FeederModel& feeder, std::string_view bus) {
    auto idx = feeder.bus_index(bus);
    double kv = feeder.buses[idx].nominal_kv;
    double total = 0.0;
    for (const auto& line : feeder.lines) {
        if (line.from_bus == bus || line.to_bus == bus) {
            total += (1.0 / line_impedance_pu(line, kv, feeder.s_base_kva)).imag();
        }
    }
    return total;
}

std::size_t NormalizedFeeder::index_of(std::string_view id) const {
    for (std::size_t i = 0; i < bus_ids.size(); ++i) {
        if (bus_ids[i] == id) return i;
    }
    throw ValidationError("unknown bus '" + std::string(id) + "'");
}

NormalizedFeeder to_per_unit(const FeederModel& feeder) {
    validate_feeder(feeder);

    const std::size_t n = feeder.buses.size();
    std::unordered_map<std::string, std::size_t> physical_index;
    for (std::size_t i = 0; i < n; ++i) physical_index.emplace(feeder.buses[i].id, i);

    std::vector<std::vector<std::size_t>> incident(n);
    for (std::size_t l = 0; l < feeder.lines.size(); ++l) {
        incident[physical_index.at(feeder.lines[l].from_bus)].push_back(l);
        incident[physical_index.at(feeder.lines[l].to_bus)].push_back(l);
    }

    NormalizedFeeder out;
    out.s_base_kva = feeder.s_base_kva;
    out.slack_voltage_pu = feeder.slack_voltage_pu;
    out.slack_bus = feeder.slack_bus;

    std::vector<int> order_of(n, -1);
    std::queue<std::size_t> frontier;
    auto visit = [&](std::size_t phys, int parent, std::complex<double> z, std::size_t line, bool reversed) {
        order_of[phys] = static_cast<int>(out.bus_ids.size());
        out.bus_ids.push_back(feeder.buses[phys].id);
        out.nominal_kv.push_back(feeder.buses[phys].nominal_kv);
        out.parent.push_back(parent);
        out.branch_impedance.push_back(z);
        out.branch_line.push_back(line);
        out.branch_reversed.push_back(reversed);
        frontier.push(phys);
    };

    visit(physical_index.at(feeder.slack_bus), -1, {0.0, 0.0}, 0, false);
    while (!frontier.empty()) {
        auto phys = frontier.front();
        frontier.pop();
        for (auto l : incident[phys]) {
            const auto& line = feeder.lines[l];
            bool from_here = line.from_bus == feeder.buses[phys].id;
            auto other = physical_index.at(from_here ? line.to_bus : line.from_bus);
            if (order_of[other] >= 0) continue;
            visit(other, order_of[phys], line_impedance_pu(line, feeder.buses[phys].nominal_kv, feeder.s_base_kva), l,
                  !from_here);
        }
    }

    out.load.assign(n, {0.0, 0.0});
    out.capacitor_q.assign(n, 0.0);
    for (const auto& load : feeder.loads) {
        auto idx = static_cast<std::size_t>(order_of[physical_index.at(load.bus)]);
        std::complex<double> s{load.p_kw / feeder.s_base_kva, load.q_kvar / feeder.s_base_kva};
        out.load[idx] += s;
        out.load_records.emplace_back(idx, s);
    }
    for (const auto& cap : feeder.capacitors) {
        auto idx = static_cast<std::size_t>(order_of[physical_index.at(cap.bus)]);
        double q = cap.q_kvar / feeder.s_base_kva;
        out.capacitor_q[idx] += q;
        out.capacitor_records.emplace_back(idx, q);
    }
    return out;
}

FeederModel from_per_unit(const NormalizedFeeder& normalized) {
    FeederModel feeder;
    feeder.s_base_kva = normalized.s_base_kva;
    feeder.slack_voltage_pu = normalized.slack_voltage_pu;
    feeder.slack_bus = normalized.slack_bus;

    const std::size_t n = normalized.size();
    for (std::size_t i = 0; i < n; ++i) {
        feeder.buses.push_back(Bus{normalized.bus_ids[i], normalized.nominal_kv[i]});
    }

    feeder.lines.resize(n == 0 ? 0 : n - 1);
    for (std::size_t i = 1; i < n; ++i) {
        const auto& parent_id = normalized.bus_ids[static_cast<std::size_t>(normalized.parent[i])];
        double z_base = impedance_base_ohm(normalized.nominal_kv[i], normalized.s_base_kva);
        Line line;
        line.from_bus = normalized.branch_reversed[i] ? normalized.bus_ids[i] : parent_id;
        line.to_bus = normalized.branch_reversed[i] ? parent_id : normalized.bus_ids[i];
        line.resistance_ohm = normalized.branch_impedance[i].real() * z_base;
        line.reactance_ohm = normalized.branch_impedance[i].imag() * z_base;
        feeder.lines[normalized.branch_line[i]] = std::move(line);
    }

    for (const auto& [idx, s] : normalized.load_records) {
        feeder.loads.push_back(
            Load{normalized.bus_ids[idx], s.real() * normalized.s_base_kva, s.imag() * normalized.s_base_kva});
    }
    for (const auto& [idx, q] : normalized.capacitor_records) {
        feeder.capacitors.push_back(ShuntCapacitor{normalized.bus_ids[idx], q * normalized.s_base_kva});
    }
    return feeder;
}

}  // namespace gridcoop
