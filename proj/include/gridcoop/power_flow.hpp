#pragma once

#include "gridcoop/feeder.hpp"

#include <complex>
#include <cstddef>
#include <vector>

namespace gridcoop {

/// Net complex power injected at each bus in per-unit, indexed like the
/// NormalizedFeeder. Generation positive, load negative. Capacitors are not
/// included here; the solver adds them from the feeder.
struct InjectionSet {
    std::vector<std::complex<double>> power;

    explicit InjectionSet(std::size_t bus_count) : power(bus_count, {0.0, 0.0}) {}

    void add(std::size_t bus, std::complex<double> s) { power.at(bus) += s; }
};

/// Injections for `multiplier` times the feeder's base loads.
InjectionSet load_injections(const NormalizedFeeder& feeder, double multiplier);

struct SolverOptions {
    double tolerance = 1e-8;
    int max_iterations = 100;
    /// Any bus magnitude below this aborts the sweep and flags collapse.
    double collapse_threshold = 0.5;
};

struct VoltageSolution {
    std::vector<std::complex<double>> voltage;
    /// Current from parent[i] into bus i on the line feeding bus i; entry 0 unused.
    std::vector<std::complex<double>> branch_current;
    /// Complex power leaving parent[i] toward bus i (sending end).
    std::vector<std::complex<double>> branch_flow;
    bool converged = false;
    bool collapsed = false;
    int iterations = 0;
    double max_mismatch = 0.0;

    double magnitude(std::size_t bus) const { return std::abs(voltage[bus]); }
    double angle(std::size_t bus) const { return std::arg(voltage[bus]); }
};

struct LossReport {
    double active = 0.0;
    double reactive = 0.0;
};

/// Backward/forward sweep from a flat start at `slack_setpoint`. Iterates
/// until the largest nodal power mismatch is within `options.tolerance`.
/// Non-convergence and collapse are reported through the result flags.
/// Throws ValidationError on a size mismatch or a non-positive tolerance.
VoltageSolution solve(const NormalizedFeeder& feeder, const InjectionSet& injections, double slack_setpoint,
                      const SolverOptions& options = {});

/// Series losses, sum of |I|^2 R and |I|^2 X. Throws ValidationError when
/// the solution did not converge.
LossReport losses(const NormalizedFeeder& feeder, const VoltageSolution& solution);

/// Complex power delivered by the slack bus into the feeder.
std::complex<double> slack_power(const NormalizedFeeder& feeder, const VoltageSolution& solution);

}  // namespace gridcoop
