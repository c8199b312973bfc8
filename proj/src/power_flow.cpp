#include "gridcoop/power_flow.hpp"

#include "gridcoop/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gridcoop {

InjectionSet load_injections(const NormalizedFeeder& feeder, double multiplier) {
    InjectionSet injections(feeder.size());
    for (std::size_t i = 0; i < feeder.size(); ++i) {
        injections.power[i] = -multiplier * feeder.load[i];
    }
    return injections;
}

namespace {

std::complex<double> specified_power(const NormalizedFeeder& feeder, const InjectionSet& injections, std::size_t bus,
                                     std::complex<double> v) {
    double v2 = std::norm(v);
    return injections.power[bus] + std::complex<double>{0.0, feeder.capacitor_q[bus] * v2};
}

}  // namespace

VoltageSolution solve(const NormalizedFeeder& feeder, const InjectionSet& injections, double slack_setpoint,
                      const SolverOptions& options) {
    const std::size_t n = feeder.size();
    if (injections.power.size() != n) {
        throw ValidationError("injection set size does not match feeder");
    }
    if (!(options.tolerance > 0.0)) {
        throw ValidationError("power flow tolerance must be positive");
    }
    if (!(slack_setpoint > 0.0)) {
        throw ValidationError("slack setpoint must be positive");
    }

    VoltageSolution sol;
    sol.voltage.assign(n, {slack_setpoint, 0.0});
    sol.branch_current.assign(n, {0.0, 0.0});
    sol.branch_flow.assign(n, {0.0, 0.0});

    // Current each bus pushes into the network, from the latest voltages.
    std::vector<std::complex<double>> injected(n, {0.0, 0.0});
    auto update_injected = [&] {
        for (std::size_t i = 1; i < n; ++i) {
            injected[i] = std::conj(specified_power(feeder, injections, i, sol.voltage[i]) / sol.voltage[i]);
        }
    };
    // Backward: accumulate subtree demand current onto each branch.
    std::vector<std::complex<double>> subtree(n);
    auto backward_sweep = [&] {
        for (std::size_t i = 0; i < n; ++i) subtree[i] = -injected[i];
        for (std::size_t i = n; i-- > 1;) {
            sol.branch_current[i] = subtree[i];
            subtree[static_cast<std::size_t>(feeder.parent[i])] += subtree[i];
        }
    };
    update_injected();

    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        sol.iterations = iter;
        backward_sweep();

        // Forward: drop voltage down from the slack.
        bool collapsed = false;
        for (std::size_t i = 1; i < n; ++i) {
            auto p = static_cast<std::size_t>(feeder.parent[i]);
            sol.voltage[i] = sol.voltage[p] - feeder.branch_impedance[i] * sol.branch_current[i];
            if (std::abs(sol.voltage[i]) < options.collapse_threshold || !std::isfinite(std::abs(sol.voltage[i]))) {
                collapsed = true;
            }
        }
        if (collapsed) {
            sol.collapsed = true;
            sol.converged = false;
            sol.max_mismatch = std::numeric_limits<double>::infinity();
            return sol;
        }

        // Mismatch: specified power at the new voltage versus the power
        // the network absorbs with the currents just used.
        double worst = 0.0;
        for (std::size_t i = 1; i < n; ++i) {
            auto network = sol.voltage[i] * std::conj(injected[i]);
            worst = std::max(worst, std::abs(specified_power(feeder, injections, i, sol.voltage[i]) - network));
        }
        sol.max_mismatch = worst;
        update_injected();
        if (worst <= options.tolerance) {
            // Currents consistent with the reported voltages, so nodal
            // balance holds exactly and only the line drops carry the
            // residual.
            backward_sweep();
            sol.converged = true;
            break;
        }
    }

    for (std::size_t i = 1; i < n; ++i) {
        auto p = static_cast<std::size_t>(feeder.parent[i]);
        sol.branch_flow[i] = sol.voltage[p] * std::conj(sol.branch_current[i]);
    }
    return sol;
}

LossReport losses(const NormalizedFeeder& feeder, const VoltageSolution& solution) {
    if (!solution.converged) {
        throw ValidationError("losses requested for an unconverged power flow");
    }
    LossReport report;
    for (std::size_t i = 1; i < feeder.size(); ++i) {
        double i2 = std::norm(solution.branch_current[i]);
        report.active += i2 * feeder.branch_impedance[i].real();
        report.reactive += i2 * feeder.branch_impedance[i].imag();
    }
    return report;
}

std::complex<double> slack_power(const NormalizedFeeder& feeder, const VoltageSolution& solution) {
    std::complex<double> total{0.0, 0.0};
    for (std::size_t i = 1; i < feeder.size(); ++i) {
        if (feeder.parent[i] == 0) total += solution.branch_flow[i];
    }
    return total;
}

}  // namespace gridcoop
