#pragma once

#include <optional>
#include <string>

namespace gridcoop {

/// Piecewise-linear Volt-Var curve breakpoints, all in per-unit.
struct VoltVarParams {
    double v_ref = 1.0;
    double deadband_low = 0.98;
    double deadband_high = 1.02;
    double v_min = 0.92;
    double v_max = 1.08;

    /// Throws ValidationError unless v_min < deadband_low <= v_ref <= deadband_high < v_max.
    void validate() const;
};

inline constexpr double kDefaultStepGain = 0.1;

struct InverterAgent {
    std::string id;
    std::string bus;
    double rating_kva = 0.0;
    double dc_capacity_kw = 0.0;
    double beta = kDefaultStepGain;
    double alpha = 0.0;

    /// Throws ValidationError on a non-positive rating or gain.
    void validate() const;
};

struct DispatchResult {
    double p_kw = 0.0;
    /// Positive injects, negative absorbs.
    double q_kvar = 0.0;
    double curtailed_kw = 0.0;
    /// True when the apparent-power rating limited the output.
    bool saturated = false;
};

/// DC-side power for an irradiance in W/m^2, nameplate at 1000 W/m^2.
double dc_power(double dc_capacity_kw, double ghi);

/// Reactive headroom sqrt(S^2 - P^2). Active power above the rating is
/// clamped to the rating first. Throws ValidationError on negative inputs.
double available_reactive(double rating, double p_active);

/// Fair utilization ratio Q/S, sign preserved.
double fair_ratio(double q_out, double rating);

/// Reactive command from the Volt-Var curve: zero in the deadband, linear
/// ramp to +/-q_available at v_min / v_max, saturated beyond.
double volt_var(double v, const VoltVarParams& params, double q_available);

inline constexpr double kGradientSingularity = 1e-9;

/// Local voltage-deviation gradient with respect to the agent's ratio,
///   g = -q_avail * (1 - v) * v / (q_out - v^2 * b_mm),
/// all in per-unit. Returns nullopt when the denominator magnitude is below
/// `singular_below`; the caller skips the gradient step for that round.
std::optional<double> gradient(double q_avail, double v, double q_out, double b_mm,
                               double singular_below = kGradientSingularity);

/// Var-priority dispatch: reactive command clamped to the rating, active
/// power takes whatever apparent power is left.
DispatchResult dispatch(const InverterAgent& agent, double q_command_kvar, double p_available_kw);

/// Symmetric bound on the ratio after an update: the full rating when
/// active power may be curtailed, otherwise the current headroom.
double alpha_limit(double rating, double q_available, bool var_priority);

}  // namespace gridcoop
