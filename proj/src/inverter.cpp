#include "gridcoop/inverter.hpp"

#include "gridcoop/error.hpp"

#include <algorithm>
#include <cmath>

namespace gridcoop {

void VoltVarParams::validate() const {
    bool ordered = v_min < deadband_low && deadband_low <= v_ref && v_ref <= deadband_high && deadband_high < v_max;
    if (!ordered || !(v_min > 0.0)) {
        throw ValidationError("Volt-Var breakpoints must satisfy 0 < v_min < deadband_low <= v_ref <= deadband_high < v_max");
    }
}

void InverterAgent::validate() const {
    if (!(rating_kva > 0.0) || !std::isfinite(rating_kva)) {
        throw ValidationError("inverter '" + id + "' rating must be positive");
    }
    if (!(dc_capacity_kw >= 0.0) || !std::isfinite(dc_capacity_kw)) {
        throw ValidationError("inverter '" + id + "' DC capacity must be non-negative");
    }
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw ValidationError("inverter '" + id + "' step gain must be positive");
    }
}

double dc_power(double dc_capacity_kw, double ghi) {
    return dc_capacity_kw * ghi / 1000.0;
}

double available_reactive(double rating, double p_active) {
    if (rating < 0.0 || p_active < 0.0) {
        throw ValidationError("available_reactive: negative rating or active power");
    }
    double p = std::min(p_active, rating);
    return std::sqrt((rating - p) * (rating + p));
}

double fair_ratio(double q_out, double rating) {
    return q_out / rating;
}

double volt_var(double v, const VoltVarParams& params, double q_available) {
    params.validate();
    if (v > params.deadband_high) {
        double fraction = (v - params.deadband_high) / (params.v_max - params.deadband_high);
        return -q_available * std::min(1.0, fraction);
    }
    if (v < params.deadband_low) {
        double fraction = (params.deadband_low - v) / (params.deadband_low - params.v_min);
        return q_available * std::min(1.0, fraction);
    }
    return 0.0;
}

std::optional<double> gradient(double q_avail, double v, double q_out, double b_mm, double singular_below) {
    double denominator = q_out - v * v * b_mm;
    if (!(std::abs(denominator) >= singular_below)) {
        return std::nullopt;
    }
    return -q_avail * (1.0 - v) * v / denominator;
}

DispatchResult dispatch(const InverterAgent& agent, double q_command_kvar, double p_available_kw) {
    const double s = agent.rating_kva;
    DispatchResult out;
    out.q_kvar = std::clamp(q_command_kvar, -s, s);
    double p_cap = std::sqrt(std::max(0.0, (s - out.q_kvar) * (s + out.q_kvar)));
    double p_available = std::max(0.0, p_available_kw);
    out.p_kw = std::min(p_available, p_cap);
    out.curtailed_kw = std::max(0.0, p_available - out.p_kw);
    out.saturated = out.q_kvar != q_command_kvar || p_available > p_cap;
    return out;
}

double alpha_limit(double rating, double q_available, bool var_priority) {
    return var_priority ? 1.0 : std::min(1.0, q_available / rating);
}

}  // namespace gridcoop
