#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gridcoop {

/// The five agent update rules compared by the simulator.
enum class ControlMethod {
    NoControl,
    FixedCurve,
    AdaptiveNoComm,
    AdaptiveFixedWeights,
    AdaptiveDynamicWeights,
};

inline constexpr ControlMethod kAllMethods[] = {
    ControlMethod::NoControl,
    ControlMethod::FixedCurve,
    ControlMethod::AdaptiveNoComm,
    ControlMethod::AdaptiveFixedWeights,
    ControlMethod::AdaptiveDynamicWeights,
};

/// Short CLI name: noctl, fc, ac-nocm, ac-fw, ac-dw.
std::string_view method_name(ControlMethod method);
std::optional<ControlMethod> parse_method(std::string_view name);
bool uses_communication(ControlMethod method);

/// Binary adjacency with a unit diagonal (every agent hears itself).
struct CommTopology {
    Eigen::MatrixXi links;

    std::size_t size() const { return static_cast<std::size_t>(links.rows()); }
    bool linked(std::size_t i, std::size_t j) const {
        return links(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) != 0;
    }
};

/// Builds a symmetric topology from 0-based agent index pairs and checks
/// that at least one agent can reach every other. Throws ValidationError
/// on out-of-range ids, m == 0, or a topology without a globally
/// reachable agent.
CommTopology build_topology(const std::vector<std::pair<std::size_t, std::size_t>>& links, std::size_t m);

/// True when some node reaches every node along directed edges i -> j
/// where links(i, j) != 0.
bool has_globally_reachable_node(const Eigen::MatrixXi& links);

enum class WeightScheme { Fixed, Dynamic };

struct WeightMatrix {
    Eigen::MatrixXd w;
    WeightScheme scheme = WeightScheme::Fixed;
    /// Set when every headroom in a communicating group sat at the floor,
    /// so the dynamic weights degenerated to uniform ones.
    bool uniform_fallback = false;
};

/// All weights 1 on the topology mask.
WeightMatrix fixed_weights(const CommTopology& topology);

/// Floor applied to headroom inside weight ratios only.
inline constexpr double kHeadroomFloor = 1e-6;

/// Headroom-driven weights. Off the diagonal w_ij = s_ij * q_i / q_j; on
/// the diagonal w_ii = (sum over neighbours j of q_j) / q_i. Headroom below
/// `floor` is raised to `floor` first. A lone agent keeps w_ii = 1. A row
/// whose agent and neighbours all sit below the floor falls back to
/// uniform weights and sets `uniform_fallback`.
/// Throws ValidationError on negative headroom or a size mismatch.
WeightMatrix dynamic_weights(const CommTopology& topology, const Eigen::VectorXd& q_available,
                             double floor = kHeadroomFloor);

/// Row-stochastic communication coefficients.
struct CoefficientMatrix {
    Eigen::MatrixXd d;
    WeightScheme scheme = WeightScheme::Fixed;
};

/// d_ij = w_ij s_ij / sum_l w_il s_il. Throws ValidationError on a
/// non-positive row sum or a size mismatch.
CoefficientMatrix normalize(const WeightMatrix& weights, const CommTopology& topology);

/// Everything one synchronous round needs, one entry per agent.
struct RoundInputs {
    Eigen::VectorXd alpha;
    Eigen::VectorXd beta;
    /// nullopt marks a singular gradient; that agent skips its descent step.
    std::vector<std::optional<double>> gradient;
    /// Volt-Var curve output, same unit as `rating`.
    Eigen::VectorXd volt_var;
    Eigen::VectorXd rating;
    /// Symmetric clamp applied to the new estimate.
    Eigen::VectorXd alpha_limit;
};

/// One synchronous estimate update under `method`. Communication methods
/// need `coefficients` with the matching weight scheme. Throws
/// ValidationError on a dimension or scheme mismatch.
Eigen::VectorXd update_estimates(ControlMethod method, const RoundInputs& in,
                                 const CoefficientMatrix* coefficients = nullptr);

}  // namespace gridcoop
