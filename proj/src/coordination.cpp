#include "gridcoop/coordination.hpp"

#include "gridcoop/error.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace gridcoop {

std::string_view method_name(ControlMethod method) {
    switch (method) {
        case ControlMethod::NoControl: return "noctl";
        case ControlMethod::FixedCurve: return "fc";
        case ControlMethod::AdaptiveNoComm: return "ac-nocm";
        case ControlMethod::AdaptiveFixedWeights: return "ac-fw";
        case ControlMethod::AdaptiveDynamicWeights: return "ac-dw";
    }
    return "unknown";
}

std::optional<ControlMethod> parse_method(std::string_view name) {
    for (auto method : kAllMethods) {
        if (method_name(method) == name) return method;
    }
    return std::nullopt;
}

bool uses_communication(ControlMethod method) {
    return method == ControlMethod::AdaptiveFixedWeights || method == ControlMethod::AdaptiveDynamicWeights;
}

bool has_globally_reachable_node(const Eigen::MatrixXi& links) {
    const auto n = links.rows();
    for (Eigen::Index root = 0; root < n; ++root) {
        std::vector<bool> seen(static_cast<std::size_t>(n), false);
        std::vector<Eigen::Index> stack{root};
        seen[static_cast<std::size_t>(root)] = true;
        Eigen::Index reached = 1;
        while (!stack.empty()) {
            auto i = stack.back();
            stack.pop_back();
            for (Eigen::Index j = 0; j < n; ++j) {
                if (links(i, j) != 0 && !seen[static_cast<std::size_t>(j)]) {
                    seen[static_cast<std::size_t>(j)] = true;
                    ++reached;
                    stack.push_back(j);
                }
            }
        }
        if (reached == n) return true;
    }
    return false;
}

CommTopology build_topology(const std::vector<std::pair<std::size_t, std::size_t>>& links, std::size_t m) {
    if (m == 0) {
        throw ValidationError("communication topology needs at least one agent");
    }
    const auto n = static_cast<Eigen::Index>(m);
    CommTopology topology{Eigen::MatrixXi::Identity(n, n)};
    for (auto [a, b] : links) {
        if (a >= m || b >= m) {
            throw ValidationError("communication link references agent outside 0.." + std::to_string(m - 1));
        }
        topology.links(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = 1;
        topology.links(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = 1;
    }
    if (!has_globally_reachable_node(topology.links)) {
        throw ValidationError("communication topology has no globally reachable agent");
    }
    return topology;
}

WeightMatrix fixed_weights(const CommTopology& topology) {
    return WeightMatrix{topology.links.cast<double>(), WeightScheme::Fixed, false};
}

WeightMatrix dynamic_weights(const CommTopology& topology, const Eigen::VectorXd& q_available, double floor) {
    const auto n = topology.links.rows();
    if (q_available.size() != n) {
        throw ValidationError("headroom vector size does not match topology");
    }
    if ((q_available.array() < 0.0).any() || !q_available.allFinite()) {
        throw ValidationError("headroom must be finite and non-negative");
    }

    const Eigen::VectorXd q = q_available.cwiseMax(floor);
    WeightMatrix out{Eigen::MatrixXd::Zero(n, n), WeightScheme::Dynamic, false};
    for (Eigen::Index i = 0; i < n; ++i) {
        double neighbour_pool = 0.0;
        bool group_at_floor = q_available(i) < floor;
        bool has_neighbour = false;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i || topology.links(i, j) == 0) continue;
            has_neighbour = true;
            out.w(i, j) = q(i) / q(j);
            neighbour_pool += q(j);
            group_at_floor = group_at_floor && q_available(j) < floor;
        }
        out.w(i, i) = has_neighbour ? neighbour_pool / q(i) : 1.0;
        if (has_neighbour && group_at_floor) {
            for (Eigen::Index j = 0; j < n; ++j) out.w(i, j) = topology.links(i, j) != 0 ? 1.0 : 0.0;
            out.uniform_fallback = true;
        }
    }
    return out;
}

CoefficientMatrix normalize(const WeightMatrix& weights, const CommTopology& topology) {
    const auto n = topology.links.rows();
    if (weights.w.rows() != n || weights.w.cols() != n) {
        throw ValidationError("weight matrix size does not match topology");
    }
    CoefficientMatrix out{Eigen::MatrixXd::Zero(n, n), weights.scheme};
    for (Eigen::Index i = 0; i < n; ++i) {
        double row_sum = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (topology.links(i, j) != 0) row_sum += weights.w(i, j);
        }
        if (!(row_sum > 0.0) || !std::isfinite(row_sum)) {
            throw ValidationError("weight row " + std::to_string(i) + " has no positive mass");
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            if (topology.links(i, j) != 0) out.d(i, j) = weights.w(i, j) / row_sum;
        }
    }
    return out;
}

Eigen::VectorXd update_estimates(ControlMethod method, const RoundInputs& in, const CoefficientMatrix* coefficients) {
    const auto m = in.alpha.size();
    auto size_ok = [m](auto n) { return static_cast<Eigen::Index>(n) == m; };
    if (!size_ok(in.beta.size()) || !size_ok(in.gradient.size()) || !size_ok(in.volt_var.size()) ||
        !size_ok(in.rating.size()) || !size_ok(in.alpha_limit.size())) {
        throw ValidationError("update_estimates: per-agent vectors differ in length");
    }

    Eigen::VectorXd descent = Eigen::VectorXd::Zero(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        if (const auto& g = in.gradient[static_cast<std::size_t>(i)]) descent(i) = in.beta(i) * *g;
    }

    Eigen::VectorXd next;
    switch (method) {
        case ControlMethod::NoControl:
            next = Eigen::VectorXd::Zero(m);
            break;
        case ControlMethod::FixedCurve:
            next = in.volt_var.cwiseQuotient(in.rating);
            break;
        case ControlMethod::AdaptiveNoComm:
            next = in.alpha - descent;
            break;
        case ControlMethod::AdaptiveFixedWeights:
        case ControlMethod::AdaptiveDynamicWeights: {
            auto wanted = method == ControlMethod::AdaptiveFixedWeights ? WeightScheme::Fixed : WeightScheme::Dynamic;
            if (coefficients == nullptr) {
                throw ValidationError("communication method requires a coefficient matrix");
            }
            if (coefficients->scheme != wanted) {
                throw ValidationError("coefficient matrix weight scheme does not match control method");
            }
            if (coefficients->d.rows() != m || coefficients->d.cols() != m) {
                throw ValidationError("coefficient matrix size does not match agent count");
            }
            next = coefficients->d * in.alpha - descent;
            break;
        }
    }
    return next.cwiseMax(-in.alpha_limit).cwiseMin(in.alpha_limit);
}

}  // namespace gridcoop
