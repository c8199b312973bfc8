#pragma once
// Reference computations kept independent of the library under test.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

/// Receiving-end voltage of a two-bus system: slack `v1` (real) feeding a
/// constant-power load `s_load` through `z`. Solves
///   u^2 + (2(PR + QX) - v1^2) u + |S|^2 |Z|^2 = 0,  u = |V2|^2
/// on the high-voltage root, then recovers the angle from
///   v1 conj(V2) = u + Z conj(S).
inline cplx two_bus_voltage(double v1, cplx z, cplx s_load) {
    const double r = z.real(), x = z.imag(), p = s_load.real(), q = s_load.imag();
    const double b = 2.0 * (p * r + q * x) - v1 * v1;
    const double c = std::norm(s_load) * std::norm(z);
    const double disc = b * b - 4.0 * c;
    if (disc < 0.0) throw std::domain_error("no power-flow solution");
    const double u = (-b + std::sqrt(disc)) / 2.0;
    return std::conj((u + z * std::conj(s_load)) / v1);
}

struct Branch {
    std::size_t from;
    std::size_t to;
    cplx z;
};

/// Newton-Raphson on the bus admittance matrix in rectangular coordinates.
/// Bus 0 is the slack held at `slack` (real). `injection` is net complex
/// power into each bus (generation positive); `shunt_q` adds q |V|^2 of
/// reactive injection. The Jacobian is formed by central differences; the
/// iteration stops on the residual, so its accuracy is set by `tolerance`.
inline std::vector<cplx> newton_voltages(std::size_t n, const std::vector<Branch>& branches,
                                         const std::vector<cplx>& injection, const std::vector<double>& shunt_q,
                                         double slack, double tolerance = 1e-13, int max_iter = 50) {
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (const auto& br : branches) {
        const cplx yb = 1.0 / br.z;
        const auto a = static_cast<Eigen::Index>(br.from), b = static_cast<Eigen::Index>(br.to);
        y(a, a) += yb;
        y(b, b) += yb;
        y(a, b) -= yb;
        y(b, a) -= yb;
    }
    const std::size_t unknowns = 2 * (n - 1);
    auto voltages = [&](const Eigen::VectorXd& state) {
        Eigen::VectorXcd v(static_cast<Eigen::Index>(n));
        v(0) = slack;
        for (std::size_t i = 1; i < n; ++i) {
            v(static_cast<Eigen::Index>(i)) = cplx(state(static_cast<Eigen::Index>(2 * (i - 1))),
                                                   state(static_cast<Eigen::Index>(2 * (i - 1) + 1)));
        }
        return v;
    };
    auto residual = [&](const Eigen::VectorXd& state) {
        const Eigen::VectorXcd v = voltages(state);
        const Eigen::VectorXcd current = y * v;
        Eigen::VectorXd f(static_cast<Eigen::Index>(unknowns));
        for (std::size_t i = 1; i < n; ++i) {
            const auto ei = static_cast<Eigen::Index>(i);
            const cplx s_net = v(ei) * std::conj(current(ei));
            const cplx spec = injection[i] + cplx(0.0, shunt_q[i] * std::norm(v(ei)));
            const cplx mismatch = s_net - spec;
            f(static_cast<Eigen::Index>(2 * (i - 1))) = mismatch.real();
            f(static_cast<Eigen::Index>(2 * (i - 1) + 1)) = mismatch.imag();
        }
        return f;
    };

    Eigen::VectorXd state(static_cast<Eigen::Index>(unknowns));
    for (std::size_t i = 1; i < n; ++i) {
        state(static_cast<Eigen::Index>(2 * (i - 1))) = slack;
        state(static_cast<Eigen::Index>(2 * (i - 1) + 1)) = 0.0;
    }
    for (int iter = 0; iter < max_iter; ++iter) {
        const Eigen::VectorXd f = residual(state);
        if (f.cwiseAbs().maxCoeff() < tolerance) {
            const Eigen::VectorXcd v = voltages(state);
            return {v.data(), v.data() + v.size()};
        }
        Eigen::MatrixXd jac(static_cast<Eigen::Index>(unknowns), static_cast<Eigen::Index>(unknowns));
        const double h = 1e-7;
        for (std::size_t k = 0; k < unknowns; ++k) {
            Eigen::VectorXd up = state, down = state;
            up(static_cast<Eigen::Index>(k)) += h;
            down(static_cast<Eigen::Index>(k)) -= h;
            jac.col(static_cast<Eigen::Index>(k)) = (residual(up) - residual(down)) / (2.0 * h);
        }
        state -= jac.fullPivLu().solve(f);
    }
    throw std::runtime_error("newton oracle did not converge");
}

}  // namespace oracle
