#pragma once

#include <Eigen/Dense>

#include <complex>

namespace gaussfisher {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

/// Phase-space matrices use the ordering R = (Q_1..Q_n, P_1..P_n).
/// Index of the Q and P coordinate of mode k.
[[nodiscard]] inline Eigen::Index q_index(Eigen::Index k) noexcept { return k; }
[[nodiscard]] inline Eigen::Index p_index(Eigen::Index n, Eigen::Index k) noexcept {
    return n + k;
}

} // namespace gaussfisher
