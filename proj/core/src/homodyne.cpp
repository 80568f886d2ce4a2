#include "gaussfisher/homodyne.hpp"

#include "gaussfisher/errors.hpp"
#include "gaussfisher/symplectic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gaussfisher {

namespace {

double max_abs(const Matrix &m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

} // namespace

IsothermalFrame isothermal_frame(const GaussianModelPoint &point, double tol) {
    const auto check = check_isothermal(point, tol);
    if (!check.is_isothermal) {
        throw PreconditionError("is_isothermal", "isothermal_frame: symplectic eigenvalues are not all equal");
    }
    if (!check.derivative_preserves_nu) {
        throw PreconditionError("derivative_preserves_nu",
                                "isothermal_frame: the θ-derivative changes the symplectic eigenvalue");
    }
    if (max_abs(point.dd) > tol * std::max(1.0, max_abs(point.d))) {
        throw PreconditionError("fixed_first_moments", "isothermal_frame: requires ∂d = 0");
    }

    const int n = point.n;
    const auto w = williamson(point.gamma);
    const Matrix Sinv = symplectic_inverse(w.S);
    const Matrix omega = omega_matrix(n);
    Matrix W = Sinv * point.dgamma * Sinv.transpose();
    W = 0.5 * (W + W.transpose());
    // Project onto the Hamiltonian part (W = ωWω) to remove round-off.
    W = 0.5 * (W + omega * W * omega);

    const auto hd = diagonalize_symmetric_hamiltonian(W, std::max(tol, 1e-9));
    IsothermalFrame frame;
    frame.nu = check.nu;
    frame.T = hd.O * Sinv;
    frame.lambda = hd.mu / check.nu;
    return frame;
}

double optimal_homodyne_fisher(const IsothermalFrame &frame) { return 0.5 * frame.lambda.squaredNorm(); }

double homodyne_fisher(const IsothermalFrame &frame, const Matrix &U) {
    const int n = frame.modes();
    if (U.rows() != 2 * n || U.cols() != 2 * n) {
        throw DimensionError("homodyne_fisher: U must be " + std::to_string(2 * n) + "x" + std::to_string(2 * n));
    }
    const double s_scale = std::max(1.0, max_abs(U) * max_abs(U));
    if (symplectic_defect(U) > 1e-10 * s_scale) {
        throw DomainError("homodyne_fisher: U is not symplectic");
    }
    const Matrix a = U.topLeftCorner(n, n);
    const Matrix b = U.topRightCorner(n, n);
    const Matrix abt = a * b.transpose();
    if (max_abs(abt - abt.transpose()) > 1e-10 * s_scale) {
        throw DomainError("homodyne_fisher: a·bᵀ is not symmetric");
    }

    const auto lam = frame.lambda.asDiagonal();
    const Matrix g = frame.nu * (a * a.transpose() + b * b.transpose());
    const Matrix dg = frame.nu * (a * lam * a.transpose() - b * lam * b.transpose());
    Eigen::LLT<Matrix> llt(g);
    if (llt.info() != Eigen::Success) {
        throw DomainError("homodyne_fisher: marginal covariance is singular");
    }
    const Matrix A = llt.solve(dg);
    return 0.5 * (A * A).trace();
}

HomodynePlan homodyne_plan(const Vector &alpha) {
    if (alpha.size() == 0 || alpha.size() % 2 != 0) {
        throw DimensionError("homodyne_plan: α must have even length");
    }
    if (alpha.isZero(0.0)) {
        throw DomainError("homodyne_plan: α must be nonzero");
    }
    const Eigen::Index n = alpha.size() / 2;
    HomodynePlan plan;
    plan.alpha = alpha;
    plan.V = Matrix::Zero(2 * n, 2 * n);
    plan.g.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double aq = alpha(k);
        const double ap = alpha(n + k);
        const double r = std::hypot(aq, ap);
        const double c = r > 0.0 ? aq / r : 1.0;
        const double s = r > 0.0 ? ap / r : 0.0;
        plan.V(k, k) = c;
        plan.V(k, n + k) = s;
        plan.V(n + k, k) = -s;
        plan.V(n + k, n + k) = c;
        plan.g(k) = c * aq + s * ap;
    }
    return plan;
}

GaussianModelPoint ancilla_extend(const GaussianModelPoint &point, const CovarianceMatrix &ancilla) {
    const auto diag = validate_covariance(ancilla);
    if (!diag.valid) {
        throw DomainError("ancilla_extend: invalid ancilla covariance");
    }
    const int m = ancilla.modes();
    const Vector zero = Vector::Zero(2 * m);
    const Matrix zero_m = Matrix::Zero(2 * m, 2 * m);
    return make_model_point(phase_space_direct_sum(point.d, zero),
                            phase_space_direct_sum(point.Gamma(), ancilla.matrix()),
                            phase_space_direct_sum(point.dd, zero),
                            phase_space_direct_sum(point.dgamma, zero_m));
}

} // namespace gaussfisher
