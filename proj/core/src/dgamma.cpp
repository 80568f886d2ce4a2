#include "gaussfisher/dgamma.hpp"

#include "gaussfisher/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace gaussfisher {

namespace {

constexpr std::array<BlockBasis, 4> kBlockBases = {BlockBasis::Identity, BlockBasis::Omega,
                                                   BlockBasis::SigmaX, BlockBasis::SigmaZ};

int parity_of(BlockBasis e) {
    return (e == BlockBasis::Identity || e == BlockBasis::Omega) ? +1 : -1;
}

void require_match(const Matrix &gamma, const Matrix &Y, const char *what) {
    if (Y.rows() != gamma.rows() || Y.cols() != gamma.cols()) {
        throw DimensionError(std::string(what) + ": argument is " + std::to_string(Y.rows()) + "x" +
                             std::to_string(Y.cols()) + ", expected " +
                             std::to_string(gamma.rows()) + "x" + std::to_string(gamma.cols()));
    }
}

Eigen::Matrix2d block_of(const Matrix &X, Eigen::Index n, int i, int j) {
    Eigen::Matrix2d b;
    b(0, 0) = X(i, j);
    b(0, 1) = X(i, n + j);
    b(1, 0) = X(n + i, j);
    b(1, 1) = X(n + i, n + j);
    return b;
}

void set_block(Matrix &X, Eigen::Index n, int i, int j, const Eigen::Matrix2d &b) {
    X(i, j) = b(0, 0);
    X(i, n + j) = b(0, 1);
    X(n + i, j) = b(1, 0);
    X(n + i, n + j) = b(1, 1);
}

// Applies f(λ) to the block-basis components of X' = S⁻¹ X S⁻ᵀ.
template <class Scale>
Matrix thermal_frame_map(const DGammaSpectrum &spec, const Matrix &Xp, Scale scale) {
    const int n = spec.modes();
    Matrix out = Matrix::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Eigen::Matrix2d b = block_of(Xp, n, i, j);
            Eigen::Matrix2d acc = Eigen::Matrix2d::Zero();
            for (BlockBasis e : kBlockBases) {
                const Eigen::Matrix2d E = block_basis_matrix(e);
                const double coeff = 0.5 * (E.transpose() * b).trace();
                const double nu_ij = spec.frame.nu(i) * spec.frame.nu(j);
                const double lambda = nu_ij - parity_of(e);
                acc += scale(lambda) * coeff * E;
            }
            set_block(out, n, i, j, acc);
        }
    }
    return out;
}

} // namespace

Matrix apply_dgamma(const Matrix &gamma, const Matrix &Y) {
    require_match(gamma, Y, "apply_dgamma");
    const Matrix omega = omega_matrix(static_cast<int>(gamma.rows() / 2));
    return gamma * Y * gamma.transpose() - omega * Y * omega.transpose();
}

Matrix apply_dgamma(const CovarianceMatrix &gamma, const Matrix &Y) {
    return apply_dgamma(gamma.matrix(), Y);
}

Eigen::Matrix2d block_basis_matrix(BlockBasis e) {
    Eigen::Matrix2d m;
    switch (e) {
    case BlockBasis::Identity:
        m << 1, 0, 0, 1;
        break;
    case BlockBasis::Omega:
        m << 0, 1, -1, 0;
        break;
    case BlockBasis::SigmaX:
        m << 0, 1, 1, 0;
        break;
    case BlockBasis::SigmaZ:
        m << 1, 0, 0, -1;
        break;
    }
    return m;
}

std::vector<double> DGammaSpectrum::eigenvalues() const {
    std::vector<double> out;
    out.reserve(eigenpairs.size());
    for (const auto &p : eigenpairs) {
        out.push_back(p.value);
    }
    std::sort(out.begin(), out.end());
    return out;
}

Matrix DGammaSpectrum::frame_basis(const DGammaEigenpair &p) const {
    const int n = modes();
    Matrix F = Matrix::Zero(2 * n, 2 * n);
    set_block(F, n, p.row_mode, p.col_mode, block_basis_matrix(p.basis) / std::sqrt(2.0));
    return F;
}

Matrix DGammaSpectrum::image_vector(const DGammaEigenpair &p) const {
    return frame.S * frame_basis(p) * frame.S.transpose();
}

Matrix DGammaSpectrum::dual_vector(const DGammaEigenpair &p) const {
    const Matrix Sinv = symplectic_inverse(frame.S);
    return Sinv.transpose() * frame_basis(p) * Sinv;
}

Matrix DGammaSpectrum::project_range(const Matrix &X) const {
    const Matrix &S = frame.S;
    const Matrix Sinv = symplectic_inverse(S);
    const double thr = kernel_threshold;
    const Matrix Xp = Sinv * X * Sinv.transpose();
    const Matrix Pp =
        thermal_frame_map(*this, Xp, [thr](double lambda) { return std::abs(lambda) < thr ? 0.0 : 1.0; });
    return S * Pp * S.transpose();
}

DGammaSpectrum dgamma_spectrum(const CovarianceMatrix &gamma, double tol) {
    DGammaSpectrum spec;
    spec.frame = williamson(gamma);
    const int n = spec.modes();
    const double nu_max = spec.frame.nu.maxCoeff();
    spec.kernel_threshold = tol * (1.0 + nu_max * nu_max);
    spec.eigenpairs.reserve(static_cast<std::size_t>(4 * n * n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double nu_ij = spec.frame.nu(i) * spec.frame.nu(j);
            for (BlockBasis e : kBlockBases) {
                const int parity = parity_of(e);
                const double value = nu_ij - parity;
                const bool zero = std::abs(value) < spec.kernel_threshold;
                spec.eigenpairs.push_back({value, i, j, parity, e, zero});
                spec.kernel_dimension += zero ? 1 : 0;
            }
        }
    }
    return spec;
}

PseudoinverseResult dgamma_pseudoinverse_apply(const DGammaSpectrum &spectrum,
                                               const CovarianceMatrix &gamma, const Matrix &X) {
    require_match(gamma.matrix(), X, "dgamma_pseudoinverse_apply");
    if (spectrum.modes() != gamma.modes()) {
        throw DimensionError("dgamma_pseudoinverse_apply: spectrum and Γ disagree on mode count");
    }
    const Matrix &S = spectrum.frame.S;
    const Matrix Sinv = symplectic_inverse(S);
    const double thr = spectrum.kernel_threshold;

    const Matrix Xp = Sinv * X * Sinv.transpose();
    const Matrix Yp = thermal_frame_map(spectrum, Xp, [thr](double lambda) {
        return std::abs(lambda) < thr ? 0.0 : 1.0 / lambda;
    });
    PseudoinverseResult out;
    out.Y = Sinv.transpose() * Yp * Sinv;
    out.Y = 0.5 * (out.Y + out.Y.transpose());
    out.residual = (apply_dgamma(gamma, out.Y) - X).norm();

    const double s_scale = std::max(1.0, S.cwiseAbs().maxCoeff());
    const double scale = std::max(1.0, X.norm()) * s_scale * s_scale;
    // Kernel thresholds are relative to ν_max²; use the same scale here.
    out.range_ok = out.residual <= spectrum.kernel_threshold * scale;
    return out;
}

PseudoinverseResult dgamma_pseudoinverse_apply(const CovarianceMatrix &gamma, const Matrix &X,
                                               double tol) {
    return dgamma_pseudoinverse_apply(dgamma_spectrum(gamma, tol), gamma, X);
}

Matrix inverse_derivative(const Matrix &gamma, const Matrix &dgamma) {
    require_match(gamma, dgamma, "inverse_derivative");
    const Matrix ginv = gamma.inverse();
    return -ginv * dgamma * ginv;
}

Matrix stein_series_solve(const CovarianceMatrix &gamma, const Matrix &dgamma, double tol,
                          int max_terms) {
    const Matrix &g = gamma.matrix();
    require_match(g, dgamma, "stein_series_solve");
    const auto diag = validate_covariance(gamma);
    if (!diag.valid) {
        throw DomainError("stein_series_solve: invalid covariance matrix");
    }
    if (diag.nu_min <= 1.0 + tol) {
        throw PreconditionError("nu_min", "stein_series_solve: nu_min = " + std::to_string(diag.nu_min) +
                                              " <= 1; the series does not converge for singular states");
    }
    const int n = gamma.modes();
    const Matrix omega = omega_matrix(n);
    const Matrix F = (omega * g).inverse();

    Matrix term = -inverse_derivative(g, dgamma);
    Matrix Y = Matrix::Zero(2 * n, 2 * n);
    int small_in_a_row = 0;
    for (int k = 0; k < max_terms; ++k) {
        Y += term;
        const double tn = term.cwiseAbs().maxCoeff();
        const double yn = std::max(1e-300, Y.cwiseAbs().maxCoeff());
        small_in_a_row = (tn <= tol * yn || tn == 0.0) ? small_in_a_row + 1 : 0;
        if (small_in_a_row >= 2) {
            return 0.5 * (Y + Y.transpose());
        }
        term = F * term * F.transpose();
    }
    throw ConvergenceError("stein_series_solve: max_terms = " + std::to_string(max_terms) + " exceeded");
}

} // namespace gaussfisher
