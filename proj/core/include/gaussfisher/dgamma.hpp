#pragma once

#include "gaussfisher/symplectic.hpp"
#include "gaussfisher/types.hpp"

#include <vector>

namespace gaussfisher {

/// D_Γ(Y) = Γ Y Γᵀ - ω Y ωᵀ.
[[nodiscard]] Matrix apply_dgamma(const Matrix &gamma, const Matrix &Y);
[[nodiscard]] Matrix apply_dgamma(const CovarianceMatrix &gamma, const Matrix &Y);

/// Member of the 2×2 block basis used in the Williamson frame.
enum class BlockBasis { Identity, Omega, SigmaX, SigmaZ };

[[nodiscard]] Eigen::Matrix2d block_basis_matrix(BlockBasis e);

/// One eigenpair of D_Γ expressed in the Williamson frame.
///
/// With Γ = S Γ_th Sᵀ, D_Γ = (S⊗S) D_{Γ_th} (S⊗S)ᵀ. The thermal map decouples
/// into 2×2 blocks (i, j); on each block {1, ω} have eigenvalue ν_iν_j - 1
/// (parity +1) and {σ_x, σ_z} have ν_iν_j + 1 (parity -1). Writing E for the
/// normalized basis matrix placed in block (i, j):
///   image  = S E Sᵀ          (D_Γ = Σ λ |image)(image|)
///   dual   = S⁻ᵀ E S⁻¹       (D_Γ(dual) = λ · image, (dual|image') = δ)
struct DGammaEigenpair {
    double value;
    int row_mode;
    int col_mode;
    int parity; ///< +1 or -1
    BlockBasis basis;
    bool in_kernel;
};

struct DGammaSpectrum {
    WilliamsonDecomposition frame;
    std::vector<DGammaEigenpair> eigenpairs; ///< (2n)² entries
    int kernel_dimension = 0;
    double kernel_threshold = 0.0;

    [[nodiscard]] int modes() const noexcept { return frame.modes(); }
    /// Eigenvalues sorted ascending.
    [[nodiscard]] std::vector<double> eigenvalues() const;
    /// Normalized E placed in block (row_mode, col_mode) of a 2n×2n zero matrix.
    [[nodiscard]] Matrix frame_basis(const DGammaEigenpair &p) const;
    [[nodiscard]] Matrix image_vector(const DGammaEigenpair &p) const;
    [[nodiscard]] Matrix dual_vector(const DGammaEigenpair &p) const;
    /// Projector onto range(D_Γ) along the kernel, P = D_Γ D_Γ⁻.
    [[nodiscard]] Matrix project_range(const Matrix &X) const;
};

/// Default relative kernel tolerance: |λ| < tol·(1 + ν_max²) counts as zero.
inline constexpr double kDefaultKernelTol = 1e-9;

[[nodiscard]] DGammaSpectrum dgamma_spectrum(const CovarianceMatrix &gamma,
                                             double tol = kDefaultKernelTol);

struct PseudoinverseResult {
    Matrix Y;
    double residual = 0.0; ///< ‖D_Γ(Y) - X‖_F
    bool range_ok = true;  ///< residual ≤ tol·max(1, ‖X‖_F)
};

/// Y = D_Γ⁻(X) from the Williamson-frame spectral decomposition, zeroing the
/// kernel components. The residual flags X escaping the range.
[[nodiscard]] PseudoinverseResult dgamma_pseudoinverse_apply(const CovarianceMatrix &gamma,
                                                             const Matrix &X,
                                                             double tol = kDefaultKernelTol);

/// Same, reusing a precomputed spectrum.
[[nodiscard]] PseudoinverseResult dgamma_pseudoinverse_apply(const DGammaSpectrum &spectrum,
                                                             const CovarianceMatrix &gamma,
                                                             const Matrix &X);

/// Solution of the Stein equation Y - F Y Fᵀ = -∂(Γ⁻¹), F = (ωΓ)⁻¹, as the
/// series -Σ_k F^k ∂(Γ⁻¹) Fᵀ^k. Only defined for ν_min > 1. Throws
/// PreconditionError("nu_min") when ν_min ≤ 1 + tol and ConvergenceError
/// when max_terms is exhausted.
[[nodiscard]] Matrix stein_series_solve(const CovarianceMatrix &gamma, const Matrix &dgamma,
                                        double tol = 1e-14, int max_terms = 100000);

/// ∂(Γ⁻¹) = -Γ⁻¹ ∂Γ Γ⁻¹.
[[nodiscard]] Matrix inverse_derivative(const Matrix &gamma, const Matrix &dgamma);

} // namespace gaussfisher
