#pragma once

#include "gaussfisher/types.hpp"

#include <cstdint>

namespace gaussfisher {

/// The canonical form ω = [[0, I_n], [-I_n, 0]] for the ordering
/// (Q_1..Q_n, P_1..P_n). Commutators read [R^i, R^j] = i ω^{ij}.
class SymplecticForm {
  public:
    explicit SymplecticForm(int modes);

    [[nodiscard]] int modes() const noexcept { return n_; }
    [[nodiscard]] const Matrix &matrix() const noexcept { return omega_; }
    /// Ω = ω⁻¹ = -ω.
    [[nodiscard]] Matrix inverse() const { return -omega_; }

  private:
    int n_;
    Matrix omega_;
};

[[nodiscard]] SymplecticForm symplectic_form(int modes);

/// Shorthand for symplectic_form(n).matrix().
[[nodiscard]] Matrix omega_matrix(int modes);

/// Second moments Γ^{ij} = 2 tr[(R^i - d^i)∘(R^j - d^j) ρ], normalized so the
/// vacuum is the identity. Construction only checks shape and finiteness;
/// physical validity is the job of validate_covariance().
class CovarianceMatrix {
  public:
    explicit CovarianceMatrix(Matrix gamma);

    [[nodiscard]] int modes() const noexcept { return static_cast<int>(gamma_.rows() / 2); }
    [[nodiscard]] const Matrix &matrix() const noexcept { return gamma_; }

  private:
    Matrix gamma_;
};

struct CovarianceDiagnostics {
    bool valid = false;
    bool positive_definite = false;
    double nu_min = 0.0;
    double asymmetry = 0.0; ///< max |Γ - Γᵀ|
};

/// True iff Γ is symmetric within `tol` and every symplectic eigenvalue is at
/// least 1 - tol. `expected_modes` (if > 0) must match Γ.
[[nodiscard]] CovarianceDiagnostics validate_covariance(const CovarianceMatrix &gamma,
                                                        double tol = 1e-9,
                                                        int expected_modes = 0);

/// Symplectic eigenvalues of a positive definite Γ, sorted descending.
[[nodiscard]] Vector symplectic_eigenvalues(const Matrix &gamma);

/// Γ = S · diag(ν, ν) · Sᵀ with S symplectic.
struct WilliamsonDecomposition {
    Matrix S;
    Vector nu; ///< descending

    [[nodiscard]] int modes() const noexcept { return static_cast<int>(nu.size()); }
    /// diag(ν_1..ν_n, ν_1..ν_n)
    [[nodiscard]] Matrix thermal() const;
    [[nodiscard]] Matrix reconstruct() const;
};

/// Williamson normal form. Reconstruction and symplecticity are checked
/// relative to the scale of Γ; one refinement pass is applied if needed.
/// Throws DomainError for invalid Γ, ConvergenceError if the tolerance is
/// missed after refinement.
[[nodiscard]] WilliamsonDecomposition williamson(const CovarianceMatrix &gamma, double tol = 1e-9);

/// Same, for a raw positive definite matrix (no uncertainty-relation check).
/// Used for quadratic forms such as the SLD matrix.
[[nodiscard]] WilliamsonDecomposition williamson_positive(const Matrix &m, double tol = 1e-9);

/// ‖S ω Sᵀ - ω‖ (max norm).
[[nodiscard]] double symplectic_defect(const Matrix &S);

[[nodiscard]] bool is_symplectic(const Matrix &S, double tol = 1e-10);

/// Inverse of a symplectic matrix, S⁻¹ = -ω Sᵀ ω (exact, no factorization).
[[nodiscard]] Matrix symplectic_inverse(const Matrix &S);

/// Passive (orthogonal symplectic) matrix [[X, -Y], [Y, X]] for the unitary
/// u = X + iY acting on annihilation operators, a -> u a.
[[nodiscard]] Matrix passive_from_unitary(const CMatrix &u);

/// Inverse of passive_from_unitary.
[[nodiscard]] CMatrix unitary_from_passive(const Matrix &O);

/// Result of diagonalizing a symmetric Hamiltonian matrix W (Wω + ωW = 0):
/// O orthogonal symplectic with O W Oᵀ = diag(μ, -μ), μ ≥ 0 descending.
struct HamiltonianDiagonalization {
    Matrix O;
    Vector mu;
};

/// Throws DomainError if W is not symmetric or does not anticommute with ω
/// within `tol` (relative to ‖W‖).
[[nodiscard]] HamiltonianDiagonalization diagonalize_symmetric_hamiltonian(const Matrix &W,
                                                                           double tol = 1e-9);

/// Euler (Bloch–Messiah) factorization S = O1 · diag(e^z, e^-z) · O2.
struct EulerDecomposition {
    Matrix O1;
    Vector z; ///< squeezing exponents, ≥ 0
    Matrix O2;
};

[[nodiscard]] EulerDecomposition euler_decomposition(const Matrix &S, double tol = 1e-9);

/// Seeded random symplectic matrix O1 · diag(e^z, e^-z) · O2 with Haar
/// distributed passive parts and z_k uniform in [-squeeze_cap, squeeze_cap].
[[nodiscard]] Matrix random_symplectic(int modes, std::uint64_t seed, double squeeze_cap);

/// Block direct sum of two phase-space matrices, respecting the (Q.., P..)
/// ordering: the result acts on (Q_a, Q_b, P_a, P_b).
[[nodiscard]] Matrix phase_space_direct_sum(const Matrix &a, const Matrix &b);
[[nodiscard]] Vector phase_space_direct_sum(const Vector &a, const Vector &b);

} // namespace gaussfisher
