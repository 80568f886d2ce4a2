#pragma once

#include "gaussfisher/dgamma.hpp"
#include "gaussfisher/models.hpp"
#include "gaussfisher/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gaussfisher {

/// SLD in centered form
///   𝓛 = Σ L_ij (R^i - d^i)∘(R^j - d^j) + Σ b_i (R^i - d^i) + c,   c = -½ tr[L Γ].
struct SLDCoefficients {
    Matrix L;
    Vector b;
    double c = 0.0;
    double range_residual = 0.0;
    bool range_ok = true;
};

/// Uncentered form 𝓛 = L0 + L1·R + Σ L2_ij R^i∘R^j.
struct UncenteredSLD {
    double L0 = 0.0;
    Vector L1;
    Matrix L2;
};

[[nodiscard]] UncenteredSLD to_uncentered(const SLDCoefficients &coeffs, const Vector &d);
[[nodiscard]] SLDCoefficients from_uncentered(const UncenteredSLD &sld, const Vector &d);

/// b = 2Γ⁻¹∂d, L = D_Γ⁻(∂Γ), c = -½tr[LΓ].
[[nodiscard]] SLDCoefficients sld_coefficients(const GaussianModelPoint &point,
                                               double tol = kDefaultKernelTol);

enum class FisherMethod { General, Isothermal };

[[nodiscard]] const char *to_string(FisherMethod m) noexcept;

struct FisherReport {
    double qfi = 0.0;
    double wigner_fisher = 0.0;
    double first_moment_term = 0.0;
    double second_moment_term = 0.0;
    double wigner_second_moment_term = 0.0;
    double range_residual = 0.0;
    FisherMethod method = FisherMethod::General;
    std::vector<std::string> warnings; ///< e.g. "kernel-overlap"

    [[nodiscard]] double ratio() const { return wigner_fisher > 0.0 ? qfi / wigner_fisher : 0.0; }
};

/// Classical Fisher information of a Gaussian distribution with covariance
/// `cov`/2 convention: ½tr[(cov⁻¹∂cov)²] + 2∂meanᵀcov⁻¹∂mean. Any dimension.
[[nodiscard]] double gaussian_fisher(const Matrix &cov, const Matrix &dcov, const Vector &dmean);

/// The Wigner-distribution Fisher information (classical limit of the QFI).
[[nodiscard]] double wigner_fisher(const GaussianModelPoint &point);

/// I_Q = ½ tr[∂Γ D_Γ⁻(∂Γ)] + 2∂dᵀΓ⁻¹∂d.
[[nodiscard]] FisherReport qfi_general(const GaussianModelPoint &point, double tol = kDefaultKernelTol);

/// I_Q = ½ ν²/(1+ν²) tr[(∂ΓΓ⁻¹)²] + 2∂dᵀΓ⁻¹∂d. Requires both isothermal
/// flags; throws PreconditionError naming the failing one.
[[nodiscard]] FisherReport qfi_isothermal(const GaussianModelPoint &point, double tol = 1e-9);

/// Isothermal path when eligible, general otherwise.
[[nodiscard]] FisherReport evaluate_fisher(const GaussianModelPoint &point, double tol = kDefaultKernelTol);

/// 𝓛 = Σ_k 2α_k (N_k - ⟨N_k⟩) in the modes R̃ = T(R - centre), where
/// L = Tᵀ diag(α, α) T and N_k = ½(Q̃_k² + P̃_k² - 1).
struct PhotonCountingForm {
    Matrix T;
    Vector alpha;
    Vector mean_photon;
    Vector centre; ///< d - ½L⁻¹b
};

struct PhotonCountingResult {
    std::optional<PhotonCountingForm> form;
    std::string reason; ///< why the form is absent
};

/// Exists when ∂(Γ⁻¹) is semidefinite (either sign) and L is nonsingular.
[[nodiscard]] PhotonCountingResult photon_counting_form(const SLDCoefficients &coeffs,
                                                        const GaussianModelPoint &point,
                                                        double tol = 1e-9);

} // namespace gaussfisher
