#pragma once

#include "gaussfisher/models.hpp"
#include "gaussfisher/sld.hpp"
#include "gaussfisher/types.hpp"

#include <optional>

namespace gaussfisher {

/// Density matrix of an n ≤ 2 mode Gaussian state in the Fock basis with D
/// levels per mode. Basis index = m_0 + D·m_1.
struct TruncatedState {
    int n = 0;
    int cutoff = 0;
    CMatrix rho;
    double tail_mass = 0.0; ///< 1 - tr ρ; never renormalized away
};

inline constexpr double kDefaultMaxTail = 1e-3;

/// ρ = W(d) U_S ρ_th(ν) U_S† W(d)† with U_S assembled from the Euler factors
/// of the Williamson frame. Throws PreconditionError("cutoff") when D < 8 or
/// the tail exceeds `max_tail`, DomainError for n > 2.
[[nodiscard]] TruncatedState build_state(const GaussianModelPoint &point, int cutoff,
                                         double max_tail = kDefaultMaxTail);
[[nodiscard]] TruncatedState build_state(const Vector &d, const CovarianceMatrix &gamma, int cutoff,
                                         double max_tail = kDefaultMaxTail);

/// Cutoff heuristic: 10 + 8·max_k ⟨N_k⟩, at least 8.
[[nodiscard]] int suggested_cutoff(const GaussianModelPoint &point);

struct FockQFI {
    double qfi = 0.0;
    double richardson_shift = 0.0; ///< |I(h) - I(h, h/2 extrapolated)|
    double excluded_weight = 0.0;  ///< Σ|∂ρ_mn|² over dropped population pairs
    double tail_mass = 0.0;
    int cutoff = 0;
    std::optional<double> probe_shift; ///< |I(D+10) - I(D)| when requested
};

inline constexpr double kDefaultOracleStep = 1e-4;

/// I_Q = Σ 2|∂ρ_mn|²/(p_m + p_n) in the eigenbasis of ρ(θ), with ∂ρ from a
/// Richardson-extrapolated central difference.
[[nodiscard]] FockQFI qfi_fock(const ModelFamily &family, double theta, int cutoff,
                               double h = kDefaultOracleStep, bool probe = false);

/// Matrix of Σ L_ij R̂ⁱ∘R̂ʲ + Σ b_i R̂ⁱ + c with R̂ = R - d, compressed to the
/// truncated basis.
[[nodiscard]] CMatrix sld_operator(const SLDCoefficients &coeffs, const Vector &d, int n, int cutoff);

struct SLDCheck {
    double residual = 0.0;       ///< ‖∂ρ - ½(ρL̂ + L̂ρ)‖₁
    double mean = 0.0;           ///< tr[ρL̂]
    double second_moment = 0.0;  ///< tr[ρL̂²]
};

[[nodiscard]] SLDCheck sld_check(const ModelFamily &family, double theta, const SLDCoefficients &coeffs,
                                 int cutoff, double h = kDefaultOracleStep);

[[nodiscard]] double sld_residual(const ModelFamily &family, double theta, const SLDCoefficients &coeffs,
                                  int cutoff, double h = kDefaultOracleStep);

struct IdentityReport {
    double mean_error = 0.0;         ///< max |tr[ρR] - d|
    double covariance_error = 0.0;   ///< max |2 tr[ρ R̂∘R̂] - Γ|
    double characteristic_error = 0.0;
    double fourth_moment_error = 0.0;
    double inverse_derivative_error = 0.0; ///< ‖∂Γ + D_Γ(∂Γ⁻¹) + ω∂Γ⁻¹ωᵀ‖
    double tail_mass = 0.0;
    int cutoff = 0;
};

/// ξ samples for the characteristic function have |ξ| ≤ xi_max and come from
/// a fixed seed.
[[nodiscard]] IdentityReport identity_checks(const GaussianModelPoint &point, int cutoff,
                                             double xi_max = 2.0, int samples = 12);

} // namespace gaussfisher
