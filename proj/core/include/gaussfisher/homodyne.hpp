#pragma once

#include "gaussfisher/models.hpp"
#include "gaussfisher/types.hpp"

namespace gaussfisher {

/// Canonical coordinates R̃ = T R of an isothermal model with fixed first
/// moments: TΓTᵀ = ν·I and T∂ΓTᵀ = diag(νλ, -νλ), λ ≥ 0 descending.
struct IsothermalFrame {
    Matrix T;
    Vector lambda;
    double nu = 1.0;

    [[nodiscard]] int modes() const noexcept { return static_cast<int>(lambda.size()); }
};

/// Throws PreconditionError("is_isothermal" | "derivative_preserves_nu" |
/// "fixed_first_moments").
[[nodiscard]] IsothermalFrame isothermal_frame(const GaussianModelPoint &point, double tol = 1e-9);

/// ½ Σ λ_k².
[[nodiscard]] double optimal_homodyne_fisher(const IsothermalFrame &frame);

/// Fisher information of homodyning the Q quadratures of U R̃. Only the top
/// blocks (a b) of U are used; U must be symplectic and abᵀ symmetric.
[[nodiscard]] double homodyne_fisher(const IsothermalFrame &frame, const Matrix &U);

/// Passive network V and gains g so that αᵀR = Σ_k g_k (VR)_{q,k}.
struct HomodynePlan {
    Matrix V;
    Vector g;
    Vector alpha;
};

[[nodiscard]] HomodynePlan homodyne_plan(const Vector &alpha);

/// (d ⊕ 0, Γ ⊕ γ, ∂d ⊕ 0, ∂Γ ⊕ 0).
[[nodiscard]] GaussianModelPoint ancilla_extend(const GaussianModelPoint &point,
                                                const CovarianceMatrix &ancilla);

} // namespace gaussfisher
