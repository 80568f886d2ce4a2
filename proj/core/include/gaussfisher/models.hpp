#pragma once

#include "gaussfisher/symplectic.hpp"
#include "gaussfisher/types.hpp"

#include <functional>
#include <map>
#include <string>

namespace gaussfisher {

/// A Gaussian model evaluated at one parameter value: moments and their
/// θ-derivatives.
struct GaussianModelPoint {
    int n = 0;
    Vector d;
    CovarianceMatrix gamma{Matrix::Identity(2, 2)};
    Vector dd;
    Matrix dgamma;

    [[nodiscard]] const Matrix &Gamma() const noexcept { return gamma.matrix(); }
};

/// Checks shapes, finiteness, symmetry of ∂Γ and validity of Γ. Small
/// asymmetries (≤ tol relative) in ∂Γ are symmetrized away.
[[nodiscard]] GaussianModelPoint make_model_point(Vector d, Matrix gamma, Vector dd, Matrix dgamma,
                                                  double tol = 1e-9);

/// Moments only (no derivatives).
struct GaussianMoments {
    Vector d;
    Matrix gamma;
};

enum class DerivativeMode { Analytic, FiniteDifference };

enum class DomainStatus { Ok, NearSingular, Outside };

struct DomainCheck {
    DomainStatus status = DomainStatus::Ok;
    std::string message;
};

/// A one-parameter Gaussian family θ ↦ (d_θ, Γ_θ).
class ModelFamily {
  public:
    using MomentsFn = std::function<GaussianMoments(double)>;
    using DerivativeFn = std::function<GaussianMoments(double)>; ///< (∂d, ∂Γ)
    using DomainFn = std::function<DomainCheck(double)>;

    ModelFamily(std::string name, std::map<std::string, double> params, int modes, MomentsFn moments,
                DerivativeFn derivative, DomainFn domain);

    [[nodiscard]] const std::string &name() const noexcept { return name_; }
    [[nodiscard]] const std::map<std::string, double> &params() const noexcept { return params_; }
    [[nodiscard]] int modes() const noexcept { return modes_; }
    [[nodiscard]] DerivativeMode derivative_mode() const noexcept { return mode_; }
    /// Step used in finite-difference mode; 0 selects the default 1e-5·max(1, |θ|).
    [[nodiscard]] double fd_step() const noexcept { return fd_step_; }
    [[nodiscard]] bool has_analytic_derivative() const noexcept { return static_cast<bool>(derivative_); }

    [[nodiscard]] ModelFamily with_finite_difference(double h = 0.0) const;
    [[nodiscard]] ModelFamily with_analytic_derivative() const;

    [[nodiscard]] DomainCheck check_domain(double theta) const { return domain_(theta); }
    /// Throws DomainError outside the domain.
    [[nodiscard]] GaussianMoments moments(double theta) const;
    /// Full model point using the configured derivative mode.
    [[nodiscard]] GaussianModelPoint evaluate(double theta) const;

  private:
    std::string name_;
    std::map<std::string, double> params_;
    int modes_;
    MomentsFn moments_;
    DerivativeFn derivative_;
    DomainFn domain_;
    DerivativeMode mode_ = DerivativeMode::Analytic;
    double fd_step_ = 0.0;
};

/// Built-in families (all with analytic derivatives):
///   displacement               d = (θ, 0), Γ = I
///   thermal                    Γ = θ·I, θ = ν ≥ 1 (θ = 1 flagged near-singular)
///   squeezing                  Γ = ν·diag(e^{2θ}, e^{-2θ})                     params: nu
///   phase_squeezed             Γ = R(θ)·ν·diag(e^{2r}, e^{-2r})·R(θ)ᵀ          params: r, nu
///   two_mode_squeezed_phase    phase θ on mode 1 of a two-mode squeezed state  params: r, nu
/// Unknown names or parameters throw ConfigError; out-of-domain values throw
/// DomainError.
[[nodiscard]] ModelFamily builtin_family(const std::string &name,
                                         const std::map<std::string, double> &params = {});

[[nodiscard]] std::vector<std::string> builtin_family_names();

/// The straight line θ ↦ (d + θ∂d, Γ + θ∂Γ) through an explicit point at θ = 0.
/// Used to give explicit model points a neighbourhood (oracle checks).
[[nodiscard]] ModelFamily tangent_family(const GaussianModelPoint &point);

[[nodiscard]] double default_fd_step(double theta);

/// Central differences of d and Γ with step h (∂Γ symmetrized).
[[nodiscard]] GaussianModelPoint finite_difference_point(const ModelFamily &family, double theta,
                                                         double h);

struct IsothermalCheck {
    bool is_isothermal = false;
    double nu = 0.0;
    bool derivative_preserves_nu = false;
    double isothermal_defect = 0.0;  ///< ‖(Γω)² + ν²‖ / scale
    double hamiltonian_defect = 0.0; ///< ‖Wω + ωW‖ / scale
};

/// is_isothermal: (Γω)² = -ν² (all symplectic eigenvalues equal).
/// derivative_preserves_nu: W = S⁻¹∂ΓS⁻ᵀ anticommutes with ω, i.e. the
/// θ-variation does not change ν. Only meaningful when is_isothermal holds.
[[nodiscard]] IsothermalCheck check_isothermal(const GaussianModelPoint &point, double tol = 1e-9);

/// Rotation by θ of mode k in the (Q.., P..) ordering and its θ-derivative.
[[nodiscard]] Matrix mode_rotation(int modes, int k, double theta);
[[nodiscard]] Matrix mode_rotation_derivative(int modes, int k, double theta);

/// Relabel modes: new mode i is old mode perm[i].
[[nodiscard]] GaussianModelPoint permute_modes(const GaussianModelPoint &point,
                                               const std::vector<int> &perm);

/// Apply a symplectic S: (Sd, SΓSᵀ, S∂d, S∂ΓSᵀ).
[[nodiscard]] GaussianModelPoint transform_point(const GaussianModelPoint &point, const Matrix &S);

} // namespace gaussfisher
