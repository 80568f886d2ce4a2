#include "gaussfisher/models.hpp"

#include "gaussfisher/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace gaussfisher {

namespace {

double max_abs(const Matrix &m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

std::map<std::string, double> with_defaults(const std::string &family,
                                            const std::map<std::string, double> &given,
                                            const std::map<std::string, double> &defaults,
                                            const std::set<std::string> &required) {
    std::map<std::string, double> out = defaults;
    for (const auto &[key, value] : given) {
        if (!defaults.contains(key) && !required.contains(key)) {
            throw ConfigError("family '" + family + "' has no parameter '" + key + "'");
        }
        if (!std::isfinite(value)) {
            throw DomainError("family '" + family + "': parameter '" + key + "' is not finite");
        }
        out[key] = value;
    }
    for (const auto &key : required) {
        if (!out.contains(key)) {
            throw ConfigError("family '" + family + "' requires parameter '" + key + "'");
        }
    }
    return out;
}

void require_nu(const std::string &family, double nu) {
    if (nu < 1.0) {
        throw DomainError("family '" + family + "': nu = " + std::to_string(nu) +
                          " violates the uncertainty relation (nu >= 1)");
    }
}

DomainCheck everywhere(double) { return {}; }

// Γ(θ) = R(θ) Z R(θ)ᵀ for a fixed Z and a rotation of mode 0.
GaussianMoments rotated(const Matrix &Z, double theta) {
    const int n = static_cast<int>(Z.rows() / 2);
    const Matrix R = mode_rotation(n, 0, theta);
    return {Vector::Zero(2 * n), R * Z * R.transpose()};
}

GaussianMoments rotated_derivative(const Matrix &Z, double theta) {
    const int n = static_cast<int>(Z.rows() / 2);
    const Matrix R = mode_rotation(n, 0, theta);
    const Matrix dR = mode_rotation_derivative(n, 0, theta);
    const Matrix RZdR = R * Z * dR.transpose();
    return {Vector::Zero(2 * n), RZdR + RZdR.transpose()};
}

} // namespace

GaussianModelPoint make_model_point(Vector d, Matrix gamma, Vector dd, Matrix dgamma, double tol) {
    CovarianceMatrix cov(std::move(gamma));
    const int n = cov.modes();
    const Eigen::Index dim = 2 * n;
    if (d.size() != dim || dd.size() != dim) {
        throw DimensionError("model point: d and ∂d must have length " + std::to_string(dim));
    }
    if (dgamma.rows() != dim || dgamma.cols() != dim) {
        throw DimensionError("model point: ∂Γ must be " + std::to_string(dim) + "x" + std::to_string(dim));
    }
    if (!d.allFinite() || !dd.allFinite() || !dgamma.allFinite()) {
        throw DomainError("model point: non-finite entries");
    }
    const double asym = max_abs(dgamma - dgamma.transpose());
    if (asym > tol * std::max(1.0, max_abs(dgamma))) {
        throw DomainError("model point: ∂Γ is not symmetric (asymmetry " + std::to_string(asym) + ")");
    }
    const auto diag = validate_covariance(cov, tol);
    if (!diag.valid) {
        std::ostringstream msg;
        msg << "model point: Γ is not a valid covariance matrix (nu_min = " << diag.nu_min
            << ", asymmetry = " << diag.asymmetry << ")";
        throw DomainError(msg.str());
    }
    GaussianModelPoint p;
    p.n = n;
    p.d = std::move(d);
    p.gamma = CovarianceMatrix(0.5 * (cov.matrix() + cov.matrix().transpose()));
    p.dd = std::move(dd);
    p.dgamma = 0.5 * (dgamma + dgamma.transpose());
    return p;
}

ModelFamily::ModelFamily(std::string name, std::map<std::string, double> params, int modes,
                         MomentsFn moments, DerivativeFn derivative, DomainFn domain)
    : name_(std::move(name)), params_(std::move(params)), modes_(modes), moments_(std::move(moments)),
      derivative_(std::move(derivative)), domain_(domain ? std::move(domain) : DomainFn(everywhere)) {
    if (modes_ < 1 || !moments_) {
        throw ConfigError("ModelFamily: needs a positive mode count and a moments function");
    }
    if (!derivative_) {
        mode_ = DerivativeMode::FiniteDifference;
    }
}

ModelFamily ModelFamily::with_finite_difference(double h) const {
    if (h < 0.0 || !std::isfinite(h)) {
        throw DomainError("finite-difference step must be finite and non-negative");
    }
    ModelFamily copy = *this;
    copy.mode_ = DerivativeMode::FiniteDifference;
    copy.fd_step_ = h;
    return copy;
}

ModelFamily ModelFamily::with_analytic_derivative() const {
    if (!derivative_) {
        throw ConfigError("family '" + name_ + "' has no analytic derivative");
    }
    ModelFamily copy = *this;
    copy.mode_ = DerivativeMode::Analytic;
    return copy;
}

GaussianMoments ModelFamily::moments(double theta) const {
    const auto check = domain_(theta);
    if (check.status == DomainStatus::Outside) {
        throw DomainError("family '" + name_ + "' at theta = " + std::to_string(theta) + ": " + check.message);
    }
    return moments_(theta);
}

GaussianModelPoint ModelFamily::evaluate(double theta) const {
    if (mode_ == DerivativeMode::FiniteDifference) {
        const double h = fd_step_ > 0.0 ? fd_step_ : default_fd_step(theta);
        return finite_difference_point(*this, theta, h);
    }
    GaussianMoments m = moments(theta);
    GaussianMoments dm = derivative_(theta);
    return make_model_point(std::move(m.d), std::move(m.gamma), std::move(dm.d), std::move(dm.gamma));
}

double default_fd_step(double theta) { return 1e-5 * std::max(1.0, std::abs(theta)); }

GaussianModelPoint finite_difference_point(const ModelFamily &family, double theta, double h) {
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw DomainError("finite_difference_point: step must be positive");
    }
    for (double t : {theta - h, theta + h}) {
        const auto check = family.check_domain(t);
        if (check.status == DomainStatus::Outside) {
            throw DomainError("finite_difference_point: theta ± h leaves the domain of '" + family.name() +
                              "' (" + check.message + ")");
        }
    }
    const GaussianMoments plus = family.moments(theta + h);
    const GaussianMoments minus = family.moments(theta - h);
    GaussianMoments centre = family.moments(theta);
    Vector dd = (plus.d - minus.d) / (2.0 * h);
    Matrix dg = (plus.gamma - minus.gamma) / (2.0 * h);
    dg = 0.5 * (dg + dg.transpose());
    return make_model_point(std::move(centre.d), std::move(centre.gamma), std::move(dd), std::move(dg));
}

Matrix mode_rotation(int modes, int k, double theta) {
    Matrix R = Matrix::Identity(2 * modes, 2 * modes);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    R(k, k) = c;
    R(k, modes + k) = -s;
    R(modes + k, k) = s;
    R(modes + k, modes + k) = c;
    return R;
}

Matrix mode_rotation_derivative(int modes, int k, double theta) {
    Matrix R = Matrix::Zero(2 * modes, 2 * modes);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    R(k, k) = -s;
    R(k, modes + k) = -c;
    R(modes + k, k) = c;
    R(modes + k, modes + k) = -s;
    return R;
}

std::vector<std::string> builtin_family_names() {
    return {"displacement", "thermal", "squeezing", "phase_squeezed", "two_mode_squeezed_phase"};
}

ModelFamily builtin_family(const std::string &name, const std::map<std::string, double> &params) {
    if (name == "displacement") {
        auto p = with_defaults(name, params, {}, {});
        return ModelFamily(
            name, p, 1,
            [](double theta) {
                Vector d(2);
                d << theta, 0.0;
                return GaussianMoments{d, Matrix::Identity(2, 2)};
            },
            [](double) {
                Vector dd(2);
                dd << 1.0, 0.0;
                return GaussianMoments{dd, Matrix::Zero(2, 2)};
            },
            everywhere);
    }
    if (name == "thermal") {
        auto p = with_defaults(name, params, {}, {});
        return ModelFamily(
            name, p, 1,
            [](double theta) { return GaussianMoments{Vector::Zero(2), theta * Matrix::Identity(2, 2)}; },
            [](double) { return GaussianMoments{Vector::Zero(2), Matrix::Identity(2, 2)}; },
            [](double theta) -> DomainCheck {
                if (!(theta >= 1.0)) {
                    return {DomainStatus::Outside, "thermal requires nu = theta >= 1"};
                }
                if (theta - 1.0 < 1e-9) {
                    return {DomainStatus::NearSingular, "thermal at nu = 1 is the vacuum (singular D_Gamma)"};
                }
                return {};
            });
    }
    if (name == "squeezing") {
        auto p = with_defaults(name, params, {{"nu", 1.0}}, {});
        const double nu = p.at("nu");
        require_nu(name, nu);
        return ModelFamily(
            name, p, 1,
            [nu](double theta) {
                Matrix g = Matrix::Zero(2, 2);
                g(0, 0) = nu * std::exp(2.0 * theta);
                g(1, 1) = nu * std::exp(-2.0 * theta);
                return GaussianMoments{Vector::Zero(2), g};
            },
            [nu](double theta) {
                Matrix g = Matrix::Zero(2, 2);
                g(0, 0) = 2.0 * nu * std::exp(2.0 * theta);
                g(1, 1) = -2.0 * nu * std::exp(-2.0 * theta);
                return GaussianMoments{Vector::Zero(2), g};
            },
            everywhere);
    }
    if (name == "phase_squeezed") {
        auto p = with_defaults(name, params, {{"nu", 1.0}}, {"r"});
        const double nu = p.at("nu");
        const double r = p.at("r");
        require_nu(name, nu);
        Matrix Z = Matrix::Zero(2, 2);
        Z(0, 0) = nu * std::exp(2.0 * r);
        Z(1, 1) = nu * std::exp(-2.0 * r);
        return ModelFamily(
            name, p, 1, [Z](double theta) { return rotated(Z, theta); },
            [Z](double theta) { return rotated_derivative(Z, theta); }, everywhere);
    }
    if (name == "two_mode_squeezed_phase") {
        auto p = with_defaults(name, params, {{"nu", 1.0}}, {"r"});
        const double nu = p.at("nu");
        const double r = p.at("r");
        require_nu(name, nu);
        const double c = std::cosh(2.0 * r);
        const double s = std::sinh(2.0 * r);
        // (Q1, Q2, P1, P2): Γ_qq = [[c, s], [s, c]], Γ_pp = [[c, -s], [-s, c]]
        Matrix Z = Matrix::Zero(4, 4);
        Z(0, 0) = Z(1, 1) = Z(2, 2) = Z(3, 3) = c;
        Z(0, 1) = Z(1, 0) = s;
        Z(2, 3) = Z(3, 2) = -s;
        Z *= nu;
        return ModelFamily(
            name, p, 2, [Z](double theta) { return rotated(Z, theta); },
            [Z](double theta) { return rotated_derivative(Z, theta); }, everywhere);
    }
    std::string known;
    for (const auto &n : builtin_family_names()) {
        known += (known.empty() ? "" : ", ") + n;
    }
    throw ConfigError("unknown model family '" + name + "' (known: " + known + ")");
}

ModelFamily tangent_family(const GaussianModelPoint &point) {
    const GaussianModelPoint p = point;
    return ModelFamily(
        "explicit", {}, p.n,
        [p](double theta) { return GaussianMoments{p.d + theta * p.dd, p.Gamma() + theta * p.dgamma}; },
        [p](double) { return GaussianMoments{p.dd, p.dgamma}; },
        [p](double theta) -> DomainCheck {
            if (theta == 0.0) {
                return {};
            }
            const auto diag = validate_covariance(CovarianceMatrix(p.Gamma() + theta * p.dgamma));
            if (!diag.valid) {
                return {DomainStatus::Outside, "the tangent line leaves the physical region (nu_min = " +
                                                   std::to_string(diag.nu_min) + ")"};
            }
            return {};
        });
}

IsothermalCheck check_isothermal(const GaussianModelPoint &point, double tol) {
    IsothermalCheck out;
    const Matrix &g = point.Gamma();
    const auto w = williamson(point.gamma);
    out.nu = w.nu(0);
    const Matrix omega = omega_matrix(point.n);
    const Matrix gw = g * omega;
    const Eigen::Index dim = g.rows();
    const double scale = std::max(1.0, max_abs(g) * max_abs(g));
    out.isothermal_defect = max_abs(gw * gw + out.nu * out.nu * Matrix::Identity(dim, dim)) / scale;
    out.is_isothermal = out.isothermal_defect < tol;

    const Matrix Sinv = symplectic_inverse(w.S);
    const Matrix W = Sinv * point.dgamma * Sinv.transpose();
    out.hamiltonian_defect = max_abs(W * omega + omega * W) / std::max(1.0, max_abs(W));
    out.derivative_preserves_nu = out.is_isothermal && out.hamiltonian_defect < tol;
    return out;
}

GaussianModelPoint permute_modes(const GaussianModelPoint &point, const std::vector<int> &perm) {
    const int n = point.n;
    if (static_cast<int>(perm.size()) != n) {
        throw DimensionError("permute_modes: permutation length must equal the mode count");
    }
    Matrix P = Matrix::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        P(i, perm[static_cast<std::size_t>(i)]) = 1.0;
        P(n + i, n + perm[static_cast<std::size_t>(i)]) = 1.0;
    }
    return transform_point(point, P);
}

GaussianModelPoint transform_point(const GaussianModelPoint &point, const Matrix &S) {
    return make_model_point(S * point.d, S * point.Gamma() * S.transpose(), S * point.dd,
                            S * point.dgamma * S.transpose());
}

} // namespace gaussfisher
