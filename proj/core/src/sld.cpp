#include "gaussfisher/sld.hpp"

#include "gaussfisher/errors.hpp"

#include <algorithm>
#include <cmath>

namespace gaussfisher {

namespace {

double trace_product(const Matrix &a, const Matrix &b) { return (a.transpose().cwiseProduct(b)).sum(); }

Eigen::LLT<Matrix> checked_llt(const Matrix &m, const char *what) {
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success) {
        throw DomainError(std::string(what) + ": covariance matrix is singular or not positive definite");
    }
    return llt;
}

double first_moment_term(const Matrix &gamma, const Vector &dd) {
    if (dd.size() == 0 || dd.isZero(0.0)) {
        return 0.0;
    }
    const auto llt = checked_llt(gamma, "first_moment_term");
    return 2.0 * dd.dot(llt.solve(dd));
}

} // namespace

const char *to_string(FisherMethod m) noexcept {
    return m == FisherMethod::Isothermal ? "isothermal" : "general";
}

UncenteredSLD to_uncentered(const SLDCoefficients &coeffs, const Vector &d) {
    UncenteredSLD out;
    out.L2 = coeffs.L;
    out.L1 = coeffs.b - 2.0 * coeffs.L * d;
    out.L0 = d.dot(coeffs.L * d) - coeffs.b.dot(d) + coeffs.c;
    return out;
}

SLDCoefficients from_uncentered(const UncenteredSLD &sld, const Vector &d) {
    SLDCoefficients out;
    out.L = sld.L2;
    out.b = sld.L1 + 2.0 * sld.L2 * d;
    out.c = sld.L0 - d.dot(sld.L2 * d) + out.b.dot(d);
    return out;
}

SLDCoefficients sld_coefficients(const GaussianModelPoint &point, double tol) {
    const auto spectrum = dgamma_spectrum(point.gamma, tol);
    const auto pinv = dgamma_pseudoinverse_apply(spectrum, point.gamma, point.dgamma);
    SLDCoefficients out;
    out.L = pinv.Y;
    out.range_residual = pinv.residual;
    out.range_ok = pinv.range_ok;
    if (point.dd.isZero(0.0)) {
        out.b = Vector::Zero(point.dd.size());
    } else {
        out.b = 2.0 * checked_llt(point.Gamma(), "sld_coefficients").solve(point.dd);
    }
    out.c = -0.5 * trace_product(out.L, point.Gamma());
    return out;
}

double gaussian_fisher(const Matrix &cov, const Matrix &dcov, const Vector &dmean) {
    if (cov.rows() != cov.cols() || dcov.rows() != cov.rows() || dcov.cols() != cov.cols() ||
        dmean.size() != cov.rows()) {
        throw DimensionError("gaussian_fisher: inconsistent dimensions");
    }
    const auto llt = checked_llt(cov, "gaussian_fisher");
    const Matrix A = llt.solve(dcov);
    double value = 0.5 * (A * A).trace();
    if (!dmean.isZero(0.0)) {
        value += 2.0 * dmean.dot(llt.solve(dmean));
    }
    return value;
}

double wigner_fisher(const GaussianModelPoint &point) {
    return gaussian_fisher(point.Gamma(), point.dgamma, point.dd);
}

FisherReport qfi_general(const GaussianModelPoint &point, double tol) {
    const auto coeffs = sld_coefficients(point, tol);
    FisherReport r;
    r.method = FisherMethod::General;
    r.second_moment_term = 0.5 * trace_product(point.dgamma, coeffs.L);
    r.first_moment_term = first_moment_term(point.Gamma(), point.dd);
    r.qfi = r.first_moment_term + r.second_moment_term;
    r.wigner_fisher = wigner_fisher(point);
    r.wigner_second_moment_term = r.wigner_fisher - r.first_moment_term;
    r.range_residual = coeffs.range_residual;
    if (!coeffs.range_ok) {
        r.warnings.emplace_back("kernel-overlap");
    }
    return r;
}

FisherReport qfi_isothermal(const GaussianModelPoint &point, double tol) {
    const auto check = check_isothermal(point, tol);
    if (!check.is_isothermal) {
        throw PreconditionError("is_isothermal", "qfi_isothermal: symplectic eigenvalues are not all equal "
                                                 "((Γω)² + ν² defect " +
                                                     std::to_string(check.isothermal_defect) + ")");
    }
    if (!check.derivative_preserves_nu) {
        throw PreconditionError("derivative_preserves_nu",
                                "qfi_isothermal: the θ-derivative changes the symplectic eigenvalue "
                                "(W∘ω defect " +
                                    std::to_string(check.hamiltonian_defect) + ")");
    }
    const double nu2 = check.nu * check.nu;
    FisherReport r;
    r.method = FisherMethod::Isothermal;
    r.first_moment_term = first_moment_term(point.Gamma(), point.dd);
    r.wigner_fisher = wigner_fisher(point);
    r.wigner_second_moment_term = r.wigner_fisher - r.first_moment_term;
    r.second_moment_term = nu2 / (1.0 + nu2) * r.wigner_second_moment_term;
    r.qfi = r.first_moment_term + r.second_moment_term;
    return r;
}

FisherReport evaluate_fisher(const GaussianModelPoint &point, double tol) {
    const auto check = check_isothermal(point, std::max(tol, 1e-9));
    if (check.is_isothermal && check.derivative_preserves_nu) {
        return qfi_isothermal(point, std::max(tol, 1e-9));
    }
    return qfi_general(point, tol);
}

PhotonCountingResult photon_counting_form(const SLDCoefficients &coeffs, const GaussianModelPoint &point,
                                          double tol) {
    PhotonCountingResult out;
    const double l_scale = coeffs.L.size() == 0 ? 0.0 : coeffs.L.cwiseAbs().maxCoeff();
    if (l_scale <= tol) {
        out.reason = "linear model";
        return out;
    }
    if (!coeffs.range_ok) {
        out.reason = "kernel-overlap";
        return out;
    }
    const Matrix dginv = inverse_derivative(point.Gamma(), point.dgamma);
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (dginv + dginv.transpose()), Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    const double scale = std::max(std::abs(lo), std::abs(hi));
    int sign = 0;
    if (hi <= tol * scale) {
        sign = +1; // ∂Γ⁻¹ ⪯ 0 ⇒ L ⪰ 0
    } else if (lo >= -tol * scale) {
        sign = -1;
    } else {
        out.reason = "indefinite";
        return out;
    }

    const Matrix M = sign * 0.5 * (coeffs.L + coeffs.L.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> ms(M, Eigen::EigenvaluesOnly);
    if (ms.eigenvalues().minCoeff() <= tol * l_scale) {
        out.reason = "degenerate quadratic form";
        return out;
    }
    const auto w = williamson_positive(M);
    PhotonCountingForm form;
    form.T = w.S.transpose();
    form.alpha = sign * w.nu;

    const Eigen::LDLT<Matrix> ldlt(coeffs.L);
    const Vector shift = 0.5 * ldlt.solve(coeffs.b);
    form.centre = point.d - shift;

    const int n = point.n;
    const Matrix g = form.T * point.Gamma() * form.T.transpose();
    const Vector m = form.T * shift;
    form.mean_photon.resize(n);
    for (int k = 0; k < n; ++k) {
        form.mean_photon(k) = 0.25 * (g(k, k) + g(n + k, n + k)) +
                              0.5 * (m(k) * m(k) + m(n + k) * m(n + k)) - 0.5;
    }
    out.form = std::move(form);
    return out;
}

} // namespace gaussfisher
