#include "test_support.hpp"

#include <gaussfisher/symplectic.hpp>

#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>

namespace testsupport {

using namespace gaussfisher;

Matrix dense_dgamma(const Matrix &gamma) {
    const int n = static_cast<int>(gamma.rows() / 2);
    const Matrix w = omega_matrix(n);
    return Eigen::kroneckerProduct(gamma, gamma).eval() - Eigen::kroneckerProduct(w, w).eval();
}

Matrix dense_pinv_solve(const Matrix &gamma, const Matrix &X, double rcond) {
    const Matrix D = dense_dgamma(gamma);
    Eigen::JacobiSVD<Matrix> svd(D, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vector &s = svd.singularValues();
    Vector inv = Vector::Zero(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > rcond * s(0)) {
            inv(i) = 1.0 / s(i);
        }
    }
    const Vector x = Eigen::Map<const Vector>(X.data(), X.size());
    const Vector y = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose() * x;
    return Eigen::Map<const Matrix>(y.data(), X.rows(), X.cols());
}

double dense_qfi(const GaussianModelPoint &p) {
    const Matrix Y = dense_pinv_solve(p.Gamma(), p.dgamma);
    return 0.5 * (p.dgamma * Y).trace() + 2.0 * p.dd.dot(p.Gamma().ldlt().solve(p.dd));
}

Vector eig_symplectic_eigenvalues(const Matrix &gamma) {
    const int n = static_cast<int>(gamma.rows() / 2);
    const CMatrix m = Complex(0.0, 1.0) * (omega_matrix(n) * gamma).cast<Complex>();
    Eigen::ComplexEigenSolver<CMatrix> es(m);
    std::vector<double> ev;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        if (es.eigenvalues()(i).real() > 0.0) {
            ev.push_back(es.eigenvalues()(i).real());
        }
    }
    std::sort(ev.begin(), ev.end(), std::greater<>());
    Vector out(n);
    for (int k = 0; k < n; ++k) {
        out(k) = ev[static_cast<std::size_t>(k)];
    }
    return out;
}

Matrix random_symmetric(int dim, std::mt19937_64 &rng, double scale) {
    std::normal_distribution<double> normal(0.0, scale);
    Matrix m(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            m(i, j) = normal(rng);
        }
    }
    return 0.5 * (m + m.transpose());
}

Matrix random_covariance(int n, std::mt19937_64 &rng, double nu_lo, double nu_hi, double squeeze_cap) {
    std::uniform_real_distribution<double> unif(nu_lo, nu_hi);
    Vector nu2(2 * n);
    for (int k = 0; k < n; ++k) {
        nu2(k) = nu2(n + k) = unif(rng);
    }
    const Matrix S = random_symplectic(n, rng(), squeeze_cap);
    return S * nu2.asDiagonal() * S.transpose();
}

GaussianModelPoint random_point(int n, std::uint64_t seed, double nu_lo, double nu_hi, bool with_dd) {
    std::mt19937_64 rng(seed);
    const Matrix gamma = random_covariance(n, rng, nu_lo, nu_hi);
    const Matrix dgamma = random_symmetric(2 * n, rng);
    std::normal_distribution<double> normal;
    Vector d(2 * n), dd = Vector::Zero(2 * n);
    for (int i = 0; i < 2 * n; ++i) {
        d(i) = normal(rng);
        if (with_dd) {
            dd(i) = normal(rng);
        }
    }
    return make_model_point(d, gamma, dd, dgamma);
}

GaussianModelPoint random_isothermal_point(int n, std::uint64_t seed, double nu) {
    std::mt19937_64 rng(seed);
    const Matrix S = random_symplectic(n, rng(), 1.0);
    const Matrix w = omega_matrix(n);
    const Matrix X = random_symmetric(2 * n, rng);
    const Matrix W = 0.5 * (X + w * X * w);
    std::normal_distribution<double> normal;
    Vector d(2 * n);
    for (int i = 0; i < 2 * n; ++i) {
        d(i) = normal(rng);
    }
    return make_model_point(d, nu * S * S.transpose(), Vector::Zero(2 * n), S * W * S.transpose());
}

std::vector<NamedPoint> model_suite() {
    std::vector<NamedPoint> out;
    out.push_back({"displacement", builtin_family("displacement").evaluate(0.4)});
    out.push_back({"thermal", builtin_family("thermal").evaluate(2.0)});
    out.push_back({"squeezing", builtin_family("squeezing", {{"nu", 1.0}}).evaluate(0.3)});
    out.push_back({"squeezing-mixed", builtin_family("squeezing", {{"nu", 1.5}}).evaluate(-0.2)});
    out.push_back({"phase_squeezed", builtin_family("phase_squeezed", {{"r", 0.5}}).evaluate(0.7)});
    out.push_back({"phase_squeezed-mixed", builtin_family("phase_squeezed", {{"r", 0.4}, {"nu", 2.0}}).evaluate(0.1)});
    out.push_back({"two_mode_squeezed_phase",
                   builtin_family("two_mode_squeezed_phase", {{"r", 0.5}}).evaluate(0.3)});
    return out;
}

} // namespace testsupport
