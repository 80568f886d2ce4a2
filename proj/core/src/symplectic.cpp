#include "gaussfisher/symplectic.hpp"

#include "gaussfisher/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace gaussfisher {

namespace {

void require_phase_space_square(const Matrix &m, const char *what) {
    if (m.rows() != m.cols() || m.rows() == 0 || m.rows() % 2 != 0) {
        throw DimensionError(std::string(what) + ": expected a non-empty square matrix of even dimension, got " +
                             std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
}

double max_abs(const Matrix &m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// Raw Williamson step for a symmetric positive definite matrix; no checks on
// the quality of the result.
WilliamsonDecomposition williamson_step(const Matrix &m) {
    const Eigen::Index dim = m.rows();
    const Eigen::Index n = dim / 2;
    const Matrix sym = 0.5 * (m + m.transpose());

    Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
    if (es.info() != Eigen::Success) {
        throw ConvergenceError("williamson: eigensolver failed");
    }
    if (es.eigenvalues().minCoeff() <= 0.0) {
        throw DomainError("williamson: matrix is not positive definite");
    }
    const Matrix root = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
                        es.eigenvectors().transpose();

    // B = Γ^{1/2} ω Γ^{1/2} is antisymmetric; iB is Hermitian with spectrum ±ν.
    const Matrix omega = omega_matrix(static_cast<int>(n));
    const Matrix B = root * omega * root;
    const CMatrix iB = Complex(0.0, 1.0) * B.cast<Complex>();
    Eigen::SelfAdjointEigenSolver<CMatrix> ces(iB);
    if (ces.info() != Eigen::Success) {
        throw ConvergenceError("williamson: Hermitian eigensolver failed");
    }

    WilliamsonDecomposition out;
    out.nu.resize(n);
    Matrix O(dim, dim);
    const double sqrt2 = std::sqrt(2.0);
    for (Eigen::Index k = 0; k < n; ++k) {
        // Ascending order: the last n eigenvalues are +ν, largest last.
        const Eigen::Index idx = dim - 1 - k;
        const CVector u = ces.eigenvectors().col(idx);
        out.nu(k) = ces.eigenvalues()(idx);
        O.col(k) = sqrt2 * u.real();
        O.col(n + k) = -sqrt2 * u.imag();
    }

    Vector inv_sqrt_nu(dim);
    for (Eigen::Index k = 0; k < n; ++k) {
        inv_sqrt_nu(k) = 1.0 / std::sqrt(out.nu(k));
        inv_sqrt_nu(n + k) = inv_sqrt_nu(k);
    }
    out.S = root * O * inv_sqrt_nu.asDiagonal();
    return out;
}

struct WilliamsonQuality {
    double reconstruction;
    double symplecticity;
};

WilliamsonQuality quality(const WilliamsonDecomposition &w, const Matrix &m) {
    const double scale = std::max(1.0, max_abs(m));
    const double s_scale = std::max(1.0, max_abs(w.S) * max_abs(w.S));
    return {max_abs(w.reconstruct() - m) / scale, symplectic_defect(w.S) / s_scale};
}

WilliamsonDecomposition williamson_refined(const Matrix &m, double tol) {
    WilliamsonDecomposition w = williamson_step(m);
    auto q = quality(w, m);
    if (q.reconstruction <= tol && q.symplecticity <= tol) {
        return w;
    }
    // One refinement pass: decompose the nearly diagonal residual frame.
    const Matrix T = w.S.partialPivLu().inverse();
    Matrix inner = T * m * T.transpose();
    inner = 0.5 * (inner + inner.transpose());
    const WilliamsonDecomposition w2 = williamson_step(inner);
    w.S = w.S * w2.S;
    w.nu = w2.nu;
    q = quality(w, m);
    if (q.reconstruction > tol || q.symplecticity > tol) {
        throw ConvergenceError("williamson: tolerance not met after refinement (reconstruction " +
                               std::to_string(q.reconstruction) + ", symplectic defect " +
                               std::to_string(q.symplecticity) + ")");
    }
    return w;
}

} // namespace

SymplecticForm::SymplecticForm(int modes) : n_(modes) {
    if (modes < 1) {
        throw DimensionError("symplectic_form: mode count must be positive");
    }
    omega_ = Matrix::Zero(2 * modes, 2 * modes);
    omega_.topRightCorner(modes, modes).setIdentity();
    omega_.bottomLeftCorner(modes, modes) = -Matrix::Identity(modes, modes);
}

SymplecticForm symplectic_form(int modes) { return SymplecticForm(modes); }

Matrix omega_matrix(int modes) { return SymplecticForm(modes).matrix(); }

CovarianceMatrix::CovarianceMatrix(Matrix gamma) : gamma_(std::move(gamma)) {
    require_phase_space_square(gamma_, "CovarianceMatrix");
    if (!gamma_.allFinite()) {
        throw DomainError("CovarianceMatrix: non-finite entries");
    }
}

CovarianceDiagnostics validate_covariance(const CovarianceMatrix &gamma, double tol,
                                          int expected_modes) {
    const Matrix &g = gamma.matrix();
    if (expected_modes > 0 && gamma.modes() != expected_modes) {
        throw DimensionError("validate_covariance: declared " + std::to_string(expected_modes) +
                             " modes but Γ is " + std::to_string(g.rows()) + "x" +
                             std::to_string(g.cols()));
    }
    CovarianceDiagnostics diag;
    diag.asymmetry = max_abs(g - g.transpose());
    const Matrix sym = 0.5 * (g + g.transpose());

    Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
    diag.positive_definite = es.eigenvalues().minCoeff() > 0.0;
    if (diag.positive_definite) {
        diag.nu_min = symplectic_eigenvalues(sym).minCoeff();
    } else {
        // |eig(iωΓ)| is still defined; it is only a diagnostic here.
        const Matrix wg = omega_matrix(gamma.modes()) * sym;
        Eigen::EigenSolver<Matrix> ges(wg, false);
        diag.nu_min = ges.eigenvalues().cwiseAbs().minCoeff();
    }
    diag.valid = diag.asymmetry <= tol && diag.positive_definite && diag.nu_min >= 1.0 - tol;
    return diag;
}

Vector symplectic_eigenvalues(const Matrix &gamma) {
    require_phase_space_square(gamma, "symplectic_eigenvalues");
    const Eigen::Index dim = gamma.rows();
    const Eigen::Index n = dim / 2;
    const Matrix sym = 0.5 * (gamma + gamma.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
    if (es.eigenvalues().minCoeff() <= 0.0) {
        throw DomainError("symplectic_eigenvalues: matrix is not positive definite");
    }
    const Matrix root = es.operatorSqrt();
    const Matrix B = root * omega_matrix(static_cast<int>(n)) * root;
    Eigen::SelfAdjointEigenSolver<CMatrix> ces(Complex(0.0, 1.0) * B.cast<Complex>(),
                                               Eigen::EigenvaluesOnly);
    Vector nu(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        nu(k) = ces.eigenvalues()(dim - 1 - k);
    }
    return nu;
}

Matrix WilliamsonDecomposition::thermal() const {
    const Eigen::Index n = nu.size();
    Vector diag(2 * n);
    diag << nu, nu;
    return diag.asDiagonal();
}

Matrix WilliamsonDecomposition::reconstruct() const { return S * thermal() * S.transpose(); }

WilliamsonDecomposition williamson(const CovarianceMatrix &gamma, double tol) {
    const auto diag = validate_covariance(gamma, tol);
    if (!diag.valid) {
        throw DomainError("williamson: invalid covariance matrix (nu_min = " +
                          std::to_string(diag.nu_min) + ", asymmetry = " +
                          std::to_string(diag.asymmetry) + ")");
    }
    return williamson_refined(0.5 * (gamma.matrix() + gamma.matrix().transpose()), tol);
}

WilliamsonDecomposition williamson_positive(const Matrix &m, double tol) {
    require_phase_space_square(m, "williamson_positive");
    return williamson_refined(0.5 * (m + m.transpose()), tol);
}

double symplectic_defect(const Matrix &S) {
    require_phase_space_square(S, "symplectic_defect");
    const Matrix omega = omega_matrix(static_cast<int>(S.rows() / 2));
    return max_abs(S * omega * S.transpose() - omega);
}

bool is_symplectic(const Matrix &S, double tol) { return symplectic_defect(S) <= tol; }

Matrix symplectic_inverse(const Matrix &S) {
    require_phase_space_square(S, "symplectic_inverse");
    const Matrix omega = omega_matrix(static_cast<int>(S.rows() / 2));
    return -omega * S.transpose() * omega;
}

Matrix passive_from_unitary(const CMatrix &u) {
    const Eigen::Index n = u.rows();
    Matrix O(2 * n, 2 * n);
    O.topLeftCorner(n, n) = u.real();
    O.topRightCorner(n, n) = -u.imag();
    O.bottomLeftCorner(n, n) = u.imag();
    O.bottomRightCorner(n, n) = u.real();
    return O;
}

CMatrix unitary_from_passive(const Matrix &O) {
    require_phase_space_square(O, "unitary_from_passive");
    const Eigen::Index n = O.rows() / 2;
    CMatrix u(n, n);
    u.real() = O.topLeftCorner(n, n);
    u.imag() = O.bottomLeftCorner(n, n);
    return u;
}

HamiltonianDiagonalization diagonalize_symmetric_hamiltonian(const Matrix &W, double tol) {
    require_phase_space_square(W, "diagonalize_symmetric_hamiltonian");
    const Eigen::Index dim = W.rows();
    const Eigen::Index n = dim / 2;
    const Matrix omega = omega_matrix(static_cast<int>(n));
    const double scale = std::max(1.0, max_abs(W));
    if (max_abs(W - W.transpose()) > tol * scale) {
        throw DomainError("diagonalize_symmetric_hamiltonian: matrix is not symmetric");
    }
    if (max_abs(W * omega + omega * W) > tol * scale) {
        throw DomainError("diagonalize_symmetric_hamiltonian: matrix does not anticommute with omega");
    }

    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (W + W.transpose()));
    const Vector &ev = es.eigenvalues();
    const Matrix &vecs = es.eigenvectors();
    const double zero_thr = tol * scale;

    // Positive eigenvectors span an isotropic subspace: ω maps the +μ space
    // onto the -μ space, which is orthogonal to it.
    std::vector<Vector> cols;
    std::vector<double> mus;
    for (Eigen::Index i = dim - 1; i >= 0 && static_cast<Eigen::Index>(cols.size()) < n; --i) {
        if (ev(i) <= zero_thr) {
            break;
        }
        cols.emplace_back(vecs.col(i));
        mus.push_back(ev(i));
    }

    // Complete with a Lagrangian subspace of the (ω-invariant) kernel.
    std::vector<Vector> kernel;
    for (Eigen::Index i = 0; i < dim; ++i) {
        if (std::abs(ev(i)) <= zero_thr) {
            kernel.emplace_back(vecs.col(i));
        }
    }
    while (static_cast<Eigen::Index>(cols.size()) < n) {
        double best_norm = -1.0;
        Vector best;
        for (const Vector &cand : kernel) {
            Vector v = cand;
            for (int pass = 0; pass < 2; ++pass) {
                for (const Vector &u : cols) {
                    v -= u.dot(v) * u;
                    const Vector wu = omega.transpose() * u;
                    v -= wu.dot(v) * wu;
                }
            }
            const double nv = v.norm();
            if (nv > best_norm) {
                best_norm = nv;
                best = v;
            }
        }
        if (best_norm < 0.5) {
            throw ConvergenceError("diagonalize_symmetric_hamiltonian: could not complete a Lagrangian basis");
        }
        cols.emplace_back(best / best_norm);
        mus.push_back(0.0);
    }

    std::vector<std::size_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (std::abs(mus[a] - mus[b]) > zero_thr) {
            return mus[a] > mus[b];
        }
        // ties: lexicographic on eigenvector entries
        for (Eigen::Index i = 0; i < dim; ++i) {
            const double da = cols[a](i);
            const double db = cols[b](i);
            if (std::abs(da - db) > 1e-12) {
                return da > db;
            }
        }
        return false;
    });

    HamiltonianDiagonalization out;
    out.O.resize(dim, dim);
    out.mu.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto src = order[static_cast<std::size_t>(k)];
        const Vector &u = cols[src];
        out.O.row(k) = u.transpose();
        out.O.row(n + k) = (omega.transpose() * u).transpose();
        out.mu(k) = std::max(0.0, mus[src]);
    }
    return out;
}

EulerDecomposition euler_decomposition(const Matrix &S, double tol) {
    require_phase_space_square(S, "euler_decomposition");
    // Polar form S = P · Q with P = (S Sᵀ)^{1/2} symmetric symplectic.
    Eigen::SelfAdjointEigenSolver<Matrix> es(S * S.transpose());
    const Vector lam = es.eigenvalues().cwiseMax(std::numeric_limits<double>::min());
    const Matrix &V = es.eigenvectors();
    const Matrix P_inv = V * lam.cwiseSqrt().cwiseInverse().asDiagonal() * V.transpose();
    const Matrix log_P = V * (0.5 * lam.array().log()).matrix().asDiagonal() * V.transpose();
    const Matrix Q = P_inv * S;

    const auto hd = diagonalize_symmetric_hamiltonian(0.5 * (log_P + log_P.transpose()),
                                                      std::max(tol, 1e-8));
    EulerDecomposition out;
    out.O1 = hd.O.transpose();
    out.z = hd.mu;
    out.O2 = hd.O * Q;
    return out;
}

Matrix random_symplectic(int modes, std::uint64_t seed, double squeeze_cap) {
    if (modes < 1) {
        throw DimensionError("random_symplectic: mode count must be positive");
    }
    if (!(squeeze_cap >= 0.0) || !std::isfinite(squeeze_cap)) {
        throw DomainError("random_symplectic: squeeze_cap must be finite and non-negative");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    auto haar_unitary = [&]() {
        CMatrix z(modes, modes);
        for (int j = 0; j < modes; ++j) {
            for (int i = 0; i < modes; ++i) {
                z(i, j) = Complex(normal(rng), normal(rng)) / std::sqrt(2.0);
            }
        }
        Eigen::HouseholderQR<CMatrix> qr(z);
        CMatrix q = qr.householderQ() * CMatrix::Identity(modes, modes);
        const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (int k = 0; k < modes; ++k) {
            const Complex d = r(k, k);
            const double ad = std::abs(d);
            q.col(k) *= ad > 0.0 ? d / ad : Complex(1.0, 0.0);
        }
        return q;
    };

    const Matrix O1 = passive_from_unitary(haar_unitary());
    const Matrix O2 = passive_from_unitary(haar_unitary());
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    Vector diag(2 * modes);
    for (int k = 0; k < modes; ++k) {
        const double z = squeeze_cap * uniform(rng);
        diag(k) = std::exp(z);
        diag(modes + k) = std::exp(-z);
    }
    return O1 * diag.asDiagonal() * O2;
}

namespace {

Eigen::Index sum_index(Eigen::Index i, Eigen::Index n_self, Eigen::Index offset, Eigen::Index n_total) {
    // Maps index i of a block with n_self modes placed at mode offset `offset`.
    return i < n_self ? offset + i : n_total + offset + (i - n_self);
}

} // namespace

Matrix phase_space_direct_sum(const Matrix &a, const Matrix &b) {
    require_phase_space_square(a, "phase_space_direct_sum");
    require_phase_space_square(b, "phase_space_direct_sum");
    const Eigen::Index na = a.rows() / 2;
    const Eigen::Index nb = b.rows() / 2;
    const Eigen::Index n = na + nb;
    Matrix out = Matrix::Zero(2 * n, 2 * n);
    for (Eigen::Index i = 0; i < 2 * na; ++i) {
        for (Eigen::Index j = 0; j < 2 * na; ++j) {
            out(sum_index(i, na, 0, n), sum_index(j, na, 0, n)) = a(i, j);
        }
    }
    for (Eigen::Index i = 0; i < 2 * nb; ++i) {
        for (Eigen::Index j = 0; j < 2 * nb; ++j) {
            out(sum_index(i, nb, na, n), sum_index(j, nb, na, n)) = b(i, j);
        }
    }
    return out;
}

Vector phase_space_direct_sum(const Vector &a, const Vector &b) {
    if (a.size() % 2 != 0 || b.size() % 2 != 0) {
        throw DimensionError("phase_space_direct_sum: vectors must have even length");
    }
    const Eigen::Index na = a.size() / 2;
    const Eigen::Index nb = b.size() / 2;
    const Eigen::Index n = na + nb;
    Vector out = Vector::Zero(2 * n);
    for (Eigen::Index i = 0; i < 2 * na; ++i) {
        out(sum_index(i, na, 0, n)) = a(i);
    }
    for (Eigen::Index i = 0; i < 2 * nb; ++i) {
        out(sum_index(i, nb, na, n)) = b(i);
    }
    return out;
}

} // namespace gaussfisher
