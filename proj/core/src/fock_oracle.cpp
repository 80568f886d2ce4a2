#include "gaussfisher/fock_oracle.hpp"

#include "gaussfisher/dgamma.hpp"
#include "gaussfisher/errors.hpp"
#include "gaussfisher/symplectic.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace gaussfisher {

namespace {

using SpMat = Eigen::SparseMatrix<Complex>;
using Triplet = Eigen::Triplet<Complex>;

constexpr Complex kI{0.0, 1.0};

SpMat kron(const SpMat &a, const SpMat &b) {
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
    for (int ka = 0; ka < a.outerSize(); ++ka) {
        for (SpMat::InnerIterator ia(a, ka); ia; ++ia) {
            for (int kb = 0; kb < b.outerSize(); ++kb) {
                for (SpMat::InnerIterator ib(b, kb); ib; ++ib) {
                    t.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                                   ia.value() * ib.value());
                }
            }
        }
    }
    SpMat out(a.rows() * b.rows(), a.cols() * b.cols());
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

SpMat identity(int dim) {
    SpMat id(dim, dim);
    id.setIdentity();
    return id;
}

// Quadrature operators Q_k, P_k on n modes with `levels` Fock states each.
class FockSpace {
  public:
    FockSpace(int n, int levels) : n_(n), levels_(levels) {
        SpMat a(levels, levels);
        std::vector<Triplet> t;
        for (int m = 1; m < levels; ++m) {
            t.emplace_back(m - 1, m, std::sqrt(static_cast<double>(m)));
        }
        a.setFromTriplets(t.begin(), t.end());
        const SpMat ad = SpMat(a.adjoint());
        const double r = 1.0 / std::sqrt(2.0);
        const SpMat q = (a + ad) * Complex(r, 0.0);
        const SpMat p = (a - ad) * Complex(0.0, -r);
        dim_ = 1;
        for (int k = 0; k < n; ++k) {
            dim_ *= levels;
        }
        R_.resize(static_cast<std::size_t>(2 * n));
        for (int k = 0; k < n; ++k) {
            // basis index m_0 + levels·m_1: mode 0 is the fast (right) factor
            const SpMat left = identity(k == 0 ? (n == 2 ? levels : 1) : 1);
            const SpMat right = identity(k == 1 ? levels : 1);
            R_[static_cast<std::size_t>(k)] = kron(kron(left, q), right);
            R_[static_cast<std::size_t>(n + k)] = kron(kron(left, p), right);
        }
    }

    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] int levels() const noexcept { return levels_; }
    [[nodiscard]] const SpMat &R(int i) const { return R_[static_cast<std::size_t>(i)]; }

    /// -i·½ Σ M_ij R_i R_j
    [[nodiscard]] SpMat quadratic_generator(const Matrix &M) const {
        SpMat H(dim_, dim_);
        for (int i = 0; i < 2 * n_; ++i) {
            for (int j = 0; j < 2 * n_; ++j) {
                if (M(i, j) != 0.0) {
                    H += SpMat(R(i) * R(j)) * Complex(0.5 * M(i, j), 0.0);
                }
            }
        }
        return H * (-kI);
    }

    /// -i·Σ v_j R_j
    [[nodiscard]] SpMat linear_generator(const Vector &v) const {
        SpMat H(dim_, dim_);
        for (int j = 0; j < 2 * n_; ++j) {
            if (v(j) != 0.0) {
                H += R(j) * Complex(v(j), 0.0);
            }
        }
        return H * (-kI);
    }

    /// Total photon number of a basis state.
    [[nodiscard]] int photon_number(int idx) const { return n_ == 1 ? idx : idx % levels_ + idx / levels_; }

    /// Maps a basis index in a space with `levels_small` per mode to this space.
    [[nodiscard]] int embed_index(int idx, int levels_small) const {
        if (n_ == 1) {
            return idx;
        }
        return idx % levels_small + levels_ * (idx / levels_small);
    }

  private:
    int n_;
    int levels_;
    int dim_ = 1;
    std::vector<SpMat> R_;
};

double one_norm(const SpMat &A) {
    double best = 0.0;
    for (int k = 0; k < A.outerSize(); ++k) {
        double s = 0.0;
        for (SpMat::InnerIterator it(A, k); it; ++it) {
            s += std::abs(it.value());
        }
        best = std::max(best, s);
    }
    return best;
}

// exp(A)·B by a scaled Taylor series.
CMatrix expm_action(const SpMat &A, CMatrix B) {
    const double nrm = one_norm(A);
    const int steps = std::max(1, static_cast<int>(std::ceil(nrm / 3.0)));
    const Complex inv_steps(1.0 / steps, 0.0);
    for (int s = 0; s < steps; ++s) {
        CMatrix term = B;
        CMatrix acc = B;
        for (int k = 1; k <= 60; ++k) {
            term = (A * term) * (inv_steps / static_cast<double>(k));
            acc += term;
            if (term.norm() <= 1e-17 * acc.norm()) {
                break;
            }
        }
        B = std::move(acc);
    }
    return B;
}

// exp(A)·B for a generator that conserves the total photon number. The
// truncated A is block diagonal in the photon-number sectors, so each block
// is exponentiated exactly through its Hermitian eigendecomposition (A = -iH).
CMatrix expm_action_number_conserving(const SpMat &A, const FockSpace &space, const CMatrix &B) {
    const int dim = space.dim();
    int sectors = 0;
    std::vector<int> sector(static_cast<std::size_t>(dim));
    std::vector<int> position(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) {
        sector[static_cast<std::size_t>(i)] = space.photon_number(i);
        sectors = std::max(sectors, sector[static_cast<std::size_t>(i)] + 1);
    }
    std::vector<std::vector<int>> members(static_cast<std::size_t>(sectors));
    for (int i = 0; i < dim; ++i) {
        auto &m = members[static_cast<std::size_t>(sector[static_cast<std::size_t>(i)])];
        position[static_cast<std::size_t>(i)] = static_cast<int>(m.size());
        m.push_back(i);
    }
    std::vector<CMatrix> blocks(static_cast<std::size_t>(sectors));
    for (int s = 0; s < sectors; ++s) {
        const auto size = static_cast<Eigen::Index>(members[static_cast<std::size_t>(s)].size());
        blocks[static_cast<std::size_t>(s)] = CMatrix::Zero(size, size);
    }
    // cross-sector entries are round-off from cancelling a² and a†² terms
    double largest = 0.0;
    for (int k = 0; k < A.outerSize(); ++k) {
        for (SpMat::InnerIterator it(A, k); it; ++it) {
            largest = std::max(largest, std::abs(it.value()));
        }
    }
    for (int k = 0; k < A.outerSize(); ++k) {
        for (SpMat::InnerIterator it(A, k); it; ++it) {
            const auto r = static_cast<std::size_t>(it.row());
            const auto c = static_cast<std::size_t>(it.col());
            if (sector[r] != sector[c]) {
                if (std::abs(it.value()) > 1e-12 * largest) {
                    return expm_action(A, B);
                }
                continue;
            }
            blocks[static_cast<std::size_t>(sector[r])](position[r], position[c]) += it.value();
        }
    }
    CMatrix out(B.rows(), B.cols());
    for (int s = 0; s < sectors; ++s) {
        const auto &idx = members[static_cast<std::size_t>(s)];
        const auto size = static_cast<Eigen::Index>(idx.size());
        CMatrix rows(size, B.cols());
        for (Eigen::Index i = 0; i < size; ++i) {
            rows.row(i) = B.row(idx[static_cast<std::size_t>(i)]);
        }
        const CMatrix H = kI * blocks[static_cast<std::size_t>(s)];
        Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (H + H.adjoint()));
        CVector phase(size);
        for (Eigen::Index i = 0; i < size; ++i) {
            phase(i) = std::exp(-kI * es.eigenvalues()(i));
        }
        const CMatrix &V = es.eigenvectors();
        const CMatrix mapped = V * (phase.asDiagonal() * (V.adjoint() * rows));
        for (Eigen::Index i = 0; i < size; ++i) {
            out.row(idx[static_cast<std::size_t>(i)]) = mapped.row(i);
        }
    }
    return out;
}

// exp(A) for a small anti-Hermitian generator A = -iH.
CMatrix dense_unitary(const SpMat &A) {
    const CMatrix H = kI * CMatrix(A);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (H + H.adjoint()));
    CVector phase(H.rows());
    for (Eigen::Index i = 0; i < H.rows(); ++i) {
        phase(i) = std::exp(-kI * es.eigenvalues()(i));
    }
    return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

// (E0 ⊗ E1) acting on two-mode columns with basis index m0 + L·m1: each
// column is the L×L matrix X(m0, m1) and maps to E0 X E1ᵀ.
CMatrix apply_two_mode_product(const CMatrix &E0, const CMatrix &E1, const CMatrix &psi) {
    const Eigen::Index L = E0.rows();
    CMatrix out(psi.rows(), psi.cols());
    for (Eigen::Index c = 0; c < psi.cols(); ++c) {
        const Eigen::Map<const CMatrix> X(psi.col(c).data(), L, L);
        Eigen::Map<CMatrix> Y(out.col(c).data(), L, L);
        Y.noalias() = E0 * X * E1.transpose();
    }
    return out;
}

Matrix passive_hamiltonian(const Matrix &O) {
    const int n = static_cast<int>(O.rows() / 2);
    const CMatrix u = unitary_from_passive(O);
    Eigen::ComplexSchur<CMatrix> schur(u);
    const CMatrix &T = schur.matrixT();
    const CMatrix &Z = schur.matrixU();
    CVector phi(n);
    for (int k = 0; k < n; ++k) {
        phi(k) = std::arg(T(k, k));
    }
    const CMatrix h = Z * phi.asDiagonal() * Z.adjoint();
    Matrix K(2 * n, 2 * n);
    K << -h.imag(), -h.real(), h.real(), -h.imag();
    const Matrix M = -omega_matrix(n) * K;
    return 0.5 * (M + M.transpose());
}

int pow_int(int base, int e) {
    int out = 1;
    for (int k = 0; k < e; ++k) {
        out *= base;
    }
    return out;
}

std::vector<int> index_map(const FockSpace &space, int cutoff, int n) {
    std::vector<int> map(static_cast<std::size_t>(pow_int(cutoff, n)));
    for (std::size_t i = 0; i < map.size(); ++i) {
        map[i] = space.embed_index(static_cast<int>(i), cutoff);
    }
    return map;
}

// Rows of `big` that lie inside the truncated basis.
CMatrix compress_rows(const CMatrix &big, const FockSpace &space, int cutoff, int n) {
    const auto map = index_map(space, cutoff, n);
    CMatrix out(static_cast<Eigen::Index>(map.size()), big.cols());
    for (std::size_t i = 0; i < map.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = big.row(map[i]);
    }
    return out;
}

CMatrix compress(const CMatrix &big, const FockSpace &space, int cutoff, int n) {
    const auto map = index_map(space, cutoff, n);
    const auto m = static_cast<Eigen::Index>(map.size());
    CMatrix out(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < m; ++i) {
            out(i, j) = big(map[static_cast<std::size_t>(i)], map[static_cast<std::size_t>(j)]);
        }
    }
    return out;
}

CMatrix embed(const CMatrix &small, const FockSpace &space, int cutoff) {
    CMatrix out = CMatrix::Zero(space.dim(), space.dim());
    for (int j = 0; j < small.cols(); ++j) {
        for (int i = 0; i < small.rows(); ++i) {
            out(space.embed_index(i, cutoff), space.embed_index(j, cutoff)) = small(i, j);
        }
    }
    return out;
}

// tr[X·A] for sparse A.
Complex trace_with(const CMatrix &X, const SpMat &A) {
    Complex acc{0.0, 0.0};
    for (int k = 0; k < A.outerSize(); ++k) {
        for (SpMat::InnerIterator it(A, k); it; ++it) {
            acc += X(it.col(), it.row()) * it.value();
        }
    }
    return acc;
}

CMatrix hermitize(const CMatrix &m) { return 0.5 * (m + m.adjoint()); }

double trace_norm(const CMatrix &hermitian) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitize(hermitian), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

// Per-mode Fock levels for the intermediate states of the Euler route. The
// single-mode squeezers can spread a state much further than the final
// (possibly two-mode) state, so the working space is sized from the largest
// squeezing exponent, the largest thermal level kept and the displacement.
int working_levels(int cutoff, int n, int m_max, double z_max, double d_norm) {
    double levels = cutoff + std::max(10, cutoff / 2);
    if (z_max > 1e-3) {
        // amplitude of a squeezed vacuum at level 2k falls like tanh(z)^k
        const double vacuum_width = 2.0 * std::log(1e-13) / std::log(std::tanh(z_max));
        levels = std::max(levels, 2.0 * m_max * std::cosh(2.0 * z_max) + vacuum_width);
    }
    levels += d_norm * d_norm + 8.0 * d_norm;
    const double cap = n == 1 ? 1500.0 : 100.0;
    return static_cast<int>(std::ceil(std::min(std::max(levels, cutoff + 10.0), std::max(cap, cutoff + 10.0))));
}

struct QfiValue {
    double qfi = 0.0;
    double excluded = 0.0;
};

QfiValue qfi_from(const Eigen::SelfAdjointEigenSolver<CMatrix> &es, const CMatrix &drho) {
    const Vector &p = es.eigenvalues();
    const CMatrix dr = es.eigenvectors().adjoint() * drho * es.eigenvectors();
    const double eps = 1e-12 * std::max(p.maxCoeff(), 0.0);
    QfiValue out;
    for (Eigen::Index m = 0; m < p.size(); ++m) {
        for (Eigen::Index k = 0; k < p.size(); ++k) {
            const double s = p(m) + p(k);
            const double w = std::norm(dr(m, k));
            if (s < eps) {
                out.excluded += w;
            } else {
                out.qfi += 2.0 * w / s;
            }
        }
    }
    return out;
}

TruncatedState build_from_moments(const ModelFamily &family, double theta, int cutoff) {
    const auto m = family.moments(theta);
    return build_state(m.d, CovarianceMatrix(m.gamma), cutoff);
}

struct Derivative {
    CMatrix rho;
    CMatrix drho;   ///< Richardson extrapolated
    CMatrix drho_h; ///< plain central difference at h
    double tail = 0.0;
};

Derivative density_derivative(const ModelFamily &family, double theta, int cutoff, double h) {
    if (!(h > 0.0)) {
        throw DomainError("oracle: step h must be positive");
    }
    Derivative out;
    const auto s0 = build_from_moments(family, theta, cutoff);
    out.rho = s0.rho;
    out.tail = s0.tail_mass;
    auto central = [&](double step) {
        const auto plus = build_from_moments(family, theta + step, cutoff);
        const auto minus = build_from_moments(family, theta - step, cutoff);
        return CMatrix((plus.rho - minus.rho) / (2.0 * step));
    };
    out.drho_h = central(h);
    const CMatrix half = central(0.5 * h);
    out.drho = hermitize((4.0 * half - out.drho_h) / 3.0);
    return out;
}

} // namespace

TruncatedState build_state(const Vector &d, const CovarianceMatrix &gamma, int cutoff, double max_tail) {
    const int n = gamma.modes();
    if (n < 1 || n > 2) {
        throw DomainError("build_state: the Fock oracle supports 1 or 2 modes, got " + std::to_string(n));
    }
    if (d.size() != 2 * n) {
        throw DimensionError("build_state: displacement has the wrong length");
    }
    if (cutoff < 8) {
        throw PreconditionError("cutoff", "build_state: cutoff must be at least 8");
    }
    const auto diag = validate_covariance(gamma);
    if (!diag.valid) {
        throw DomainError("build_state: invalid covariance matrix");
    }

    const auto w = williamson(gamma);
    const auto euler = euler_decomposition(w.S);

    // thermal components |m⟩ with weights Π (1 - x_k) x_k^{m_k}
    std::vector<double> weights;
    std::vector<int> indices;
    int m_max = 0;
    const int small = pow_int(cutoff, n);
    for (int idx = 0; idx < small; ++idx) {
        double p = 1.0;
        int rest = idx;
        int m_top = 0;
        for (int k = 0; k < n; ++k) {
            const int mk = rest % cutoff;
            rest /= cutoff;
            m_top = std::max(m_top, mk);
            const double x = (w.nu(k) - 1.0) / (w.nu(k) + 1.0);
            p *= (1.0 - x) * (mk == 0 ? 1.0 : std::pow(x, mk));
        }
        if (p > 1e-15) {
            weights.push_back(p);
            indices.push_back(idx);
            m_max = std::max(m_max, m_top);
        }
    }

    const FockSpace space(n, working_levels(cutoff, n, m_max, euler.z.cwiseAbs().maxCoeff(), d.norm()));
    std::vector<int> columns;
    for (int idx : indices) {
        columns.push_back(space.embed_index(idx, cutoff));
    }
    CMatrix psi = CMatrix::Zero(space.dim(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t c = 0; c < columns.size(); ++c) {
        psi(columns[c], static_cast<Eigen::Index>(c)) = 1.0;
    }

    const Matrix I2n = Matrix::Identity(2 * n, 2 * n);
    auto apply_passive = [&](const Matrix &O) {
        if ((O - I2n).cwiseAbs().maxCoeff() > 1e-14) {
            psi = expm_action_number_conserving(space.quadratic_generator(passive_hamiltonian(O)), space, psi);
        }
    };
    apply_passive(euler.O2);
    // Squeezers and displacements act mode by mode; on two modes they are
    // applied as products of dense single-mode unitaries.
    const FockSpace single(1, space.levels());
    if (euler.z.cwiseAbs().maxCoeff() > 1e-14) {
        if (n == 1) {
            Matrix M = Matrix::Zero(2, 2);
            M(0, 1) = M(1, 0) = euler.z(0);
            psi = expm_action(space.quadratic_generator(M), std::move(psi));
        } else {
            std::vector<CMatrix> E;
            for (int k = 0; k < 2; ++k) {
                Matrix M = Matrix::Zero(2, 2);
                M(0, 1) = M(1, 0) = euler.z(k);
                E.push_back(dense_unitary(single.quadratic_generator(M)));
            }
            psi = apply_two_mode_product(E[0], E[1], psi);
        }
    }
    apply_passive(euler.O1);
    if (d.cwiseAbs().maxCoeff() > 0.0) {
        const Vector v = omega_matrix(n).transpose() * d;
        if (n == 1) {
            psi = expm_action(space.linear_generator(v), std::move(psi));
        } else {
            std::vector<CMatrix> E;
            for (int k = 0; k < 2; ++k) {
                Vector vk(2);
                vk << v(k), v(2 + k);
                E.push_back(dense_unitary(single.linear_generator(vk)));
            }
            psi = apply_two_mode_product(E[0], E[1], psi);
        }
    }

    CMatrix kept = compress_rows(psi, space, cutoff, n);
    for (std::size_t c = 0; c < weights.size(); ++c) {
        kept.col(static_cast<Eigen::Index>(c)) *= std::sqrt(weights[c]);
    }
    TruncatedState out;
    out.n = n;
    out.cutoff = cutoff;
    out.rho = hermitize(kept * kept.adjoint());
    out.tail_mass = std::max(0.0, 1.0 - out.rho.trace().real());
    if (out.tail_mass > max_tail) {
        throw PreconditionError("cutoff", "build_state: tail mass " + std::to_string(out.tail_mass) +
                                              " exceeds " + std::to_string(max_tail) + " at cutoff " +
                                              std::to_string(cutoff));
    }
    return out;
}

TruncatedState build_state(const GaussianModelPoint &point, int cutoff, double max_tail) {
    return build_state(point.d, point.gamma, cutoff, max_tail);
}

int suggested_cutoff(const GaussianModelPoint &point) {
    const int n = point.n;
    const Matrix &g = point.Gamma();
    double nmax = 0.0;
    for (int k = 0; k < n; ++k) {
        const double photons = 0.25 * (g(k, k) + g(n + k, n + k)) +
                               0.5 * (point.d(k) * point.d(k) + point.d(n + k) * point.d(n + k)) - 0.5;
        nmax = std::max(nmax, photons);
    }
    return std::max(8, static_cast<int>(std::ceil(10.0 + 8.0 * nmax)));
}

FockQFI qfi_fock(const ModelFamily &family, double theta, int cutoff, double h, bool probe) {
    const auto der = density_derivative(family, theta, cutoff, h);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(der.rho);
    const auto best = qfi_from(es, der.drho);
    const auto plain = qfi_from(es, hermitize(der.drho_h));
    FockQFI out;
    out.qfi = best.qfi;
    out.excluded_weight = best.excluded;
    out.richardson_shift = std::abs(best.qfi - plain.qfi);
    out.tail_mass = der.tail;
    out.cutoff = cutoff;
    if (probe) {
        out.probe_shift = std::abs(qfi_fock(family, theta, cutoff + 10, h, false).qfi - out.qfi);
    }
    return out;
}

CMatrix sld_operator(const SLDCoefficients &coeffs, const Vector &d, int n, int cutoff) {
    if (coeffs.L.rows() != 2 * n || coeffs.b.size() != 2 * n || d.size() != 2 * n) {
        throw DimensionError("sld_operator: coefficient shapes do not match the mode count");
    }
    const FockSpace space(n, cutoff + 4);
    const SpMat id = identity(space.dim());
    std::vector<SpMat> Rh;
    for (int i = 0; i < 2 * n; ++i) {
        Rh.push_back(space.R(i) - id * Complex(d(i), 0.0));
    }
    SpMat L = id * Complex(coeffs.c, 0.0);
    for (int i = 0; i < 2 * n; ++i) {
        if (coeffs.b(i) != 0.0) {
            L += Rh[static_cast<std::size_t>(i)] * Complex(coeffs.b(i), 0.0);
        }
        for (int j = 0; j < 2 * n; ++j) {
            const double lij = 0.5 * (coeffs.L(i, j) + coeffs.L(j, i));
            if (lij != 0.0) {
                const SpMat sym = SpMat(Rh[static_cast<std::size_t>(i)] * Rh[static_cast<std::size_t>(j)]);
                L += sym * Complex(lij, 0.0);
            }
        }
    }
    // The sum over (i, j) and (j, i) already symmetrizes R̂ⁱR̂ʲ.
    return hermitize(compress(CMatrix(L), space, cutoff, n));
}

SLDCheck sld_check(const ModelFamily &family, double theta, const SLDCoefficients &coeffs, int cutoff,
                   double h) {
    const auto der = density_derivative(family, theta, cutoff, h);
    const auto m = family.moments(theta);
    const int n = static_cast<int>(m.d.size() / 2);
    const CMatrix L = sld_operator(coeffs, m.d, n, cutoff);
    SLDCheck out;
    out.residual = trace_norm(der.drho - 0.5 * (der.rho * L + L * der.rho));
    out.mean = (der.rho * L).trace().real();
    out.second_moment = (der.rho * L * L).trace().real();
    return out;
}

double sld_residual(const ModelFamily &family, double theta, const SLDCoefficients &coeffs, int cutoff,
                    double h) {
    return sld_check(family, theta, coeffs, cutoff, h).residual;
}

IdentityReport identity_checks(const GaussianModelPoint &point, int cutoff, double xi_max, int samples) {
    const auto state = build_state(point, cutoff);
    const int n = point.n;
    const int dim2 = 2 * n;
    const Matrix &G = point.Gamma();
    const Matrix omega = omega_matrix(n);

    IdentityReport rep;
    rep.cutoff = cutoff;
    rep.tail_mass = state.tail_mass;

    // moments, with operator products evaluated in a slightly larger space
    const FockSpace space(n, cutoff + 4);
    const CMatrix rho = embed(state.rho, space, cutoff);
    const SpMat id = identity(space.dim());
    std::vector<SpMat> Rh;
    for (int i = 0; i < dim2; ++i) {
        const Complex mean = trace_with(rho, space.R(i));
        rep.mean_error = std::max(rep.mean_error, std::abs(mean - point.d(i)));
        Rh.push_back(space.R(i) - id * Complex(point.d(i), 0.0));
    }
    std::vector<std::vector<SpMat>> A(static_cast<std::size_t>(dim2), std::vector<SpMat>(static_cast<std::size_t>(dim2)));
    for (int i = 0; i < dim2; ++i) {
        for (int j = 0; j < dim2; ++j) {
            const auto &ri = Rh[static_cast<std::size_t>(i)];
            const auto &rj = Rh[static_cast<std::size_t>(j)];
            A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = SpMat(ri * rj + rj * ri) * Complex(0.5, 0.0);
        }
    }
    for (int i = 0; i < dim2; ++i) {
        for (int j = 0; j < dim2; ++j) {
            const double cov = 2.0 * trace_with(rho, A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]).real();
            rep.covariance_error = std::max(rep.covariance_error, std::abs(cov - G(i, j)));
        }
    }

    // fourth moments: Re tr[ρ (R̂ⁱ∘R̂ʲ)(R̂ᵏ∘R̂ˡ)]
    for (int i = 0; i < dim2; ++i) {
        for (int j = i; j < dim2; ++j) {
            const CMatrix left = A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * rho;
            for (int k = 0; k < dim2; ++k) {
                for (int l = k; l < dim2; ++l) {
                    const double value = trace_with(left, A[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)]).real();
                    const double expected = 0.25 * (G(i, j) * G(k, l) + G(i, k) * G(j, l) -
                                                    omega(i, k) * omega(j, l) + G(i, l) * G(j, k) -
                                                    omega(i, l) * omega(j, k));
                    rep.fourth_moment_error = std::max(rep.fourth_moment_error, std::abs(value - expected));
                }
            }
        }
    }

    // characteristic function χ(ξ) = tr[ρ W(ξ)], W(ξ) = exp(i (ωξ)ᵀR)
    // tr[ρW] = Σ p_k ⟨φ_k|W|φ_k⟩ over the significant eigenvectors of ρ
    const FockSpace wide(n, cutoff + std::max(10, cutoff / 2));
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(state.rho);
    std::vector<Eigen::Index> keep;
    const double pmax = eig.eigenvalues().maxCoeff();
    for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k) {
        if (eig.eigenvalues()(k) > 1e-15 * pmax) {
            keep.push_back(k);
        }
    }
    CMatrix phi = CMatrix::Zero(wide.dim(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
        const auto col = eig.eigenvectors().col(keep[c]);
        for (Eigen::Index i = 0; i < col.size(); ++i) {
            phi(wide.embed_index(static_cast<int>(i), cutoff), static_cast<Eigen::Index>(c)) = col(i);
        }
    }
    std::mt19937_64 rng(0x5eedULL);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int s = 0; s < samples; ++s) {
        Vector xi(dim2);
        for (int i = 0; i < dim2; ++i) {
            xi(i) = normal(rng);
        }
        xi *= xi_max * unif(rng) / xi.norm();
        const Vector k = omega * xi;
        CMatrix moved;
        if (n == 1) {
            moved = expm_action(wide.linear_generator(-k), phi);
        } else {
            const FockSpace single(1, wide.levels());
            Vector k0(2), k1(2);
            k0 << -k(0), -k(2);
            k1 << -k(1), -k(3);
            moved = apply_two_mode_product(dense_unitary(single.linear_generator(k0)),
                                           dense_unitary(single.linear_generator(k1)), phi);
        }
        const CMatrix Wphi = compress_rows(moved, wide, cutoff, n);
        const CMatrix phi_small = compress_rows(phi, wide, cutoff, n);
        Complex chi{0.0, 0.0};
        for (std::size_t c = 0; c < keep.size(); ++c) {
            const auto ci = static_cast<Eigen::Index>(c);
            chi += eig.eigenvalues()(keep[c]) * phi_small.col(ci).dot(Wphi.col(ci));
        }
        const Complex expected = std::exp(Complex(-0.25 * xi.dot(omega * G * omega.transpose() * xi),
                                                  xi.dot(-omega * point.d)));
        rep.characteristic_error = std::max(rep.characteristic_error, std::abs(chi - expected));
    }

    const Matrix dginv = inverse_derivative(G, point.dgamma);
    rep.inverse_derivative_error =
        (point.dgamma + apply_dgamma(G, dginv) + omega * dginv * omega.transpose()).cwiseAbs().maxCoeff();
    return rep;
}

} // namespace gaussfisher
