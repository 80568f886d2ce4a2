#include <doctest.h>

#include "test_support.hpp"

#include <gaussfisher/errors.hpp>
#include <gaussfisher/symplectic.hpp>

#include <cmath>

using namespace gaussfisher;
using testsupport::random_covariance;

namespace {
double max_abs(const Matrix &m) { return m.cwiseAbs().maxCoeff(); }
} // namespace

TEST_CASE("omega is the canonical antisymmetric form") {
    for (int n = 1; n <= 4; ++n) {
        const Matrix w = omega_matrix(n);
        CHECK(max_abs(w + w.transpose()) == 0.0);
        CHECK(max_abs(w * w + Matrix::Identity(2 * n, 2 * n)) == 0.0);
        CHECK(max_abs(symplectic_form(n).inverse() * w - Matrix::Identity(2 * n, 2 * n)) == 0.0);
    }
    CHECK(omega_matrix(1)(0, 1) == 1.0);
    CHECK_THROWS_AS((void)symplectic_form(0), DimensionError);
}

TEST_CASE("covariance construction checks shape and finiteness") {
    CHECK_THROWS_AS((void)CovarianceMatrix{Matrix::Identity(3, 3)}, DimensionError);
    CHECK_THROWS_AS((void)CovarianceMatrix{Matrix::Identity(2, 4)}, DimensionError);
    Matrix bad = Matrix::Identity(2, 2);
    bad(0, 1) = std::nan("");
    CHECK_THROWS_AS((void)CovarianceMatrix{bad}, DomainError);
}

TEST_CASE("validate_covariance examples") {
    const auto vac = validate_covariance(CovarianceMatrix(Matrix::Identity(2, 2)));
    CHECK(vac.valid);
    CHECK(vac.nu_min == doctest::Approx(1.0).epsilon(1e-14));

    Matrix below = 0.5 * Matrix::Identity(2, 2);
    const auto d = validate_covariance(CovarianceMatrix(below));
    CHECK_FALSE(d.valid);
    CHECK(d.nu_min == doctest::Approx(0.5));

    Matrix asym = Matrix::Identity(2, 2);
    asym(0, 1) = 1e-3;
    CHECK_FALSE(validate_covariance(CovarianceMatrix(asym)).valid);

    Matrix indefinite(2, 2);
    indefinite << 1, 0, 0, -1;
    CHECK_FALSE(validate_covariance(CovarianceMatrix(indefinite)).positive_definite);

    CHECK_THROWS_AS((void)validate_covariance(CovarianceMatrix(Matrix::Identity(2, 2)), 1e-9, 2), DimensionError);

    // squeezed vacuum saturates the bound
    Matrix sq(2, 2);
    sq << std::exp(2.0), 0, 0, std::exp(-2.0);
    CHECK(validate_covariance(CovarianceMatrix(sq)).valid);
}

TEST_CASE("symplectic eigenvalues agree with the spectrum of iωΓ") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 1 + trial % 3;
        const Matrix g = random_covariance(n, rng, 1.0, 4.0, 1.5);
        const Vector a = symplectic_eigenvalues(g);
        const Vector b = testsupport::eig_symplectic_eigenvalues(g);
        CHECK(max_abs(a - b) < 1e-9 * b.maxCoeff());
    }
}

TEST_CASE("williamson reconstructs Γ with a symplectic frame") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 1 + trial % 3;
        const Matrix g = random_covariance(n, rng, 1.0, 5.0, 2.0);
        const auto w = williamson(CovarianceMatrix(g));
        const double scale = std::max(1.0, max_abs(g));
        CHECK(max_abs(w.reconstruct() - g) < 1e-9 * scale);
        CHECK(symplectic_defect(w.S) < 1e-9 * std::max(1.0, max_abs(w.S) * max_abs(w.S)));
        for (int k = 1; k < n; ++k) {
            CHECK(w.nu(k - 1) >= w.nu(k));
        }
    }
}

TEST_CASE("williamson of degenerate and pure states") {
    // two-mode squeezed vacuum: ν = (1, 1)
    const double r = 0.8;
    const double c = std::cosh(2 * r), s = std::sinh(2 * r);
    Matrix g(4, 4);
    g << c, s, 0, 0, s, c, 0, 0, 0, 0, c, -s, 0, 0, -s, c;
    const auto w = williamson(CovarianceMatrix(g));
    CHECK(w.nu(0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(w.nu(1) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(max_abs(w.reconstruct() - g) < 1e-9 * c);

    const auto thermal = williamson(CovarianceMatrix(3.0 * Matrix::Identity(4, 4)));
    CHECK(thermal.nu(0) == doctest::Approx(3.0));
    CHECK(thermal.nu(1) == doctest::Approx(3.0));

    CHECK_THROWS_AS((void)williamson(CovarianceMatrix(0.5 * Matrix::Identity(2, 2))), DomainError);
}

TEST_CASE("symplectic inverse and defect") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const int n = 1 + static_cast<int>(seed % 3);
        const Matrix S = random_symplectic(n, seed, 2.0);
        CHECK(is_symplectic(S, 1e-9 * max_abs(S) * max_abs(S)));
        const Matrix I = S * symplectic_inverse(S);
        CHECK(max_abs(I - Matrix::Identity(2 * n, 2 * n)) < 1e-9 * max_abs(S) * max_abs(S));
    }
    CHECK_FALSE(is_symplectic(2.0 * Matrix::Identity(2, 2)));
}

TEST_CASE("random_symplectic is deterministic per seed") {
    const Matrix a = random_symplectic(2, 42, 1.0);
    const Matrix b = random_symplectic(2, 42, 1.0);
    const Matrix c = random_symplectic(2, 43, 1.0);
    CHECK(max_abs(a - b) == 0.0);
    CHECK(max_abs(a - c) > 1e-3);
    // squeeze_cap = 0 gives passive (orthogonal) matrices
    const Matrix o = random_symplectic(3, 7, 0.0);
    CHECK(max_abs(o * o.transpose() - Matrix::Identity(6, 6)) < 1e-12);
}

TEST_CASE("passive matrices and unitaries correspond") {
    const Matrix O = random_symplectic(3, 9, 0.0);
    const CMatrix u = unitary_from_passive(O);
    CHECK((u * u.adjoint() - CMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(max_abs(passive_from_unitary(u) - O) < 1e-14);
}

TEST_CASE("diagonalize_symmetric_hamiltonian gives an orthogonal symplectic O") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 1 + trial % 3;
        const Matrix w = omega_matrix(n);
        const Matrix X = testsupport::random_symmetric(2 * n, rng);
        const Matrix W = 0.5 * (X + w * X * w);
        const auto hd = diagonalize_symmetric_hamiltonian(W);
        CHECK(max_abs(hd.O * hd.O.transpose() - Matrix::Identity(2 * n, 2 * n)) < 1e-10);
        CHECK(symplectic_defect(hd.O) < 1e-10);
        Vector diag(2 * n);
        diag << hd.mu, -hd.mu;
        CHECK(max_abs(hd.O * W * hd.O.transpose() - Matrix(diag.asDiagonal())) < 1e-9);
        for (int k = 1; k < n; ++k) {
            CHECK(hd.mu(k - 1) >= hd.mu(k));
        }
        CHECK(hd.mu.minCoeff() >= 0.0);
    }
    // kernel completion: W = 0 on two modes
    const auto zero = diagonalize_symmetric_hamiltonian(Matrix::Zero(4, 4));
    CHECK(zero.mu.isZero());
    CHECK(symplectic_defect(zero.O) < 1e-12);
    // rank-deficient W
    Matrix W = Matrix::Zero(4, 4);
    W(0, 0) = 2.0;
    W(2, 2) = -2.0;
    const auto part = diagonalize_symmetric_hamiltonian(W);
    CHECK(part.mu(0) == doctest::Approx(2.0));
    CHECK(part.mu(1) == doctest::Approx(0.0));
    CHECK_THROWS_AS((void)diagonalize_symmetric_hamiltonian(Matrix::Identity(2, 2)), DomainError);
}

TEST_CASE("euler decomposition factors symplectic matrices") {
    for (std::uint64_t seed = 100; seed < 130; ++seed) {
        const int n = 1 + static_cast<int>(seed % 3);
        const Matrix S = random_symplectic(n, seed, 1.5);
        const auto e = euler_decomposition(S);
        Vector z(2 * n);
        z << e.z.array().exp().matrix(), (-e.z).array().exp().matrix();
        CHECK(max_abs(e.O1 * z.asDiagonal() * e.O2 - S) < 1e-9 * max_abs(S));
        CHECK(max_abs(e.O1 * e.O1.transpose() - Matrix::Identity(2 * n, 2 * n)) < 1e-10);
        CHECK(max_abs(e.O2 * e.O2.transpose() - Matrix::Identity(2 * n, 2 * n)) < 1e-10);
        CHECK(symplectic_defect(e.O1) < 1e-10);
        CHECK(symplectic_defect(e.O2) < 1e-10);
        CHECK(e.z.minCoeff() >= 0.0);
    }
}

TEST_CASE("phase-space direct sum keeps the (Q.., P..) ordering") {
    Matrix a(2, 2), b(2, 2);
    a << 1, 2, 3, 4;
    b << 5, 6, 7, 8;
    const Matrix s = phase_space_direct_sum(a, b);
    Matrix expected(4, 4);
    expected << 1, 0, 2, 0, 0, 5, 0, 6, 3, 0, 4, 0, 0, 7, 0, 8;
    CHECK(max_abs(s - expected) == 0.0);
    Vector u(2), v(2);
    u << 1, 2;
    v << 3, 4;
    Vector uv(4);
    uv << 1, 3, 2, 4;
    CHECK((phase_space_direct_sum(u, v) - uv).cwiseAbs().maxCoeff() == 0.0);
    // ω_a ⊕ ω_b = ω
    CHECK(max_abs(phase_space_direct_sum(omega_matrix(1), omega_matrix(2)) - omega_matrix(3)) == 0.0);
}
