#include <doctest.h>

#include "test_support.hpp"

#include <gaussfisher/errors.hpp>
#include <gaussfisher/fock_oracle.hpp>
#include <gaussfisher/sld.hpp>

#include <cmath>

using namespace gaussfisher;

TEST_CASE("truncated thermal state has geometric populations") {
    const auto s = build_state(builtin_family("thermal").evaluate(3.0), 40);
    CHECK(s.n == 1);
    CHECK(s.cutoff == 40);
    const double x = 0.5; // (ν - 1)/(ν + 1)
    for (int m = 0; m < 10; ++m) {
        CHECK(s.rho(m, m).real() == doctest::Approx((1 - x) * std::pow(x, m)).epsilon(1e-12));
    }
    CHECK(s.tail_mass == doctest::Approx(std::pow(x, 40)).scale(1.0).epsilon(1e-12));
    CHECK((s.rho - s.rho.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("build_state preconditions") {
    const auto vac = builtin_family("thermal").evaluate(1.5);
    auto flag = [](auto &&fn) -> std::string {
        try {
            fn();
        } catch (const PreconditionError &e) {
            return e.flag();
        }
        return "";
    };
    CHECK(flag([&] { (void)build_state(vac, 4); }) == "cutoff");
    const auto hot = builtin_family("thermal").evaluate(50.0);
    CHECK(flag([&] { (void)build_state(hot, 10); }) == "cutoff");
    const auto three = testsupport::random_point(3, 1, 1.0, 2.0);
    CHECK_THROWS_AS((void)build_state(three, 10), DomainError);
    CHECK(suggested_cutoff(vac) >= 8);
}

TEST_CASE("pure states are pure in the truncated space") {
    const auto p = builtin_family("phase_squeezed", {{"r", 0.4}}).evaluate(0.3);
    const auto s = build_state(p, 40);
    const double purity = (s.rho * s.rho).trace().real();
    CHECK(purity == doctest::Approx(1.0).epsilon(1e-8));
    const double trace = s.rho.trace().real();
    CHECK(trace + s.tail_mass == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("oracle QFI matches closed forms") {
    const auto thermal = qfi_fock(builtin_family("thermal"), 2.0, 50);
    CHECK(thermal.qfi == doctest::Approx(1.0 / 3.0).epsilon(1e-7));
    CHECK(thermal.cutoff == 50);

    const auto shift = qfi_fock(builtin_family("displacement"), 0.0, 30);
    CHECK(shift.qfi == doctest::Approx(2.0).epsilon(1e-7));

    const auto phase = qfi_fock(builtin_family("phase_squeezed", {{"r", 0.5}}), 0.2, 40, kDefaultOracleStep, true);
    CHECK(phase.qfi == doctest::Approx(2.0 * std::pow(std::sinh(1.0), 2)).epsilon(1e-6));
    REQUIRE(phase.probe_shift);
    CHECK(*phase.probe_shift < 1e-6);
}

TEST_CASE("oracle QFI on a two-mode model") {
    const auto r = qfi_fock(builtin_family("two_mode_squeezed_phase", {{"r", 0.5}}), 0.3, 20);
    CHECK(r.qfi == doctest::Approx(std::pow(std::sinh(1.0), 2)).epsilon(1e-5));
}

TEST_CASE("analytic SLD satisfies the defining equation in Fock space") {
    for (const auto &[fam, theta, cutoff] :
         {std::tuple{builtin_family("thermal"), 2.0, 40}, std::tuple{builtin_family("displacement"), 0.2, 30},
          std::tuple{builtin_family("squeezing", {{"nu", 1.5}}), 0.1, 50}}) {
        CAPTURE(fam.name());
        const auto p = fam.evaluate(theta);
        const auto coeffs = sld_coefficients(p);
        const auto chk = sld_check(fam, theta, coeffs, cutoff);
        CHECK(chk.residual < 1e-6);
        CHECK(std::abs(chk.mean) < 1e-8);
        CHECK(chk.second_moment == doctest::Approx(qfi_general(p).qfi).epsilon(1e-6));
        CHECK(sld_residual(fam, theta, coeffs, cutoff) == doctest::Approx(chk.residual));
    }
}

TEST_CASE("sld_operator for the displacement model is 2Q") {
    const auto p = builtin_family("displacement").evaluate(0.0);
    const CMatrix L = sld_operator(sld_coefficients(p), p.d, 1, 10);
    CHECK(L.rows() == 10);
    CHECK(std::abs(L(0, 1) - std::sqrt(2.0)) < 1e-14);
    CHECK(std::abs(L(0, 0)) < 1e-14);
}

TEST_CASE("moment identities on single and two-mode states") {
    const auto one = testsupport::random_point(1, 4, 1.0, 1.6);
    const auto r1 = identity_checks(one, 40);
    CHECK(r1.mean_error < 1e-8);
    CHECK(r1.covariance_error < 1e-8);
    CHECK(r1.characteristic_error < 1e-8);
    CHECK(r1.fourth_moment_error < 1e-7);
    CHECK(r1.inverse_derivative_error < 1e-12);

    const auto two = builtin_family("two_mode_squeezed_phase", {{"r", 0.3}, {"nu", 1.2}}).evaluate(0.4);
    const auto r2 = identity_checks(two, 20);
    CHECK(r2.mean_error < 1e-8);
    CHECK(r2.covariance_error < 1e-7);
    CHECK(r2.characteristic_error < 1e-7);
    CHECK(r2.fourth_moment_error < 1e-6);
}
