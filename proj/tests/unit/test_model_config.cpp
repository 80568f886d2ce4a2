#include <doctest.h>

#include <gaussfisher/errors.hpp>
#include <gaussfisher/model_config.hpp>

#include <filesystem>

using namespace gaussfisher;

TEST_CASE("family documents") {
    const auto cfg = parse_model_config(R"({"family": "phase_squeezed", "params": {"r": 0.5}, "theta": 0.25})");
    CHECK_FALSE(cfg.is_explicit);
    CHECK(cfg.theta == 0.25);
    CHECK(cfg.family.name() == "phase_squeezed");
    CHECK(cfg.family.params().at("nu") == 1.0);
    CHECK(cfg.family.derivative_mode() == DerivativeMode::Analytic);

    const auto fd = parse_model_config(R"({"family": "squeezing", "theta": 0.1, "derivative": "fd", "h": 1e-4})");
    CHECK(fd.family.derivative_mode() == DerivativeMode::FiniteDifference);
    CHECK(fd.family.fd_step() == 1e-4);
}

TEST_CASE("explicit documents") {
    const auto cfg = parse_model_config(R"({"explicit": {"n": 1, "Gamma": [[2, 0], [0, 2]],
        "dGamma": [[1, 0], [0, 1]]}})");
    CHECK(cfg.is_explicit);
    const auto p = cfg.point();
    CHECK(p.n == 1);
    CHECK(p.d.isZero());
    CHECK(p.dd.isZero());
    CHECK(p.Gamma()(0, 0) == 2.0);
}

TEST_CASE("malformed documents are ConfigErrors") {
    const char *bad[] = {
        "not json",
        "[]",
        R"({})",
        R"({"family": "thermal", "theta": 2, "colour": 1})",
        R"({"family": "thermal", "theta": "two"})",
        R"({"family": "unknown", "theta": 0})",
        R"({"family": "thermal", "theta": 2, "h": 1e-3})",
        R"({"family": "thermal", "theta": 2, "derivative": "symbolic"})",
        R"({"family": "thermal", "theta": 2, "explicit": {}})",
        R"({"explicit": {"n": 1, "Gamma": [[1, 0], [0, 1], [0, 0]], "dGamma": [[0, 0], [0, 0]]}})",
        R"({"explicit": {"n": 2, "Gamma": [[1, 0], [0, 1]], "dGamma": [[0, 0], [0, 0]]}})",
        R"({"explicit": {"n": 1, "Gamma": [[1, 0], [0, 1]]}})",
        R"({"explicit": {"n": 1, "d": [0], "Gamma": [[1, 0], [0, 1]], "dGamma": [[0, 0], [0, 0]]}})",
    };
    for (const char *doc : bad) {
        CAPTURE(doc);
        CHECK_THROWS_AS((void)parse_model_config(doc), ConfigError);
    }
}

TEST_CASE("physically invalid values are DomainErrors") {
    CHECK_THROWS_AS((void)parse_model_config(R"({"family": "squeezing", "params": {"nu": 0.2}, "theta": 0})"),
                    DomainError);
    CHECK_THROWS_AS(
        (void)parse_model_config(R"({"explicit": {"n": 1, "Gamma": [[0.5, 0], [0, 0.5]], "dGamma": [[0, 0], [0, 0]]}})"),
        DomainError);
}

TEST_CASE("bundled config files load") {
    const std::filesystem::path dir = GAUSSFISHER_CONFIG_DIR;
    for (const char *name : {"thermal.json", "phase.json", "phase_mixed.json", "shift.json", "squeezing_fd.json",
                             "tmsv.json", "explicit.json"}) {
        CAPTURE(name);
        CHECK_NOTHROW((void)load_model_config(dir / name).point());
    }
    CHECK_THROWS_AS((void)load_model_config(dir / "missing.json"), ConfigError);
}
