#pragma once

#include "gaussfisher/models.hpp"

#include <filesystem>
#include <string>

namespace gaussfisher {

/// A model-config document resolved to a family and a parameter value.
///
/// Two shapes are accepted (JSON):
///   {"family": name, "params": {...}, "theta": x, "derivative": "analytic"|"fd", "h": step}
///   {"explicit": {"n": n, "d": [...], "Gamma": [[...]], "dd": [...], "dGamma": [[...]]}}
/// Explicit points become the tangent family through the point at θ = 0.
struct ModelConfig {
    ModelFamily family;
    double theta = 0.0;
    bool is_explicit = false;

    [[nodiscard]] GaussianModelPoint point() const { return family.evaluate(theta); }
};

/// Throws ConfigError for malformed documents, unknown keys or families and
/// shape mismatches; DomainError for parameters outside a family's domain.
[[nodiscard]] ModelConfig parse_model_config(const std::string &text);

/// Reads and parses a file. An unreadable file is a ConfigError.
[[nodiscard]] ModelConfig load_model_config(const std::filesystem::path &path);

} // namespace gaussfisher
