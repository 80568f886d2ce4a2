#include "gaussfisher/model_config.hpp"

#include "gaussfisher/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace gaussfisher {

namespace {

using nlohmann::json;

void reject_unknown(const json &obj, const std::set<std::string> &allowed, const std::string &where) {
    for (const auto &item : obj.items()) {
        if (!allowed.contains(item.key())) {
            throw ConfigError(where + ": unknown key '" + item.key() + "'");
        }
    }
}

double number(const json &v, const std::string &what) {
    if (!v.is_number()) {
        throw ConfigError(what + " must be a number");
    }
    return v.get<double>();
}

Vector vector_of(const json &v, Eigen::Index size, const std::string &what) {
    if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != size) {
        throw ConfigError(what + " must be an array of " + std::to_string(size) + " numbers");
    }
    Vector out(size);
    for (Eigen::Index i = 0; i < size; ++i) {
        out(i) = number(v[static_cast<std::size_t>(i)], what + "[" + std::to_string(i) + "]");
    }
    return out;
}

Matrix matrix_of(const json &v, Eigen::Index size, const std::string &what) {
    if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != size) {
        throw ConfigError(what + " must have " + std::to_string(size) + " rows");
    }
    Matrix out(size, size);
    for (Eigen::Index i = 0; i < size; ++i) {
        out.row(i) = vector_of(v[static_cast<std::size_t>(i)], size, what + " row " + std::to_string(i)).transpose();
    }
    return out;
}

ModelConfig parse_explicit(const json &e) {
    if (!e.is_object()) {
        throw ConfigError("explicit must be an object");
    }
    reject_unknown(e, {"n", "d", "Gamma", "dd", "dGamma"}, "explicit");
    for (const char *key : {"n", "Gamma", "dGamma"}) {
        if (!e.contains(key)) {
            throw ConfigError(std::string("explicit: missing '") + key + "'");
        }
    }
    if (!e["n"].is_number_integer() || e["n"].get<int>() < 1) {
        throw ConfigError("explicit: n must be a positive integer");
    }
    const int n = e["n"].get<int>();
    const Eigen::Index dim = 2 * n;
    Vector d = e.contains("d") ? vector_of(e["d"], dim, "explicit.d") : Vector::Zero(dim);
    Vector dd = e.contains("dd") ? vector_of(e["dd"], dim, "explicit.dd") : Vector::Zero(dim);
    Matrix gamma = matrix_of(e["Gamma"], dim, "explicit.Gamma");
    Matrix dgamma = matrix_of(e["dGamma"], dim, "explicit.dGamma");
    GaussianModelPoint point;
    try {
        point = make_model_point(std::move(d), std::move(gamma), std::move(dd), std::move(dgamma));
    } catch (const DimensionError &err) {
        throw ConfigError(std::string("explicit: ") + err.what());
    }
    return ModelConfig{tangent_family(point), 0.0, true};
}

ModelConfig parse_family(const json &doc) {
    reject_unknown(doc, {"family", "params", "theta", "derivative", "h"}, "config");
    if (!doc["family"].is_string()) {
        throw ConfigError("family must be a string");
    }
    std::map<std::string, double> params;
    if (doc.contains("params")) {
        if (!doc["params"].is_object()) {
            throw ConfigError("params must be an object");
        }
        for (const auto &item : doc["params"].items()) {
            params[item.key()] = number(item.value(), "params." + item.key());
        }
    }
    ModelFamily family = builtin_family(doc["family"].get<std::string>(), params);
    const double theta = doc.contains("theta") ? number(doc["theta"], "theta") : 0.0;

    std::string mode = "analytic";
    if (doc.contains("derivative")) {
        if (!doc["derivative"].is_string()) {
            throw ConfigError("derivative must be \"analytic\" or \"fd\"");
        }
        mode = doc["derivative"].get<std::string>();
    }
    if (mode == "fd") {
        const double h = doc.contains("h") ? number(doc["h"], "h") : 0.0;
        if (!(h >= 0.0)) {
            throw ConfigError("h must be non-negative");
        }
        family = family.with_finite_difference(h);
    } else if (mode != "analytic") {
        throw ConfigError("derivative must be \"analytic\" or \"fd\", got '" + mode + "'");
    } else if (doc.contains("h")) {
        throw ConfigError("h is only meaningful with \"derivative\": \"fd\"");
    }
    return ModelConfig{std::move(family), theta, false};
}

} // namespace

ModelConfig parse_model_config(const std::string &text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &err) {
        throw ConfigError(std::string("config is not valid JSON: ") + err.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    const bool has_family = doc.contains("family");
    const bool has_explicit = doc.contains("explicit");
    if (has_family == has_explicit) {
        throw ConfigError("config needs exactly one of 'family' or 'explicit'");
    }
    if (has_explicit) {
        reject_unknown(doc, {"explicit"}, "config");
        return parse_explicit(doc["explicit"]);
    }
    return parse_family(doc);
}

ModelConfig load_model_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model_config(buf.str());
}

} // namespace gaussfisher
