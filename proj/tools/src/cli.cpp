#include "gaussfisher_cli/cli.hpp"

#include <gaussfisher/errors.hpp>
#include <gaussfisher/fock_oracle.hpp>
#include <gaussfisher/homodyne.hpp>
#include <gaussfisher/model_config.hpp>
#include <gaussfisher/sld.hpp>
#include <gaussfisher/symplectic.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace gaussfisher::cli {

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string join(const std::vector<std::string> &items, const char *sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        out += (i ? sep : "") + items[i];
    }
    return out;
}

void print_matrix(std::ostream &out, const std::string &name, const Matrix &m) {
    out << name << " =\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out << "  [";
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out << (j ? ", " : "") << num(m(i, j));
        }
        out << "]\n";
    }
}

void print_vector(std::ostream &out, const std::string &name, const Vector &v) {
    out << name << " = [";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out << (i ? ", " : "") << num(v(i));
    }
    out << "]\n";
}

// Runs f(0..count-1) on up to `workers` threads; the first exception wins.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)> &f) {
    const auto threads = static_cast<std::size_t>(std::max(1, std::min<int>(workers, static_cast<int>(count))));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            f(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto &th : pool) {
        th.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

struct Tolerances {
    double kernel = kDefaultKernelTol;
    double isothermal = 1e-9;
};

void add_tolerance_flags(CLI::App *cmd, Tolerances &tol) {
    cmd->add_option("--kernel-tol", tol.kernel, "relative kernel threshold of D_Gamma")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--iso-tol", tol.isothermal, "tolerance of the isothermal checks")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
}

void echo_tolerances(std::ostream &out, const Tolerances &tol) {
    out << "# kernel_tol=" << num(tol.kernel) << " iso_tol=" << num(tol.isothermal) << "\n";
}

FisherReport fisher_for(const GaussianModelPoint &p, const std::string &method, const Tolerances &tol) {
    if (method == "general") {
        return qfi_general(p, tol.kernel);
    }
    if (method == "isothermal") {
        return qfi_isothermal(p, tol.isothermal);
    }
    const auto check = check_isothermal(p, tol.isothermal);
    if (check.is_isothermal && check.derivative_preserves_nu) {
        return qfi_isothermal(p, tol.isothermal);
    }
    return qfi_general(p, tol.kernel);
}

std::string describe(const ModelConfig &cfg) {
    std::ostringstream s;
    s << "model: " << cfg.family.name();
    for (const auto &[k, v] : cfg.family.params()) {
        s << " " << k << "=" << num(v);
    }
    if (!cfg.is_explicit) {
        s << " theta=" << num(cfg.theta);
    }
    return s.str();
}

// Homodyne optimum when the point qualifies; otherwise the name of the failed
// condition.
std::pair<std::optional<double>, std::string> homodyne_optimum(const GaussianModelPoint &p, double tol) {
    try {
        return {optimal_homodyne_fisher(isothermal_frame(p, tol)), ""};
    } catch (const PreconditionError &e) {
        return {std::nullopt, e.flag()};
    }
}

// ---- subcommands ----------------------------------------------------------

struct QfiArgs {
    std::string config;
    std::string method = "auto";
    Tolerances tol;
};

int cmd_qfi(const QfiArgs &a, std::ostream &out) {
    const auto cfg = load_model_config(a.config);
    const auto p = cfg.point();
    const auto r = fisher_for(p, a.method, a.tol);
    echo_tolerances(out, a.tol);
    out << describe(cfg) << "\n";
    out << "method=" << to_string(r.method) << "\n";
    out << "qfi=" << num(r.qfi) << "\n";
    out << "qfi_first_moment=" << num(r.first_moment_term) << "\n";
    out << "qfi_second_moment=" << num(r.second_moment_term) << "\n";
    out << "wigner=" << num(r.wigner_fisher) << "\n";
    out << "ratio=" << num(r.ratio()) << "\n";
    out << "range_residual=" << num(r.range_residual) << "\n";
    out << "warnings=" << (r.warnings.empty() ? "none" : join(r.warnings, ";")) << "\n";
    return kOk;
}

struct SweepArgs {
    std::string config;
    double from = 0.0;
    double to = 0.0;
    int steps = 1;
    std::string out_path;
    int jobs = 1;
    std::vector<std::string> outputs{"qfi", "wigner", "homodyne_opt"};
    int cutoff = 0;
    double oracle_h = kDefaultOracleStep;
    double oracle_memory_mb = 1024.0;
    std::string method = "auto";
    Tolerances tol;
};

int oracle_worker_bound(int jobs, int cutoff, int modes, double memory_mb) {
    // a handful of dense (D^n)² complex matrices are alive per evaluation
    const double dim = std::pow(static_cast<double>(cutoff), modes);
    const double bytes = 16.0 * dim * dim * 12.0;
    const int by_memory = static_cast<int>(memory_mb * 1024.0 * 1024.0 / std::max(bytes, 1.0));
    return std::max(1, std::min(jobs, by_memory));
}

int cmd_sweep(const SweepArgs &a, std::ostream &out) {
    const auto cfg = load_model_config(a.config);
    const std::set<std::string> outputs(a.outputs.begin(), a.outputs.end());
    const bool want_homodyne = outputs.contains("homodyne_opt");
    const bool want_oracle = outputs.contains("oracle");

    std::vector<double> thetas(static_cast<std::size_t>(a.steps));
    for (int i = 0; i < a.steps; ++i) {
        thetas[static_cast<std::size_t>(i)] =
            a.steps == 1 ? a.from : a.from + i * (a.to - a.from) / static_cast<double>(a.steps - 1);
    }
    std::vector<SweepRow> rows(thetas.size());
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        const auto dc = cfg.family.check_domain(thetas[i]);
        if (dc.status == DomainStatus::Outside) {
            throw PreconditionError("domain", "theta = " + num(thetas[i]) + " is outside the model domain: " +
                                                  dc.message);
        }
        if (dc.status == DomainStatus::NearSingular) {
            rows[i].warnings.emplace_back("near-singular");
        }
    }

    parallel_for(thetas.size(), a.jobs, [&](std::size_t i) {
        SweepRow &row = rows[i];
        row.theta = thetas[i];
        const auto p = cfg.family.evaluate(row.theta);
        const auto r = fisher_for(p, a.method, a.tol);
        row.qfi = r.qfi;
        row.qfi_first_moment = r.first_moment_term;
        row.qfi_second_moment = r.second_moment_term;
        row.wigner_fisher = r.wigner_fisher;
        row.ratio = r.ratio();
        row.method = to_string(r.method);
        row.warnings.insert(row.warnings.end(), r.warnings.begin(), r.warnings.end());
        if (want_homodyne) {
            auto [value, flag] = homodyne_optimum(p, a.tol.isothermal);
            row.homodyne_opt = value;
            if (!value) {
                row.warnings.push_back("homodyne:" + flag);
            }
        }
    });

    if (want_oracle && !rows.empty()) {
        const int cutoff = a.cutoff > 0 ? a.cutoff : suggested_cutoff(cfg.family.evaluate(thetas.front()));
        const int workers = oracle_worker_bound(a.jobs, cutoff, cfg.family.modes(), a.oracle_memory_mb);
        parallel_for(thetas.size(), workers, [&](std::size_t i) {
            rows[i].oracle_qfi = qfi_fock(cfg.family, thetas[i], cutoff, a.oracle_h).qfi;
        });
    }

    if (a.out_path.empty()) {
        emit_csv(rows, out, want_oracle);
    } else {
        emit_csv(rows, std::filesystem::path(a.out_path), want_oracle);
        echo_tolerances(out, a.tol);
        out << describe(cfg) << "\n";
        out << "wrote " << rows.size() << " rows to " << a.out_path << "\n";
    }
    return kOk;
}

struct SldArgs {
    std::string config;
    Tolerances tol;
};

int cmd_sld(const SldArgs &a, std::ostream &out) {
    const auto cfg = load_model_config(a.config);
    const auto p = cfg.point();
    const auto c = sld_coefficients(p, a.tol.kernel);
    echo_tolerances(out, a.tol);
    out << describe(cfg) << "\n";
    print_matrix(out, "L", c.L);
    print_vector(out, "b", c.b);
    out << "c = " << num(c.c) << "\n";
    out << "range_residual = " << num(c.range_residual) << (c.range_ok ? "" : "  (kernel-overlap)") << "\n";
    const auto u = to_uncentered(c, p.d);
    out << "uncentered: L0 = " << num(u.L0) << "\n";
    print_vector(out, "uncentered: L1", u.L1);
    const auto pc = photon_counting_form(c, p, a.tol.isothermal);
    if (!pc.form) {
        out << "photon-counting form: none (" << pc.reason << ")\n";
        return kOk;
    }
    out << "photon-counting form: SLD = sum_k 2 alpha_k (N_k - <N_k>)\n";
    print_vector(out, "  alpha", pc.form->alpha);
    print_vector(out, "  <N>", pc.form->mean_photon);
    print_vector(out, "  centre", pc.form->centre);
    print_matrix(out, "  T", pc.form->T);
    return kOk;
}

struct HomodyneArgs {
    std::string config;
    int random_u = 0;
    std::uint64_t seed = 1;
    double squeeze_cap = 2.0;
    std::vector<double> alpha;
    Tolerances tol;
};

int cmd_homodyne(const HomodyneArgs &a, std::ostream &out) {
    const auto cfg = load_model_config(a.config);
    const auto p = cfg.point();
    const auto frame = isothermal_frame(p, a.tol.isothermal);
    const double best = optimal_homodyne_fisher(frame);
    const auto r = qfi_general(p, a.tol.kernel);
    echo_tolerances(out, a.tol);
    out << describe(cfg) << "\n";
    out << "nu = " << num(frame.nu) << "\n";
    print_vector(out, "lambda", frame.lambda);
    print_matrix(out, "T", frame.T);
    out << "homodyne_opt = " << num(best) << "\n";
    out << "qfi = " << num(r.qfi) << "\n";
    out << "homodyne_opt/qfi = " << num(r.qfi > 0.0 ? best / r.qfi : 0.0) << "\n";
    if (a.random_u > 0) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        double sum = 0.0;
        int above = 0;
        for (int k = 0; k < a.random_u; ++k) {
            const Matrix U = random_symplectic(frame.modes(), a.seed + static_cast<std::uint64_t>(k), a.squeeze_cap);
            const double v = homodyne_fisher(frame, U);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            sum += v;
            above += v > best + 1e-9 ? 1 : 0;
        }
        out << "random U: samples=" << a.random_u << " seed=" << a.seed << " squeeze_cap=" << num(a.squeeze_cap)
            << "\n";
        out << "random U: min=" << num(lo) << " mean=" << num(sum / a.random_u) << " max=" << num(hi)
            << " above_bound=" << above << "\n";
    }
    if (!a.alpha.empty()) {
        const Vector alpha = Eigen::Map<const Vector>(a.alpha.data(), static_cast<Eigen::Index>(a.alpha.size()));
        const auto plan = homodyne_plan(alpha);
        print_matrix(out, "plan V", plan.V);
        print_vector(out, "plan g", plan.g);
    }
    return kOk;
}

struct OracleArgs {
    std::string config;
    int cutoff = 0;
    double h = kDefaultOracleStep;
    bool probe = false;
    Tolerances tol;
};

int cmd_oracle(const OracleArgs &a, std::ostream &out) {
    const auto cfg = load_model_config(a.config);
    const auto p = cfg.point();
    const int cutoff = a.cutoff > 0 ? a.cutoff : suggested_cutoff(p);
    const auto engine = qfi_general(p, a.tol.kernel);
    const auto oracle = qfi_fock(cfg.family, cfg.theta, cutoff, a.h, a.probe);
    const auto coeffs = sld_coefficients(p, a.tol.kernel);
    const auto sld = sld_check(cfg.family, cfg.theta, coeffs, cutoff, a.h);
    const auto ids = identity_checks(p, cutoff);
    echo_tolerances(out, a.tol);
    out << "# cutoff=" << cutoff << " h=" << num(a.h) << "\n";
    out << describe(cfg) << "\n";
    out << "engine_qfi = " << num(engine.qfi) << "\n";
    out << "oracle_qfi = " << num(oracle.qfi) << "\n";
    const double rel = engine.qfi != 0.0 ? std::abs(oracle.qfi - engine.qfi) / std::abs(engine.qfi)
                                         : std::abs(oracle.qfi);
    out << "relative_difference = " << num(rel) << "\n";
    out << "richardson_shift = " << num(oracle.richardson_shift) << "\n";
    out << "excluded_weight = " << num(oracle.excluded_weight) << "\n";
    out << "tail_mass = " << num(oracle.tail_mass) << "\n";
    if (oracle.probe_shift) {
        out << "probe_shift(D+10) = " << num(*oracle.probe_shift) << "\n";
    }
    out << "sld_residual = " << num(sld.residual) << "\n";
    out << "sld_mean = " << num(sld.mean) << "\n";
    out << "sld_second_moment = " << num(sld.second_moment) << "\n";
    out << "identity.mean = " << num(ids.mean_error) << "\n";
    out << "identity.covariance = " << num(ids.covariance_error) << "\n";
    out << "identity.characteristic = " << num(ids.characteristic_error) << "\n";
    out << "identity.fourth_moment = " << num(ids.fourth_moment_error) << "\n";
    out << "identity.inverse_derivative = " << num(ids.inverse_derivative_error) << "\n";
    return kOk;
}

} // namespace

void emit_csv(const std::vector<SweepRow> &rows, std::ostream &out, bool with_oracle) {
    std::vector<const SweepRow *> ordered;
    for (const auto &r : rows) {
        ordered.push_back(&r);
    }
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const SweepRow *a, const SweepRow *b) { return a->theta < b->theta; });
    out << kCsvHeader << (with_oracle ? ",oracle_qfi" : "") << "\n";
    for (const SweepRow *r : ordered) {
        out << num(r->theta) << ',' << num(r->qfi) << ',' << num(r->qfi_first_moment) << ','
            << num(r->qfi_second_moment) << ',' << num(r->wigner_fisher) << ','
            << (r->homodyne_opt ? num(*r->homodyne_opt) : "") << ',' << num(r->ratio) << ',' << r->method << ','
            << join(r->warnings, ";");
        if (with_oracle) {
            out << ',' << (r->oracle_qfi ? num(*r->oracle_qfi) : "");
        }
        out << "\n";
    }
}

void emit_csv(const std::vector<SweepRow> &rows, const std::filesystem::path &path, bool with_oracle) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    emit_csv(rows, f, with_oracle);
    f.flush();
    if (!f) {
        throw std::runtime_error("error while writing '" + path.string() + "'");
    }
}

int run_command(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Quantum Fisher information and optimal measurements for Gaussian models", "gaussfisher"};
    app.set_help_flag("--help", "print this help and exit");
    app.require_subcommand(1);

    QfiArgs qa;
    auto *qfi = app.add_subcommand("qfi", "quantum Fisher information at one model point");
    qfi->add_option("config", qa.config, "model config (JSON)")->required();
    qfi->add_option("--method", qa.method, "auto, general or isothermal")
        ->capture_default_str()
        ->check(CLI::IsMember({"auto", "general", "isothermal"}));
    add_tolerance_flags(qfi, qa.tol);

    SweepArgs sa;
    auto *sweep = app.add_subcommand("sweep", "evaluate a theta grid and write CSV");
    sweep->add_option("config", sa.config, "model config (JSON)")->required();
    sweep->add_option("--from", sa.from, "first theta")->required();
    sweep->add_option("--to", sa.to, "last theta")->required();
    sweep->add_option("--steps", sa.steps, "number of grid points")->required()->check(CLI::PositiveNumber);
    sweep->add_option("--out", sa.out_path, "CSV destination (stdout if omitted)");
    sweep->add_option("--jobs", sa.jobs, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    sweep->add_option("--outputs", sa.outputs, "columns to compute: qfi, wigner, homodyne_opt, oracle")
        ->delimiter(',')
        ->capture_default_str()
        ->check(CLI::IsMember({"qfi", "wigner", "homodyne_opt", "oracle"}));
    sweep->add_option("--cutoff", sa.cutoff, "Fock cutoff for the oracle column (0 = heuristic)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    sweep->add_option("--h", sa.oracle_h, "oracle finite-difference step")->capture_default_str();
    sweep->add_option("--oracle-memory-mb", sa.oracle_memory_mb, "memory budget bounding oracle workers")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sweep->add_option("--method", sa.method, "auto, general or isothermal")
        ->capture_default_str()
        ->check(CLI::IsMember({"auto", "general", "isothermal"}));
    add_tolerance_flags(sweep, sa.tol);

    SldArgs la;
    auto *sld = app.add_subcommand("sld", "SLD coefficients and photon-counting form");
    sld->add_option("config", la.config, "model config (JSON)")->required();
    add_tolerance_flags(sld, la.tol);

    HomodyneArgs ha;
    auto *hom = app.add_subcommand("homodyne", "isothermal frame and homodyne Fisher information");
    hom->add_option("config", ha.config, "model config (JSON)")->required();
    hom->add_option("--random-U", ha.random_u, "number of random symplectic U to test")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    hom->add_option("--seed", ha.seed, "first seed of the random U")->capture_default_str();
    hom->add_option("--squeeze-cap", ha.squeeze_cap, "squeezing bound of the random U")->capture_default_str();
    hom->add_option("--alpha", ha.alpha, "estimator coefficients for a passive-network plan")->delimiter(',');
    add_tolerance_flags(hom, ha.tol);

    OracleArgs oa;
    auto *orc = app.add_subcommand("oracle-check", "compare against the truncated Fock-space computation");
    orc->add_option("config", oa.config, "model config (JSON)")->required();
    orc->add_option("--cutoff", oa.cutoff, "Fock levels per mode (0 = heuristic)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    orc->add_option("--h", oa.h, "finite-difference step in theta")->capture_default_str()->check(CLI::PositiveNumber);
    orc->add_flag("--probe", oa.probe, "also evaluate at cutoff + 10");
    add_tolerance_flags(orc, oa.tol);

    std::vector<const char *> argv{"gaussfisher"};
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageError;
    }

    try {
        if (*qfi) {
            return cmd_qfi(qa, out);
        }
        if (*sweep) {
            return cmd_sweep(sa, out);
        }
        if (*sld) {
            return cmd_sld(la, out);
        }
        if (*hom) {
            return cmd_homodyne(ha, out);
        }
        return cmd_oracle(oa, out);
    } catch (const ConfigError &e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const DimensionError &e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const PreconditionError &e) {
        err << "precondition '" << e.flag() << "' failed: " << e.what() << "\n";
        return kNumericalError;
    } catch (const DomainError &e) {
        err << "precondition 'domain' failed: " << e.what() << "\n";
        return kNumericalError;
    } catch (const ConvergenceError &e) {
        err << "precondition 'convergence' failed: " << e.what() << "\n";
        return kNumericalError;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kIoError;
    }
}

} // namespace gaussfisher::cli
