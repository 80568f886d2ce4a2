#include <doctest.h>

#include <gaussfisher_cli/cli.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using gaussfisher::cli::run_command;
namespace cli = gaussfisher::cli;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_command(args, out, err);
    return {code, out.str(), err.str()};
}

std::string config(const char *name) { return (std::filesystem::path(GAUSSFISHER_CONFIG_DIR) / name).string(); }

std::vector<std::string> lines(const std::string &s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string line; std::getline(in, line);) {
        out.push_back(line);
    }
    return out;
}

} // namespace

TEST_CASE("qfi subcommand") {
    const auto r = run({"qfi", config("thermal.json")});
    CHECK(r.code == cli::kOk);
    CHECK(r.out.find("# kernel_tol=1e-09 iso_tol=1e-09") == 0);
    CHECK(r.out.find("qfi=0.333333333333\n") != std::string::npos);
    CHECK(r.out.find("wigner=0.25\n") != std::string::npos);
    CHECK(r.out.find("method=general") != std::string::npos);

    const auto iso = run({"qfi", config("phase.json"), "--method", "isothermal"});
    CHECK(iso.code == cli::kOk);
    CHECK(iso.out.find("method=isothermal") != std::string::npos);

    const auto bad = run({"qfi", config("thermal.json"), "--method", "isothermal"});
    CHECK(bad.code == cli::kNumericalError);
    CHECK(bad.err.find("derivative_preserves_nu") != std::string::npos);
}

TEST_CASE("usage errors") {
    CHECK(run({}).code == cli::kUsageError);
    CHECK(run({"frobnicate"}).code == cli::kUsageError);
    CHECK(run({"sweep", config("thermal.json")}).code == cli::kUsageError);
    CHECK(run({"qfi", config("thermal.json"), "--kernel-tol", "-1"}).code == cli::kUsageError);
    CHECK(run({"--help"}).code == cli::kOk);
}

TEST_CASE("config errors") {
    const auto missing = run({"qfi", "/nonexistent/model.json"});
    CHECK(missing.code == cli::kConfigError);
    const auto tmp = std::filesystem::temp_directory_path() / "gaussfisher_cli_bad.json";
    {
        std::ofstream f(tmp);
        f << R"({"family": "thermal", "theta": 2, "extra": 1})";
    }
    CHECK(run({"qfi", tmp.string()}).code == cli::kConfigError);
    std::filesystem::remove(tmp);
}

TEST_CASE("sweep writes CSV") {
    const auto r = run({"sweep", config("thermal.json"), "--from", "1.5", "--to", "3", "--steps", "4", "--jobs", "2"});
    REQUIRE(r.code == cli::kOk);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() == 5);
    CHECK(ls[0] == cli::kCsvHeader);
    CHECK(ls[1].rfind("1.5,0.8,", 0) == 0);
    CHECK(ls[1].find("homodyne:derivative_preserves_nu") != std::string::npos);

    const auto outside = run({"sweep", config("thermal.json"), "--from", "0.5", "--to", "2", "--steps", "3"});
    CHECK(outside.code == cli::kNumericalError);
    CHECK(outside.err.find("'domain'") != std::string::npos);

    const auto edge = run({"sweep", config("thermal.json"), "--from", "1", "--to", "1", "--steps", "1",
                           "--outputs", "qfi"});
    REQUIRE(edge.code == cli::kOk);
    CHECK(edge.out.find("near-singular") != std::string::npos);
}

TEST_CASE("sweep to a file and with the oracle column") {
    const auto path = std::filesystem::temp_directory_path() / "gaussfisher_cli_sweep.csv";
    const auto r = run({"sweep", config("phase.json"), "--from", "0", "--to", "0.5", "--steps", "2", "--out",
                        path.string(), "--outputs", "qfi,homodyne_opt,oracle", "--cutoff", "30"});
    REQUIRE(r.code == cli::kOk);
    CHECK(r.out.find("wrote 2 rows") != std::string::npos);
    std::ifstream f(path);
    std::stringstream buf;
    buf << f.rdbuf();
    const auto ls = lines(buf.str());
    REQUIRE(ls.size() == 3);
    CHECK(ls[0] == std::string(cli::kCsvHeader) + ",oracle_qfi");
    std::filesystem::remove(path);

    const auto unwritable = run({"sweep", config("thermal.json"), "--from", "2", "--to", "2", "--steps", "1",
                                 "--out", "/nonexistent/dir/out.csv"});
    CHECK(unwritable.code == cli::kIoError);
}

TEST_CASE("emit_csv leaves optional columns empty and sorts by theta") {
    std::vector<cli::SweepRow> rows(2);
    rows[0].theta = 2.0;
    rows[0].method = "general";
    rows[1].theta = 1.0;
    rows[1].method = "isothermal";
    rows[1].homodyne_opt = 0.5;
    rows[1].warnings = {"a", "b"};
    std::ostringstream out;
    cli::emit_csv(rows, out);
    const auto ls = lines(out.str());
    REQUIRE(ls.size() == 3);
    CHECK(ls[1] == "1,0,0,0,0,0.5,0,isothermal,a;b");
    CHECK(ls[2] == "2,0,0,0,0,,0,general,");
}

TEST_CASE("sld, homodyne and oracle-check subcommands") {
    const auto sld = run({"sld", config("thermal.json")});
    CHECK(sld.code == cli::kOk);
    CHECK(sld.out.find("photon-counting form: SLD") != std::string::npos);

    const auto shift = run({"sld", config("shift.json")});
    CHECK(shift.out.find("none (linear model)") != std::string::npos);

    const auto hom = run({"homodyne", config("phase_mixed.json"), "--random-U", "50", "--alpha", "1,2"});
    CHECK(hom.code == cli::kOk);
    CHECK(hom.out.find("homodyne_opt/qfi = 0.625") != std::string::npos);
    CHECK(hom.out.find("above_bound=0") != std::string::npos);
    CHECK(hom.out.find("plan V") != std::string::npos);

    const auto hom_bad = run({"homodyne", config("thermal.json")});
    CHECK(hom_bad.code == cli::kNumericalError);

    const auto orc = run({"oracle-check", config("explicit.json"), "--cutoff", "30", "--h", "1e-4"});
    CHECK(orc.code == cli::kOk);
    CHECK(orc.out.find("relative_difference") != std::string::npos);
    CHECK(orc.out.find("# cutoff=30 h=0.0001") != std::string::npos);
}
