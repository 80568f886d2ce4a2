#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gaussfisher::cli {

enum ExitCode : int {
    kOk = 0,
    kIoError = 1,
    kConfigError = 2,
    kNumericalError = 3,
    kUsageError = 64,
};

/// One θ point of a sweep. Optional columns are left empty in the CSV.
struct SweepRow {
    double theta = 0.0;
    double qfi = 0.0;
    double qfi_first_moment = 0.0;
    double qfi_second_moment = 0.0;
    double wigner_fisher = 0.0;
    std::optional<double> homodyne_opt;
    double ratio = 0.0;
    std::string method;
    std::vector<std::string> warnings;
    std::optional<double> oracle_qfi;
};

inline constexpr const char *kCsvHeader =
    "theta,qfi,qfi_first_moment,qfi_second_moment,wigner_fisher,homodyne_opt,ratio,method,warnings";

/// Writes the header and one line per row (12 significant digits). The
/// `oracle_qfi` column is appended only when `with_oracle` is set.
void emit_csv(const std::vector<SweepRow> &rows, std::ostream &out, bool with_oracle = false);

/// Same, to a file. Throws std::runtime_error if the file cannot be written.
void emit_csv(const std::vector<SweepRow> &rows, const std::filesystem::path &path, bool with_oracle = false);

/// Runs one invocation; `args` excludes the program name.
int run_command(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace gaussfisher::cli
