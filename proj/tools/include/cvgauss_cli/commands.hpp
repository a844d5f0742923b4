#pragma once
// simulate -> reconstruct -> analyze. Each command writes into one output
// directory and merges its section into <out>/manifest.json. No output
// carries timestamps, so reruns with the same seed are byte-identical.
#include "cvgauss_cli/run_config.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

namespace cvgauss::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitMissingInput = 3,
    kExitUnphysical = 4,
};

/// A required trace, CM document or directory is absent or unreadable.
class MissingInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kManifestName = "manifest.json";
inline constexpr const char* kCmName = "cm.txt";
inline constexpr const char* kGaussianityName = "gaussianity.txt";
inline constexpr const char* kReportName = "report.txt";

/// "trace_<mode>.txt" or "trace_<mode>.bin"; the vacuum trace uses "vacuum".
std::string trace_file_name(std::string_view mode, TraceFormat format);

struct SimulateResult {
    std::string config_hash;
    int files_written = 0;
};

/// Seven traces (modes a..f and vacuum). Each mode draws from the substream
/// derive_seed(seed, mode name). Throws ConfigError without a seed.
SimulateResult cmd_simulate(const RunConfig& config, const std::filesystem::path& out);

struct ReconstructResult {
    bool physical = false;
    bool gaussian = true;
};

/// Reads the traces the scheme needs from trace_dir; writes cm.txt and
/// gaussianity.txt into out. Throws MissingInput naming an absent mode and
/// FormatError for version or config-hash mismatches.
ReconstructResult cmd_reconstruct(const RunConfig& config, const std::filesystem::path& trace_dir,
                                  const std::filesystem::path& out);

struct AnalyzeResult {
    bool physical = false;
};

/// Writes report.txt and the data tables (photon statistics, Wigner grids
/// of modes c and d, quadrature variance against LO phase). Metrics that
/// need a physical CM are written as "skipped" when it is not.
AnalyzeResult cmd_analyze(const RunConfig& config, const std::filesystem::path& cm_path,
                          const std::filesystem::path& out);

/// All three in sequence inside out; returns the exit code.
int cmd_pipeline(const RunConfig& config, const std::filesystem::path& out);

/// Command-line entry point; returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace cvgauss::cli
