#pragma once
// Run configuration for the cvgauss command-line pipeline.
//
// The config file holds key=value lines; '#' starts a comment line. Every key
// is optional except seed, which simulate requires. Unknown keys are errors.
// Defaults reproduce the reference OPO state and detection chain.
#include "cvgauss/opo_model.hpp"
#include "cvgauss/tomography.hpp"
#include "cvgauss/trace_io.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvgauss::cli {

/// Bad key, bad value or a missing mandatory setting. Maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    // State preparation.
    double nbar1 = 0.67;
    double nbar2 = 0.18;
    double nbar_s = 0.87;  ///< entangling photons, 2 sinh^2 r
    double phi_s = 0.0;
    double xi1 = 0.0, xi1_phase = 0.0;
    double xi2 = 0.0, xi2_phase = 0.0;
    double beta = 0.0, beta_phase = 0.0;
    double eta_channel = 1.0;
    std::optional<double> eta_channel_b;

    // Detection and acquisition.
    double eta = kDefaultDetectionEfficiency;
    double electronic_noise_db = kDefaultElectronicNoiseDb;
    std::size_t n_samples = kDefaultSamples;
    std::optional<std::uint64_t> seed;
    double lo_phase_offset = 0.0;  ///< rms of the simulated per-acquisition LO phase error, rad

    // Reconstruction and analysis.
    Scheme scheme = Scheme::six_mode;
    double phase_jitter = kDefaultPhaseJitter;  ///< LO stability assumed in reported errors, rad
    int kurtosis_bins = 100;
    int n_max = 40;
    int wigner_points = 81;
    double wigner_extent = 4.0;
    int theta_points = 181;
    TraceFormat format = TraceFormat::text;

    OpoParams opo_params() const;
    NoiseModel noise_model() const;
    /// Throws ConfigError naming the offending key.
    void validate() const;
};

/// Documented keys, in canonical order.
const std::vector<std::string>& config_keys();

RunConfig parse_config(const std::string& text);
RunConfig read_config(const std::filesystem::path& path);

/// Every key with its resolved value, one per line, in canonical order.
std::string canonical_config(const RunConfig& config);

/// FNV-1a 64-bit digest of the canonical rendering, as 16 hex digits.
std::string config_hash(const RunConfig& config);

std::string_view to_string(TraceFormat format);

}  // namespace cvgauss::cli
