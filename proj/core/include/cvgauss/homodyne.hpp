#pragma once

// Synthetic single-homodyne acquisitions. Samples are already demodulated
// and normalized to shot-noise units (vacuum variance 1/2); the LO phase
// sweeps one full period on a uniform deterministic grid.

#include "cvgauss/gaussian.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cvgauss {

inline constexpr double kDefaultDetectionEfficiency = 0.88;
inline constexpr double kDefaultElectronicNoiseDb = 16.0;
inline constexpr std::size_t kDefaultSamples = 1'000'000;
inline constexpr double kDefaultRampPeriod = 0.2;  // seconds per 2 pi
inline constexpr int kTraceFormatVersion = 1;

/// Electronic-noise variance in shot-noise units, 0.5 * 10^(-db/10).
double electronic_variance_from_db(double db_below_shot);

struct NoiseModel {
    double eta = kDefaultDetectionEfficiency;  ///< detection efficiency in (0, 1]
    double v_el = 0.0;                         ///< additive electronic variance

    static NoiseModel from_db(double eta, double db_below_shot);
    void validate() const;
};

struct HomodyneSample {
    double theta = 0.0;  ///< LO phase, radians
    double x = 0.0;      ///< quadrature value
};

struct TraceMeta {
    std::optional<ModeLabel> mode;  ///< empty for the vacuum calibration trace
    std::size_t n_samples = 0;
    double eta = kDefaultDetectionEfficiency;
    double v_el = 0.0;
    double electronic_noise_db = 0.0;
    double ramp_period = kDefaultRampPeriod;
    std::uint64_t seed = 0;
    double calibration_scale = 1.0;
    double phase_jitter = 0.0;  ///< rms jitter injected after acquisition
    std::string config_hash;
    int format_version = kTraceFormatVersion;

    std::string mode_name() const;
};

struct HomodyneTrace {
    std::vector<HomodyneSample> samples;
    TraceMeta meta;

    std::size_t size() const { return samples.size(); }
};

/// Stable 64-bit mixing of a base seed with a stream name (FNV-1a + splitmix64).
std::uint64_t derive_seed(std::uint64_t base, std::string_view stream);

/// Measured variance at LO phase theta: eta V(theta) + (1 - eta)/2 + v_el.
double measured_variance(const SingleModeCM& m, const NoiseModel& noise, double theta);

/// Acquisition of one mode of the two-mode state sigma.
HomodyneTrace simulate_trace(const CovarianceMatrix& sigma, ModeLabel mode, const NoiseModel& noise,
                             std::size_t n_samples, std::uint64_t seed);

/// Acquisition of an arbitrary single-mode Gaussian state (zero mean unless given).
HomodyneTrace simulate_single_mode_trace(const SingleModeCM& m, const NoiseModel& noise,
                                         std::size_t n_samples, std::uint64_t seed);

/// Shot-noise calibration trace: the OPO output blocked.
HomodyneTrace simulate_vacuum_trace(const NoiseModel& noise, std::size_t n_samples, std::uint64_t seed);

/// Independent Normal(0, rms^2) perturbation of every recorded phase.
HomodyneTrace inject_phase_jitter(const HomodyneTrace& trace, double rms, std::uint64_t seed);

/// One common phase error per acquisition, drawn from Normal(0, rms^2):
/// models slow drift of the LO phase setting across a ramp.
HomodyneTrace inject_phase_offset(const HomodyneTrace& trace, double rms, std::uint64_t seed);

}  // namespace cvgauss
