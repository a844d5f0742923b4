#pragma once

// Moment tomography from single-homodyne traces and covariance-matrix
// assembly from the six modes a..f (or five of them).
//
// With the LO phase uniform over one period, the sample averages of
//   2 x cos(theta - phi)                  -> <x_phi>
//   x^2 (1 + 2 cos 2(theta - phi))        -> <x_phi^2>
// are unbiased. Detection efficiency and electronic noise are removed at the
// moment level: <x_phi^2> = (raw - (1 - eta)/2 - v_el) / eta, <x_phi> = raw / sqrt(eta).

#include "cvgauss/gaussian.hpp"
#include "cvgauss/homodyne.hpp"

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace cvgauss {

inline constexpr double kDefaultPhaseJitter = 0.020;  // rad, LO phase stability

enum class ErrorSource { statistical, phase_jitter, combined };
std::string_view to_string(ErrorSource source);

struct Estimate {
    double value = 0.0;
    double error = 0.0;  ///< one standard error
    ErrorSource source = ErrorSource::statistical;
};

struct QuadratureMoments {
    Estimate mean;
    Estimate second_moment;
};

/// Rescales samples so the calibrated vacuum trace has variance 1/2 + v_el,
/// i.e. exactly 1/2 after electronic-noise subtraction. The scale is stored
/// in the metadata. Throws InvalidArgument when noise models differ or the
/// vacuum variance does not exceed v_el.
HomodyneTrace calibrate(const HomodyneTrace& trace, const HomodyneTrace& vacuum_trace);

/// Gain that calibrate() would apply.
double calibration_scale(const HomodyneTrace& vacuum_trace);

struct BinKurtosis {
    int bin = 0;
    std::size_t count = 0;
    double excess_kurtosis = 0.0;
    double threshold = 0.0;  ///< 5 sqrt(24 / count)
    bool pass = true;
};

struct GaussianityReport {
    std::vector<BinKurtosis> bins;
    bool pass = true;
    double worst_ratio = 0.0;  ///< max |kappa| / threshold
};

/// Excess kurtosis of x in equal-width LO-phase bins.
GaussianityReport kurtosis_check(const HomodyneTrace& trace, int n_phase_bins);

/// |mean of exp(2 i theta)|; must stay below 3/sqrt(N) for the kernels to be unbiased.
double phase_nonuniformity(const HomodyneTrace& trace);

/// Efficiency-compensated first and second moment of x_phi.
QuadratureMoments estimate_moments(const HomodyneTrace& trace, double phi, double eta);

/// Everything measured on one mode.
struct ModeMoments {
    Estimate mean_x, mean_y;
    Estimate second_x, second_y;  ///< <x^2>, <y^2>
    Estimate cov_xy;              ///< (<z^2> - <t^2>)/2 - <x><y>
    std::size_t n_samples = 0;

    Estimate var_x() const;
    Estimate var_y() const;
    SingleModeCM cm() const;
    /// Slope of the phase-dependent variance at phi = 0 and pi/2, |dV/dphi| = 2 |cov|.
    double phase_sensitivity() const { return 2.0 * std::abs(cov_xy.value); }
};

ModeMoments reconstruct_single_mode(const HomodyneTrace& trace, double eta);

enum class Scheme { six_mode, five_mode_drop_f, five_mode_drop_e };
std::string_view to_string(Scheme scheme);
std::optional<Scheme> parse_scheme(std::string_view text);
std::vector<ModeLabel> required_modes(Scheme scheme);

struct ReconstructedCM {
    CovarianceMatrix cm;
    Matrix4 entry_errors = Matrix4::Zero();        ///< reported errors (statistical + phase)
    Matrix4 statistical_errors = Matrix4::Zero();  ///< tomographic errors only
    std::array<std::array<ErrorSource, 4>, 4> error_sources{};
    std::set<ModeLabel> mode_inventory;
    std::map<ModeLabel, GaussianityReport> gaussianity;
    std::map<ModeLabel, ModeMoments> moments;
    Scheme scheme = Scheme::six_mode;
    bool physical = false;
    double calibration_scale = 1.0;
    double phase_jitter = kDefaultPhaseJitter;
};

/// Builds sigma from per-mode moments. Blocks A, B from modes a and b;
/// sigma13, sigma24 from c, d; sigma14, sigma23 from e and f or, in the
/// five-mode schemes, through <x_f^2> = <y_a^2> + <x_b^2> - <x_e^2> and
/// <y_f^2> = <x_a^2> + <y_b^2> - <y_e^2> (and the mirror identities for e).
/// Errors on sigma14, sigma23 add the response of the e/f variances to an LO
/// phase error of `phase_jitter` rad. Unphysical results are flagged, not repaired.
ReconstructedCM assemble_cm(const std::map<ModeLabel, ModeMoments>& modes, Scheme scheme,
                            double phase_jitter = kDefaultPhaseJitter);

struct ReconstructionOptions {
    Scheme scheme = Scheme::six_mode;
    double eta = kDefaultDetectionEfficiency;
    double phase_jitter = kDefaultPhaseJitter;
    int kurtosis_bins = 100;
};

/// Calibrate, check Gaussianity, estimate moments and assemble.
ReconstructedCM reconstruct(const std::map<ModeLabel, HomodyneTrace>& traces, const HomodyneTrace& vacuum,
                            const ReconstructionOptions& options);

/// Optional repair: sigma + t I with the smallest t >= 0 that makes it physical.
CovarianceMatrix nearest_physical(const CovarianceMatrix& sigma);

}  // namespace cvgauss
