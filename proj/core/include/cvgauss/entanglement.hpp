#pragma once

#include "cvgauss/gaussian.hpp"

#include <optional>

namespace cvgauss {

/// Minimum symplectic eigenvalue of the partially transposed CM.
/// Throws UnphysicalState for unphysical input.
double ppt_minimum_eigenvalue(const CovarianceMatrix& sigma);

/// max(0, -ln 2 nu~_-), in nats.
double log_negativity(const CovarianceMatrix& sigma);

struct DuanResult {
    double value = 0.0;            ///< (Var x_d + Var y_c) / 2
    double separable_bound = 0.5;  ///< value < bound witnesses entanglement
    bool witnessed() const { return value < separable_bound; }
};
DuanResult duan_criterion(const CovarianceMatrix& sigma);

struct EprResult {
    double a_given_b = 0.0;  ///< V(x_a|x_b) V(y_a|y_b)
    double b_given_a = 0.0;  ///< V(x_b|x_a) V(y_b|y_a)
    double bound = 0.25;
    /// Verdict uses inference of a from measurements on b.
    bool witnessed() const { return a_given_b < bound; }
};
/// Throws InvalidArgument when a conditioning variance is not positive.
EprResult epr_criterion(const CovarianceMatrix& sigma);

/// Simon normal form reached by local symplectics: A = a I, B = b I,
/// C = diag(c1, c2) with c1 >= |c2|.
struct StandardForm {
    double a = 0.5;
    double b = 0.5;
    double c1 = 0.0;
    double c2 = 0.0;

    CovarianceMatrix to_cm() const;
};
StandardForm standard_form(const CovarianceMatrix& sigma);

/// Entanglement entropy (ebits) of a pure two-mode Gaussian state whose
/// reduced states carry `mean_photons` thermal photons.
double pure_state_entropy(double mean_photons);

/// Entanglement of formation in ebits. The optimal pure-state decomposition
/// is searched over pure CMs gamma <= sigma in standard form; the search
/// reduces to a bounded one-dimensional minimization. Separable input gives 0.
double entanglement_of_formation(const CovarianceMatrix& sigma);

struct MetricUncertainties {
    double nu_minus = 0.0;
    double nu_tilde_minus = 0.0;
    double log_negativity = 0.0;
    double duan = 0.0;
    double purity = 0.0;
};

struct EntanglementReport {
    bool physical = false;
    // Metrics below need a physical CM and are empty otherwise.
    std::optional<double> nu_minus;
    std::optional<double> nu_plus;
    std::optional<double> nu_tilde_minus;
    std::optional<double> purity;
    std::optional<double> log_negativity;
    std::optional<double> eof;
    // Reported regardless of physicality.
    DuanResult duan;
    std::optional<EprResult> epr;
    std::optional<MetricUncertainties> uncertainties;
};

/// Aggregates every metric; with `entry_errors`, propagates first-order
/// uncertainties through central finite differences of the ten independent
/// CM entries.
EntanglementReport full_report(const CovarianceMatrix& sigma,
                               const std::optional<Matrix4>& entry_errors = std::nullopt);

}  // namespace cvgauss
