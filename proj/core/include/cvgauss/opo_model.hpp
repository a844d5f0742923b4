#pragma once

// Covariance matrices of the realistic below-threshold OPO output
//   rho_g = U(beta) S(zeta) LS(xi1, xi2) T LS^dag S^dag U^dag,
// followed by an optional Gaussian loss channel. States transform as
// sigma -> M sigma M^T where M is the Heisenberg-picture symplectic of each
// operator; the innermost operator acts first.

#include "cvgauss/gaussian.hpp"

#include <complex>
#include <optional>

namespace cvgauss {

struct OpoParams {
    double nbar1 = 0.0;                       ///< thermal photons, mode a
    double nbar2 = 0.0;                       ///< thermal photons, mode b
    std::complex<double> two_mode_squeeze{};  ///< zeta
    std::complex<double> local_squeeze1{};    ///< xi_1
    std::complex<double> local_squeeze2{};    ///< xi_2
    std::complex<double> mixing{};            ///< beta
    double eta_channel = 1.0;
    /// Per-mode transmission for mode b; defaults to eta_channel.
    std::optional<double> eta_channel_b;

    void validate() const;
};

/// Two-mode squeezing magnitude r such that 2 sinh^2 r = nbar_s.
double squeeze_from_entangling_photons(double nbar_s);
double entangling_photons_from_squeeze(double r);

/// Reference configuration: nbar1 = 0.67, nbar2 = 0.18, nbar_s = 0.87, all
/// phases zero, no local squeezing, no mixing, unit transmission.
OpoParams reference_opo_params();

CovarianceMatrix thermal_cm(double nbar1, double nbar2);

/// Symplectic matrices (Heisenberg action on R = (x1, y1, x2, y2)).
Matrix4 two_mode_squeeze_symplectic(double r, double phi);
Matrix4 local_squeeze_symplectic(std::complex<double> xi1, std::complex<double> xi2);
Matrix4 mixing_symplectic(std::complex<double> beta);

CovarianceMatrix apply_two_mode_squeeze(const CovarianceMatrix& sigma, double r, double phi = 0.0);
CovarianceMatrix apply_local_squeeze(const CovarianceMatrix& sigma,
                                     std::complex<double> xi1, std::complex<double> xi2);
CovarianceMatrix apply_mixing(const CovarianceMatrix& sigma, std::complex<double> beta);

/// sigma -> eta sigma + (1 - eta)/2 I.
CovarianceMatrix apply_loss(const CovarianceMatrix& sigma, double eta);
CovarianceMatrix apply_loss(const CovarianceMatrix& sigma, double eta_a, double eta_b);

CovarianceMatrix build_opo_state(const OpoParams& params);

/// sigma* of the reference configuration.
CovarianceMatrix reference_state();

}  // namespace cvgauss
