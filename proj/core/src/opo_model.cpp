#include "cvgauss/opo_model.hpp"

#include "cvgauss/errors.hpp"

#include <cmath>

namespace cvgauss {
namespace {

// Reflection-type block that appears in squeezing symplectics.
Matrix2 squeeze_axis(double phi) {
    Matrix2 g;
    g << std::cos(phi), std::sin(phi), std::sin(phi), -std::cos(phi);
    return g;
}

CovarianceMatrix congruence(const Matrix4& s, const CovarianceMatrix& sigma) {
    return CovarianceMatrix::from_congruence(s * sigma.matrix() * s.transpose());
}

void check_eta(double eta) {
    if (!(eta > 0.0 && eta <= 1.0)) {
        throw InvalidArgument("channel transmission must lie in (0, 1], got " + std::to_string(eta));
    }
}

}  // namespace

void OpoParams::validate() const {
    if (!(nbar1 >= 0.0) || !(nbar2 >= 0.0)) {
        throw InvalidArgument("thermal photon numbers must be non-negative");
    }
    check_eta(eta_channel);
    if (eta_channel_b) check_eta(*eta_channel_b);
}

double squeeze_from_entangling_photons(double nbar_s) {
    if (!(nbar_s >= 0.0)) throw InvalidArgument("entangling photon number must be non-negative");
    return std::asinh(std::sqrt(0.5 * nbar_s));
}

double entangling_photons_from_squeeze(double r) {
    const double s = std::sinh(r);
    return 2.0 * s * s;
}

OpoParams reference_opo_params() {
    OpoParams p;
    p.nbar1 = 0.67;
    p.nbar2 = 0.18;
    p.two_mode_squeeze = squeeze_from_entangling_photons(0.87);
    return p;
}

CovarianceMatrix thermal_cm(double nbar1, double nbar2) {
    if (!(nbar1 >= 0.0) || !(nbar2 >= 0.0)) {
        throw InvalidArgument("thermal photon numbers must be non-negative");
    }
    Matrix4 m = Matrix4::Zero();
    m(0, 0) = m(1, 1) = nbar1 + 0.5;
    m(2, 2) = m(3, 3) = nbar2 + 0.5;
    return CovarianceMatrix::from_matrix(m);
}

Matrix4 two_mode_squeeze_symplectic(double r, double phi) {
    // a -> a cosh r + e^{i phi} b^dag sinh r, and symmetrically for b.
    const Matrix2 g = std::sinh(r) * squeeze_axis(phi);
    Matrix4 s = Matrix4::Identity() * std::cosh(r);
    s.block<2, 2>(0, 2) = g;
    s.block<2, 2>(2, 0) = g;
    return s;
}

Matrix4 local_squeeze_symplectic(std::complex<double> xi1, std::complex<double> xi2) {
    // a -> a cosh r + e^{i phi} a^dag sinh r.
    auto single = [](std::complex<double> xi) -> Matrix2 {
        const double r = std::abs(xi);
        return std::cosh(r) * Matrix2::Identity() + std::sinh(r) * squeeze_axis(std::arg(xi));
    };
    Matrix4 s = Matrix4::Zero();
    s.block<2, 2>(0, 0) = single(xi1);
    s.block<2, 2>(2, 2) = single(xi2);
    return s;
}

Matrix4 mixing_symplectic(std::complex<double> beta) {
    // a -> a cos t + e^{i phi} b sin t, b -> b cos t - e^{-i phi} a sin t.
    const double t = std::abs(beta);
    const Matrix2 rot = rotation(std::arg(beta));
    Matrix4 s = Matrix4::Identity() * std::cos(t);
    s.block<2, 2>(0, 2) = std::sin(t) * rot;
    s.block<2, 2>(2, 0) = -std::sin(t) * rot.transpose();
    return s;
}

CovarianceMatrix apply_two_mode_squeeze(const CovarianceMatrix& sigma, double r, double phi) {
    if (!(r >= 0.0)) throw InvalidArgument("two-mode squeezing magnitude must be non-negative");
    return congruence(two_mode_squeeze_symplectic(r, phi), sigma);
}

CovarianceMatrix apply_local_squeeze(const CovarianceMatrix& sigma,
                                     std::complex<double> xi1, std::complex<double> xi2) {
    return congruence(local_squeeze_symplectic(xi1, xi2), sigma);
}

CovarianceMatrix apply_mixing(const CovarianceMatrix& sigma, std::complex<double> beta) {
    return congruence(mixing_symplectic(beta), sigma);
}

CovarianceMatrix apply_loss(const CovarianceMatrix& sigma, double eta) {
    return apply_loss(sigma, eta, eta);
}

CovarianceMatrix apply_loss(const CovarianceMatrix& sigma, double eta_a, double eta_b) {
    check_eta(eta_a);
    check_eta(eta_b);
    const Eigen::Vector4d scale(std::sqrt(eta_a), std::sqrt(eta_a), std::sqrt(eta_b), std::sqrt(eta_b));
    Matrix4 m = scale.asDiagonal() * sigma.matrix() * scale.asDiagonal();
    m.diagonal() += 0.5 * Eigen::Vector4d(1.0 - eta_a, 1.0 - eta_a, 1.0 - eta_b, 1.0 - eta_b);
    return CovarianceMatrix::from_congruence(m);
}

CovarianceMatrix build_opo_state(const OpoParams& params) {
    params.validate();
    CovarianceMatrix sigma = thermal_cm(params.nbar1, params.nbar2);
    sigma = apply_local_squeeze(sigma, params.local_squeeze1, params.local_squeeze2);
    sigma = apply_two_mode_squeeze(sigma, std::abs(params.two_mode_squeeze),
                                   std::arg(params.two_mode_squeeze));
    sigma = apply_mixing(sigma, params.mixing);
    return apply_loss(sigma, params.eta_channel, params.eta_channel_b.value_or(params.eta_channel));
}

CovarianceMatrix reference_state() { return build_opo_state(reference_opo_params()); }

}  // namespace cvgauss
