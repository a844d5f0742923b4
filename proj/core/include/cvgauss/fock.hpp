#pragma once

#include "cvgauss/gaussian.hpp"

namespace cvgauss {

inline constexpr int kDefaultFockCutoff = 40;
inline constexpr double kTruncationWarningLevel = 0.01;

/// Photon-number probabilities truncated at n_max: a column vector for a
/// single mode, an (n_max+1) x (n_max+1) matrix p(n, m) for two modes.
class PhotonDistribution {
public:
    PhotonDistribution(Eigen::MatrixXd probabilities, bool joint);

    bool is_joint() const { return joint_; }
    int n_max() const { return static_cast<int>(p_.rows()) - 1; }
    const Eigen::MatrixXd& probabilities() const { return p_; }

    double single(int n) const { return p_(n, 0); }
    double joint(int n, int m) const { return p_(n, m); }

    double total_mass() const { return p_.sum(); }
    /// 1 - total mass; never silently renormalized away.
    double truncation_deficit() const { return 1.0 - total_mass(); }
    bool truncation_warning() const { return truncation_deficit() > kTruncationWarningLevel; }

    /// Marginal of mode a (rows) or b (columns); joint distributions only.
    Eigen::VectorXd marginal_a() const;
    Eigen::VectorXd marginal_b() const;

private:
    Eigen::MatrixXd p_;
    bool joint_;
};

/// <N> = (var_x + var_y - 1)/2 + (mean_x^2 + mean_y^2)/2.
double mean_photon(const SingleModeCM& m);

/// Var(N) of a zero-mean single-mode Gaussian state.
double photon_number_variance(const SingleModeCM& m);

/// Cov(N_a, N_b) of a zero-mean two-mode Gaussian state.
double photon_number_covariance(const CovarianceMatrix& sigma);

/// R = Var(N_a - N_b) / (<N_a> + <N_b>); R < 1 marks nonclassical
/// photon-number correlations. Throws InvalidArgument for the vacuum.
double noise_reduction_factor(const CovarianceMatrix& sigma);

/// p(n) = <n|rho|n>, n = 0..n_max, for a zero-mean Gaussian state.
PhotonDistribution single_mode_distribution(const SingleModeCM& m, int n_max = kDefaultFockCutoff);

/// p(n, m) = <n, m|rho|n, m>, n, m = 0..n_max, for a zero-mean two-mode state.
PhotonDistribution joint_distribution(const CovarianceMatrix& sigma, int n_max = kDefaultFockCutoff);

}  // namespace cvgauss
