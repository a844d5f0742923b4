#include "cvgauss/fock.hpp"

#include "cvgauss/errors.hpp"

#include <array>
#include <cmath>

namespace cvgauss {
namespace {

constexpr double kNegativityTolerance = 1e-12;

// Photon-number generating function of a zero-mean Gaussian state:
//   G(z) = sum p(n) z^n = P(z)^{-1/2},
//   P(z) = det[(I + 2 sigma) + Z (I - 2 sigma)] / 4^N,
// where Z scales the two quadrature rows of mode k by z_k. P has degree <= 2
// in each z_k, so its coefficients follow from evaluations at z_k in {-1, 0, 1}.
template <int Dim>
double generating_determinant(const Eigen::Matrix<double, Dim, Dim>& sigma,
                              const std::array<double, Dim / 2>& z) {
    using Mat = Eigen::Matrix<double, Dim, Dim>;
    const Mat id = Mat::Identity();
    Mat m = id + 2.0 * sigma;
    const Mat diff = id - 2.0 * sigma;
    for (int row = 0; row < Dim; ++row) m.row(row) += z[row / 2] * diff.row(row);
    return m.determinant() / std::pow(4.0, Dim / 2);
}

// Coefficients of a quadratic from f(-1), f(0), f(1).
std::array<double, 3> quadratic_from_nodes(double fm, double f0, double fp) {
    return {f0, 0.5 * (fp - fm), 0.5 * (fp + fm) - f0};
}

// Power series of q(z)^{-1/2} for quadratic q, from q F' = -q' F / 2.
std::vector<double> inverse_sqrt_series(const std::array<double, 3>& q, int n_max) {
    std::vector<double> f(static_cast<std::size_t>(n_max) + 1, 0.0);
    f[0] = 1.0 / std::sqrt(q[0]);
    for (int n = 0; n < n_max; ++n) {
        double acc = 0.0;
        for (int j = 1; j <= 2 && j <= n + 1; ++j) {
            acc += q[j] * (n + 1 - 0.5 * j) * f[n + 1 - j];
        }
        f[n + 1] = -acc / (q[0] * (n + 1));
    }
    return f;
}

double checked_probability(double p) {
    if (p < -kNegativityTolerance) {
        throw UnphysicalState("negative photon-number probability " + std::to_string(p) +
                              "; covariance matrix is not physical");
    }
    return p < 0.0 ? 0.0 : p;
}

void check_cutoff(int n_max) {
    if (n_max < 0) throw InvalidArgument("photon-number cutoff must be non-negative");
}

}  // namespace

PhotonDistribution::PhotonDistribution(Eigen::MatrixXd probabilities, bool joint)
    : p_(std::move(probabilities)), joint_(joint) {}

Eigen::VectorXd PhotonDistribution::marginal_a() const {
    if (!joint_) throw InvalidArgument("marginal of a single-mode distribution");
    return p_.rowwise().sum();
}

Eigen::VectorXd PhotonDistribution::marginal_b() const {
    if (!joint_) throw InvalidArgument("marginal of a single-mode distribution");
    return p_.colwise().sum().transpose();
}

double mean_photon(const SingleModeCM& m) {
    return 0.5 * (m.var_x + m.var_y - 1.0) + 0.5 * (m.mean_x * m.mean_x + m.mean_y * m.mean_y);
}

double photon_number_variance(const SingleModeCM& m) {
    return 0.5 * (m.var_x * m.var_x + m.var_y * m.var_y + 2.0 * m.cov_xy * m.cov_xy) - 0.25;
}

double photon_number_covariance(const CovarianceMatrix& sigma) {
    const Matrix2 c = sigma.block_c();
    return 0.5 * c.squaredNorm();
}

double noise_reduction_factor(const CovarianceMatrix& sigma) {
    const SingleModeCM a = marginal(sigma, ModeLabel::a);
    const SingleModeCM b = marginal(sigma, ModeLabel::b);
    const double total = mean_photon(a) + mean_photon(b);
    if (!(total > 0.0)) {
        throw InvalidArgument("noise reduction factor undefined for zero mean photon number");
    }
    const double var_diff = photon_number_variance(a) + photon_number_variance(b) -
                            2.0 * photon_number_covariance(sigma);
    return var_diff / total;
}

PhotonDistribution single_mode_distribution(const SingleModeCM& m, int n_max) {
    check_cutoff(n_max);
    if (m.mean_x != 0.0 || m.mean_y != 0.0) {
        throw InvalidArgument("photon distributions are implemented for zero-mean states only");
    }
    if (!m.is_physical()) throw UnphysicalState("single-mode covariance matrix is not physical");
    const Matrix2 sigma = m.matrix();
    const auto q = quadratic_from_nodes(generating_determinant<2>(sigma, {-1.0}),
                                        generating_determinant<2>(sigma, {0.0}),
                                        generating_determinant<2>(sigma, {1.0}));
    const std::vector<double> f = inverse_sqrt_series(q, n_max);
    Eigen::MatrixXd p(n_max + 1, 1);
    for (int n = 0; n <= n_max; ++n) p(n, 0) = checked_probability(f[n]);
    return PhotonDistribution(std::move(p), false);
}

PhotonDistribution joint_distribution(const CovarianceMatrix& sigma, int n_max) {
    check_cutoff(n_max);
    if (!is_physical(sigma)) throw UnphysicalState("covariance matrix is not physical");
    const Matrix4& s = sigma.matrix();

    // P(z1, z2) = sum_{i,j<=2} c(i, j) z1^i z2^j.
    std::array<std::array<double, 3>, 3> nodes{};  // nodes[z1 + 1][z2 + 1]
    for (int u = -1; u <= 1; ++u) {
        for (int v = -1; v <= 1; ++v) {
            nodes[u + 1][v + 1] = generating_determinant<4>(s, {double(u), double(v)});
        }
    }
    std::array<std::array<double, 3>, 3> partial{};  // partial[z1 node][j]
    for (int u = 0; u < 3; ++u) partial[u] = quadratic_from_nodes(nodes[u][0], nodes[u][1], nodes[u][2]);
    std::array<std::array<double, 3>, 3> c{};
    for (int j = 0; j < 3; ++j) {
        const auto col = quadratic_from_nodes(partial[0][j], partial[1][j], partial[2][j]);
        for (int i = 0; i < 3; ++i) c[i][j] = col[i];
    }

    const int dim = n_max + 1;
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(dim, dim);
    const std::vector<double> first_row = inverse_sqrt_series({c[0][0], c[0][1], c[0][2]}, n_max);
    for (int m = 0; m < dim; ++m) f(0, m) = first_row[m];
    // Recurrence in z1: sum_{i,j} c(i,j) (n + 1 - i/2) f(n + 1 - i, m - j) = 0.
    for (int n = 0; n + 1 < dim; ++n) {
        for (int m = 0; m < dim; ++m) {
            double acc = 0.0;
            for (int i = 0; i <= 2; ++i) {
                if (n + 1 - i < 0) continue;
                for (int j = 0; j <= 2 && j <= m; ++j) {
                    if (i == 0 && j == 0) continue;
                    acc += c[i][j] * (n + 1 - 0.5 * i) * f(n + 1 - i, m - j);
                }
            }
            f(n + 1, m) = -acc / (c[0][0] * (n + 1));
        }
    }
    for (int n = 0; n < dim; ++n) {
        for (int m = 0; m < dim; ++m) f(n, m) = checked_probability(f(n, m));
    }
    return PhotonDistribution(std::move(f), true);
}

}  // namespace cvgauss
