#include "cvgauss/entanglement.hpp"

#include "cvgauss/errors.hpp"

#include <boost/math/tools/minima.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace cvgauss {
namespace {

void require_physical(const CovarianceMatrix& sigma, const char* what) {
    if (!is_physical(sigma)) {
        throw UnphysicalState(std::string(what) + " needs a physical covariance matrix");
    }
}

double conditional_variance(double var_u, double cov_uv, double var_v) {
    if (!(var_v > 0.0)) throw InvalidArgument("EPR criterion: conditioning variance must be positive");
    return var_u - cov_uv * cov_uv / var_v;
}

// Local symplectic that maps a single-mode block A to sqrt(det A) I.
Matrix2 normalizing_symplectic(const Matrix2& block) {
    Eigen::SelfAdjointEigenSolver<Matrix2> eig(block);
    if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0) {
        throw UnphysicalState("local block is not positive definite");
    }
    const Matrix2 inv_sqrt = eig.eigenvectors() *
                             eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                             eig.eigenvectors().transpose();
    return std::sqrt(std::sqrt(block.determinant())) * inv_sqrt;
}

// Coefficients (c0, c1, c2) of a polynomial in lambda.
using Quadratic = std::array<double, 3>;

// min over lambda in [0, lambda_max] of the squared correlation coefficient
// of X = U - lambda u u^T.
double min_sq_correlation_along(const Matrix2& upper, double cos_t, double sin_t, double lambda_max) {
    const double n0 = upper(0, 1), n1 = cos_t * sin_t;
    const double p0 = upper(0, 0), p1 = cos_t * cos_t;
    const double q0 = upper(1, 1), q1 = sin_t * sin_t;
    auto rho_sq = [&](double lambda) {
        const double n = n0 - lambda * n1;
        const double p = p0 - lambda * p1;
        const double q = q0 - lambda * q1;
        return n * n / (p * q);
    };
    double best = std::min(rho_sq(0.0), rho_sq(lambda_max));

    // Stationary points of log rho^2: -2 n1 P Q + p1 N Q + q1 N P = 0.
    auto mul = [](double a0, double a1, double b0, double b1) -> Quadratic {
        return {a0 * b0, -(a0 * b1 + a1 * b0), a1 * b1};
    };
    const Quadratic pq = mul(p0, p1, q0, q1);
    const Quadratic nq = mul(n0, n1, q0, q1);
    const Quadratic np = mul(n0, n1, p0, p1);
    Quadratic poly{};
    for (int k = 0; k < 3; ++k) poly[k] = -2.0 * n1 * pq[k] + p1 * nq[k] + q1 * np[k];

    auto consider = [&](double lambda) {
        if (lambda > 0.0 && lambda < lambda_max) best = std::min(best, rho_sq(lambda));
    };
    const double scale = std::abs(poly[0]) + std::abs(poly[1]) + std::abs(poly[2]);
    if (std::abs(poly[2]) > 1e-14 * scale) {
        const double disc = poly[1] * poly[1] - 4.0 * poly[2] * poly[0];
        if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            const double qq = -0.5 * (poly[1] + std::copysign(sq, poly[1]));
            if (qq != 0.0) {
                consider(qq / poly[2]);
                consider(poly[0] / qq);
            }
        }
    } else if (std::abs(poly[1]) > 1e-14 * scale) {
        consider(-poly[0] / poly[1]);
    }
    // N can cross zero inside the interval, giving rho = 0 exactly.
    if (n1 != 0.0) consider(n0 / n1);
    return best;
}

}  // namespace

double ppt_minimum_eigenvalue(const CovarianceMatrix& sigma) {
    require_physical(sigma, "ppt_minimum_eigenvalue");
    return symplectic_eigenvalues(partial_transpose(sigma)).minus;
}

double log_negativity(const CovarianceMatrix& sigma) {
    return std::max(0.0, -std::log(2.0 * ppt_minimum_eigenvalue(sigma)));
}

DuanResult duan_criterion(const CovarianceMatrix& sigma) {
    const SingleModeCM c = combine_modes(sigma, ModeLabel::c);
    const SingleModeCM d = combine_modes(sigma, ModeLabel::d);
    return {0.5 * (d.var_x + c.var_y), 0.5};
}

EprResult epr_criterion(const CovarianceMatrix& sigma) {
    const Matrix4& s = sigma.matrix();
    EprResult out;
    out.a_given_b = conditional_variance(s(0, 0), s(0, 2), s(2, 2)) *
                    conditional_variance(s(1, 1), s(1, 3), s(3, 3));
    out.b_given_a = conditional_variance(s(2, 2), s(0, 2), s(0, 0)) *
                    conditional_variance(s(3, 3), s(1, 3), s(1, 1));
    return out;
}

CovarianceMatrix StandardForm::to_cm() const {
    Matrix4 m = Matrix4::Zero();
    m(0, 0) = m(1, 1) = a;
    m(2, 2) = m(3, 3) = b;
    m(0, 2) = m(2, 0) = c1;
    m(1, 3) = m(3, 1) = c2;
    return CovarianceMatrix::from_matrix(m);
}

StandardForm standard_form(const CovarianceMatrix& sigma) {
    const Matrix2 sa = normalizing_symplectic(sigma.block_a());
    const Matrix2 sb = normalizing_symplectic(sigma.block_b());
    const Matrix2 c = sa * sigma.block_c() * sb.transpose();

    Eigen::JacobiSVD<Matrix2> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix2 u = svd.matrixU();
    Matrix2 v = svd.matrixV();
    Eigen::Vector2d sv = svd.singularValues();
    // Keep both local transformations proper rotations; a reflection is
    // absorbed into the sign of the second singular value.
    if (u.determinant() < 0.0) {
        u.col(1) *= -1.0;
        sv(1) *= -1.0;
    }
    if (v.determinant() < 0.0) {
        v.col(1) *= -1.0;
        sv(1) *= -1.0;
    }
    StandardForm out;
    out.a = std::sqrt(sigma.block_a().determinant());
    out.b = std::sqrt(sigma.block_b().determinant());
    out.c1 = sv(0);
    out.c2 = sv(1);
    return out;
}

double pure_state_entropy(double mean_photons) {
    const double n = std::max(0.0, mean_photons);
    if (n == 0.0) return 0.0;
    return ((n + 1.0) * std::log1p(n) - n * std::log(n)) / std::numbers::ln2;
}

double entanglement_of_formation(const CovarianceMatrix& sigma) {
    require_physical(sigma, "entanglement_of_formation");
    if (ppt_minimum_eigenvalue(sigma) >= kVacuumVariance) return 0.0;

    // In standard form the x and y quadratures decouple. A pure CM without
    // x-y correlations is fixed by its x block X, with y block (4X)^{-1}.
    // gamma <= sigma  <=>  (4 sigma_y)^{-1} <= X <= sigma_x, and the
    // entanglement of gamma grows with |corr(X)|. At the optimum sigma_x - X
    // is rank one: X = sigma_x - lambda u u^T with u = (cos t, sin t).
    const StandardForm sf = standard_form(sigma);
    Matrix2 upper;
    upper << sf.a, sf.c1, sf.c1, sf.b;
    Matrix2 sigma_y;
    sigma_y << sf.a, sf.c2, sf.c2, sf.b;
    const Matrix2 lower = 0.25 * sigma_y.inverse();
    const Matrix2 gap = upper - lower;
    Matrix2 adj;
    adj << gap(1, 1), -gap(0, 1), -gap(1, 0), gap(0, 0);
    const double det_gap = std::max(0.0, gap.determinant());

    auto best_sq_correlation = [&](double t) {
        const double ct = std::cos(t), st = std::sin(t);
        const Eigen::Vector2d u(ct, st);
        const double denom = u.dot(adj * u);
        double lambda_max;
        if (denom > 1e-15 * (std::abs(adj.trace()) + 1e-300)) {
            lambda_max = det_gap / denom;
        } else {
            lambda_max = std::max(0.0, u.dot(gap * u));
        }
        return min_sq_correlation_along(upper, ct, st, lambda_max);
    };

    // Coarse scan to bracket the global minimum, then Brent refinement.
    constexpr int kScan = 720;
    const double step = std::numbers::pi / kScan;
    int best_index = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kScan; ++i) {
        const double value = best_sq_correlation(i * step);
        if (value < best_value) {
            best_value = value;
            best_index = i;
        }
    }
    const double lo = (best_index - 1) * step;
    const double hi = (best_index + 1) * step;
    // 30 bits: parameter tolerance ~1e-9 relative.
    const auto refined = boost::math::tools::brent_find_minima(best_sq_correlation, lo, hi, 30);
    const double rho_sq = std::clamp(std::min(best_value, refined.second), 0.0, 1.0 - 1e-16);

    // Reduced-state photon number of the optimal pure state:
    // sqrt(det A_gamma) = 1 / (2 sqrt(1 - rho^2)).
    const double root = std::sqrt(1.0 - rho_sq);
    const double photons = 0.5 * rho_sq / (root * (1.0 + root));
    return pure_state_entropy(photons);
}

EntanglementReport full_report(const CovarianceMatrix& sigma, const std::optional<Matrix4>& entry_errors) {
    EntanglementReport report;
    report.duan = duan_criterion(sigma);
    try {
        report.epr = epr_criterion(sigma);
    } catch (const InvalidArgument&) {
        report.epr.reset();
    }
    report.physical = is_physical(sigma);
    if (!report.physical) return report;

    const SymplecticSpectrum nu = symplectic_eigenvalues(sigma);
    report.nu_minus = nu.minus;
    report.nu_plus = nu.plus;
    report.nu_tilde_minus = ppt_minimum_eigenvalue(sigma);
    report.purity = purity(sigma);
    report.log_negativity = std::max(0.0, -std::log(2.0 * *report.nu_tilde_minus));
    report.eof = entanglement_of_formation(sigma);

    if (entry_errors) {
        using Metric = std::function<double(const CovarianceMatrix&)>;
        const std::array<Metric, 5> metrics = {
            [](const CovarianceMatrix& s) { return symplectic_eigenvalues(s).minus; },
            [](const CovarianceMatrix& s) { return symplectic_eigenvalues(partial_transpose(s)).minus; },
            [](const CovarianceMatrix& s) {
                return std::max(0.0, -std::log(2.0 * symplectic_eigenvalues(partial_transpose(s)).minus));
            },
            [](const CovarianceMatrix& s) { return duan_criterion(s).value; },
            [](const CovarianceMatrix& s) { return 1.0 / (4.0 * std::sqrt(s.determinant())); },
        };
        std::array<double, 5> variance{};
        constexpr double h = 1e-6;
        for (int i = 0; i < 4; ++i) {
            for (int j = i; j < 4; ++j) {
                const double err = (*entry_errors)(i, j);
                if (err == 0.0) continue;
                Matrix4 up = sigma.matrix();
                Matrix4 down = sigma.matrix();
                up(i, j) += h;
                down(i, j) -= h;
                if (i != j) {
                    up(j, i) += h;
                    down(j, i) -= h;
                }
                const auto s_up = CovarianceMatrix::from_matrix(up);
                const auto s_down = CovarianceMatrix::from_matrix(down);
                for (std::size_t k = 0; k < metrics.size(); ++k) {
                    const double grad = (metrics[k](s_up) - metrics[k](s_down)) / (2.0 * h);
                    variance[k] += grad * grad * err * err;
                }
            }
        }
        MetricUncertainties u;
        u.nu_minus = std::sqrt(variance[0]);
        u.nu_tilde_minus = std::sqrt(variance[1]);
        u.log_negativity = std::sqrt(variance[2]);
        u.duan = std::sqrt(variance[3]);
        u.purity = std::sqrt(variance[4]);
        report.uncertainties = u;
    }
    return report;
}

}  // namespace cvgauss
