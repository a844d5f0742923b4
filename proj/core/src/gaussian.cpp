#include "cvgauss/gaussian.hpp"

#include "cvgauss/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cvgauss {

std::string_view to_string(ModeLabel mode) {
    switch (mode) {
        case ModeLabel::a: return "a";
        case ModeLabel::b: return "b";
        case ModeLabel::c: return "c";
        case ModeLabel::d: return "d";
        case ModeLabel::e: return "e";
        case ModeLabel::f: return "f";
    }
    return "?";
}

std::optional<ModeLabel> parse_mode_label(std::string_view text) {
    for (ModeLabel mode : kAllModes) {
        if (to_string(mode) == text) return mode;
    }
    return std::nullopt;
}

CovarianceMatrix::CovarianceMatrix() : m_(Matrix4::Identity() * kVacuumVariance) {}

CovarianceMatrix CovarianceMatrix::from_matrix(const Matrix4& entries) {
    if (!entries.allFinite()) {
        throw InvalidArgument("covariance matrix has non-finite entries");
    }
    const double scale = std::max(1.0, entries.cwiseAbs().maxCoeff());
    const double asym = (entries - entries.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTolerance * scale) {
        throw InvalidArgument("covariance matrix is not symmetric (max |M - M^T| = " +
                              std::to_string(asym) + ")");
    }
    return CovarianceMatrix(0.5 * (entries + entries.transpose()));
}

CovarianceMatrix CovarianceMatrix::from_congruence(const Matrix4& entries) {
    if (!entries.allFinite()) {
        throw InvalidArgument("covariance matrix has non-finite entries");
    }
    return CovarianceMatrix(0.5 * (entries + entries.transpose()));
}

CovarianceMatrix CovarianceMatrix::from_blocks(const Matrix2& a, const Matrix2& b, const Matrix2& c) {
    Matrix4 m;
    m.block<2, 2>(0, 0) = a;
    m.block<2, 2>(2, 2) = b;
    m.block<2, 2>(0, 2) = c;
    m.block<2, 2>(2, 0) = c.transpose();
    return from_matrix(m);
}

CovarianceMatrix make_cm(const Matrix4& entries) { return CovarianceMatrix::from_matrix(entries); }

Matrix2 SingleModeCM::matrix() const {
    Matrix2 m;
    m << var_x, cov_xy, cov_xy, var_y;
    return m;
}

bool SingleModeCM::is_physical(double tol) const {
    return var_x > 0.0 && var_y > 0.0 && determinant() >= 0.25 - tol;
}

SingleModeCM SingleModeCM::from_matrix(const Matrix2& m, double mean_x, double mean_y) {
    SingleModeCM out;
    out.var_x = m(0, 0);
    out.var_y = m(1, 1);
    out.cov_xy = 0.5 * (m(0, 1) + m(1, 0));
    out.mean_x = mean_x;
    out.mean_y = mean_y;
    return out;
}

bool is_positive_definite(const CovarianceMatrix& sigma) {
    Eigen::LLT<Matrix4> llt(sigma.matrix());
    return llt.info() == Eigen::Success && (sigma.matrix().diagonal().array() > 0.0).all();
}

SymplecticSpectrum symplectic_eigenvalues(const CovarianceMatrix& sigma) {
    if (!is_positive_definite(sigma)) {
        throw UnphysicalState("symplectic eigenvalues need a positive-definite covariance matrix");
    }
    const double det_sigma = sigma.determinant();
    const double delta = sigma.block_a().determinant() + sigma.block_b().determinant() +
                         2.0 * sigma.block_c().determinant();
    const double disc = std::sqrt(std::max(0.0, delta * delta - 4.0 * det_sigma));
    // Near nu- = nu+ the discriminant loses half the digits.
    if (disc < 1e-3 * delta) return symplectic_eigenvalues_generic(sigma);
    const double plus_sq = 0.5 * (delta + disc);
    // nu_-^2 nu_+^2 = det sigma; avoids cancellation in (delta - disc).
    const double minus_sq = det_sigma / plus_sq;
    return {std::sqrt(minus_sq), std::sqrt(plus_sq)};
}

SymplecticSpectrum symplectic_eigenvalues_generic(const CovarianceMatrix& sigma) {
    if (!is_positive_definite(sigma)) {
        throw UnphysicalState("symplectic eigenvalues need a positive-definite covariance matrix");
    }
    Matrix4 omega = Matrix4::Zero();
    omega(0, 1) = 1.0;
    omega(1, 0) = -1.0;
    omega(2, 3) = 1.0;
    omega(3, 2) = -1.0;
    // sigma^1/2 Omega sigma^1/2 is antisymmetric, so i times it is Hermitian
    // with eigenvalues +/- nu; this stays well conditioned at degeneracy.
    const Eigen::SelfAdjointEigenSolver<Matrix4> sqrt_solver(sigma.matrix());
    const Matrix4 root = sqrt_solver.operatorSqrt();
    const Eigen::Matrix4cd herm = std::complex<double>(0.0, 1.0) * (root * omega * root).cast<std::complex<double>>();
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(herm, Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();  // ascending: -nu+, -nu-, nu-, nu+
    return {0.5 * (ev(2) - ev(1)), 0.5 * (ev(3) - ev(0))};
}

bool is_physical(const CovarianceMatrix& sigma, double tol) {
    if (!is_positive_definite(sigma)) return false;
    return symplectic_eigenvalues(sigma).minus >= kVacuumVariance - tol;
}

double purity(const CovarianceMatrix& sigma) {
    if (!is_physical(sigma)) {
        throw UnphysicalState("purity is defined only for physical covariance matrices");
    }
    return 1.0 / (4.0 * std::sqrt(sigma.determinant()));
}

CovarianceMatrix partial_transpose(const CovarianceMatrix& sigma) {
    Matrix4 m = sigma.matrix();
    m.row(3) *= -1.0;
    m.col(3) *= -1.0;
    return CovarianceMatrix::from_congruence(m);
}

SingleModeCM marginal(const CovarianceMatrix& sigma, ModeLabel mode) {
    switch (mode) {
        case ModeLabel::a: return SingleModeCM::from_matrix(sigma.block_a());
        case ModeLabel::b: return SingleModeCM::from_matrix(sigma.block_b());
        default: throw InvalidArgument("marginal() takes mode a or b");
    }
}

Matrix2 quarter_turn() {
    Matrix2 r;
    r << 0.0, -1.0, 1.0, 0.0;
    return r;
}

Matrix2 rotation(double theta) {
    Matrix2 r;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    r << c, -s, s, c;
    return r;
}

SingleModeCM combine_modes(const CovarianceMatrix& sigma, ModeLabel mode) {
    Matrix2 a = sigma.block_a();
    const Matrix2 b = sigma.block_b();
    Matrix2 c = sigma.block_c();
    if (mode == ModeLabel::e || mode == ModeLabel::f) {
        const Matrix2 r = quarter_turn();
        a = r * a * r.transpose();
        c = r * c;
    }
    const Matrix2 cross = c + c.transpose();
    switch (mode) {
        case ModeLabel::c:
        case ModeLabel::e:
            return SingleModeCM::from_matrix(0.5 * (a + b + cross));
        case ModeLabel::d:
        case ModeLabel::f:
            return SingleModeCM::from_matrix(0.5 * (a + b - cross));
        default:
            throw InvalidArgument("combine_modes() takes mode c, d, e or f");
    }
}

SingleModeCM mode_cm(const CovarianceMatrix& sigma, ModeLabel mode) {
    if (mode == ModeLabel::a || mode == ModeLabel::b) return marginal(sigma, mode);
    return combine_modes(sigma, mode);
}

double quadrature_variance(const SingleModeCM& m, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return m.var_x * c * c + m.var_y * s * s + 2.0 * m.cov_xy * s * c;
}

RotatedMoments rotated_quadrature_moments(const SingleModeCM& m) {
    const double xx = m.var_x + m.mean_x * m.mean_x;
    const double yy = m.var_y + m.mean_y * m.mean_y;
    const double xy = m.cov_xy + m.mean_x * m.mean_y;
    return {0.5 * (xx + yy) + xy, 0.5 * (xx + yy) - xy};
}

std::vector<double> wigner(const SingleModeCM& m, std::span<const PhasePoint> points) {
    const double det = m.determinant();
    if (!(det > 0.0) || !(m.var_x > 0.0)) {
        throw InvalidArgument("wigner() needs a non-singular single-mode covariance matrix");
    }
    const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(det));
    // Inverse of [[vx, c], [c, vy]].
    const double ixx = m.var_y / det;
    const double iyy = m.var_x / det;
    const double ixy = -m.cov_xy / det;
    std::vector<double> out;
    out.reserve(points.size());
    for (const PhasePoint& p : points) {
        const double dx = p.x - m.mean_x;
        const double dy = p.y - m.mean_y;
        const double q = ixx * dx * dx + iyy * dy * dy + 2.0 * ixy * dx * dy;
        out.push_back(norm * std::exp(-0.5 * q));
    }
    return out;
}

}  // namespace cvgauss
