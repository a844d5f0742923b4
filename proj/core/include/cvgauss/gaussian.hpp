#pragma once

// Two-mode Gaussian state kernel.
//
// Quadratures follow x = (a^dag + a)/sqrt(2), y = i(a^dag - a)/sqrt(2), so the
// vacuum has variance 1/2 and the uncertainty bound on symplectic eigenvalues
// is nu >= 1/2. The phase-space vector is ordered R = (x1, y1, x2, y2).

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cvgauss {

using Matrix2 = Eigen::Matrix2d;
using Matrix4 = Eigen::Matrix4d;

inline constexpr double kVacuumVariance = 0.5;
inline constexpr double kSymmetryTolerance = 1e-9;
inline constexpr double kPhysicalityTolerance = 1e-9;

/// Optical modes reachable with the polarization optics in front of the
/// homodyne detector: the OPO outputs a, b and the auxiliary combinations
/// c = (a+b)/sqrt2, d = (a-b)/sqrt2, e = (ia+b)/sqrt2, f = (ia-b)/sqrt2.
enum class ModeLabel { a, b, c, d, e, f };

inline constexpr std::array<ModeLabel, 6> kAllModes = {
    ModeLabel::a, ModeLabel::b, ModeLabel::c,
    ModeLabel::d, ModeLabel::e, ModeLabel::f};

std::string_view to_string(ModeLabel mode);
std::optional<ModeLabel> parse_mode_label(std::string_view text);

/// 4x4 covariance matrix of a two-mode state. Always exactly symmetric with
/// finite entries; positive definiteness is a separate, queryable property.
class CovarianceMatrix {
public:
    /// Vacuum, I/2.
    CovarianceMatrix();

    /// Validating factory: symmetrizes asymmetry up to 1e-9 relative,
    /// throws InvalidArgument beyond that or on non-finite entries.
    static CovarianceMatrix from_matrix(const Matrix4& entries);

    /// Build from blocks sigma = [[A, C], [C^T, B]].
    static CovarianceMatrix from_blocks(const Matrix2& a, const Matrix2& b, const Matrix2& c);

    static CovarianceMatrix vacuum() { return CovarianceMatrix(); }

    const Matrix4& matrix() const { return m_; }
    double operator()(int row, int col) const { return m_(row, col); }

    Matrix2 block_a() const { return m_.block<2, 2>(0, 0); }
    Matrix2 block_b() const { return m_.block<2, 2>(2, 2); }
    Matrix2 block_c() const { return m_.block<2, 2>(0, 2); }

    double determinant() const { return m_.determinant(); }

    /// Exact symmetrization without tolerance check; for results of
    /// congruences S sigma S^T whose asymmetry is pure round-off.
    static CovarianceMatrix from_congruence(const Matrix4& entries);

    friend bool operator==(const CovarianceMatrix& lhs, const CovarianceMatrix& rhs) {
        return lhs.m_ == rhs.m_;
    }

private:
    explicit CovarianceMatrix(const Matrix4& symmetric) : m_(symmetric) {}
    Matrix4 m_;
};

/// Same as CovarianceMatrix::from_matrix.
CovarianceMatrix make_cm(const Matrix4& entries);

/// Second moments and first moments of a single mode.
struct SingleModeCM {
    double var_x = kVacuumVariance;
    double var_y = kVacuumVariance;
    double cov_xy = 0.0;
    double mean_x = 0.0;
    double mean_y = 0.0;

    Matrix2 matrix() const;
    double determinant() const { return var_x * var_y - cov_xy * cov_xy; }
    bool is_physical(double tol = kPhysicalityTolerance) const;

    static SingleModeCM from_matrix(const Matrix2& m, double mean_x = 0.0, double mean_y = 0.0);
};

struct SymplecticSpectrum {
    double minus = 0.0;
    double plus = 0.0;
};

/// Symplectic eigenvalues via the two-mode closed form
/// 2 nu^2 = Delta -/+ sqrt(Delta^2 - 4 det sigma), Delta = det A + det B + 2 det C.
/// Throws UnphysicalState when sigma is not positive definite.
SymplecticSpectrum symplectic_eigenvalues(const CovarianceMatrix& sigma);

/// Generic route: moduli of the eigenvalues of i Omega sigma.
SymplecticSpectrum symplectic_eigenvalues_generic(const CovarianceMatrix& sigma);

bool is_positive_definite(const CovarianceMatrix& sigma);
bool is_physical(const CovarianceMatrix& sigma, double tol = kPhysicalityTolerance);

/// mu = 1 / (4 sqrt(det sigma)).
double purity(const CovarianceMatrix& sigma);

/// Delta sigma Delta with Delta = diag(1, 1, 1, -1).
CovarianceMatrix partial_transpose(const CovarianceMatrix& sigma);

/// Reduced state of mode a or b (zero means).
SingleModeCM marginal(const CovarianceMatrix& sigma, ModeLabel mode);

/// Single-mode CM of one of the auxiliary modes c, d, e, f.
SingleModeCM combine_modes(const CovarianceMatrix& sigma, ModeLabel mode);

/// Dispatches to marginal or combine_modes.
SingleModeCM mode_cm(const CovarianceMatrix& sigma, ModeLabel mode);

/// Quadrature rotation by pi/2, x -> -y, y -> x (the action of a -> i a).
Matrix2 quarter_turn();

/// Rotation matrix for the quadrature angle theta.
Matrix2 rotation(double theta);

/// Variance of x(theta) = x cos(theta) + y sin(theta).
double quadrature_variance(const SingleModeCM& m, double theta);

/// Second moments of z = (x+y)/sqrt2 and t = (x-y)/sqrt2.
struct RotatedMoments {
    double z_second = 0.0;
    double t_second = 0.0;
};
RotatedMoments rotated_quadrature_moments(const SingleModeCM& m);

struct PhasePoint {
    double x = 0.0;
    double y = 0.0;
};

/// Gaussian Wigner function evaluated at each point.
std::vector<double> wigner(const SingleModeCM& m, std::span<const PhasePoint> points);

}  // namespace cvgauss
