#include "cvgauss/errors.hpp"
#include "cvgauss/gaussian.hpp"
#include "cvgauss/opo_model.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace cvgauss;

namespace {

constexpr double kPi = std::numbers::pi;

// Blocks of the reference state, evaluated independently of the library.
struct Reference {
    double a, b, c;
};
Reference reference_blocks() {
    const double r = std::asinh(std::sqrt(0.435));
    const double t1 = 1.17, t2 = 0.68;
    const double ch2 = std::cosh(r) * std::cosh(r), sh2 = std::sinh(r) * std::sinh(r);
    return {ch2 * t1 + sh2 * t2, sh2 * t1 + ch2 * t2, std::sinh(r) * std::cosh(r) * (t1 + t2)};
}

Matrix4 reference_matrix() {
    const auto [a, b, c] = reference_blocks();
    Matrix4 m = Matrix4::Zero();
    m(0, 0) = m(1, 1) = a;
    m(2, 2) = m(3, 3) = b;
    m(0, 2) = m(2, 0) = c;
    m(1, 3) = m(3, 1) = -c;
    return m;
}

// Random physical CMs: congruence of a thermal CM with a random symplectic.
CovarianceMatrix random_physical(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto s = thermal_cm(2.0 * u(rng), 2.0 * u(rng));
    s = apply_local_squeeze(s, std::polar(0.6 * u(rng), 2 * kPi * u(rng)), std::polar(0.6 * u(rng), 2 * kPi * u(rng)));
    s = apply_two_mode_squeeze(s, u(rng), 2 * kPi * u(rng));
    return apply_mixing(s, std::polar(u(rng), 2 * kPi * u(rng)));
}

}  // namespace

TEST(MakeCm, AcceptsVacuum) {
    const auto s = make_cm(0.5 * Matrix4::Identity());
    EXPECT_EQ(s.matrix(), 0.5 * Matrix4::Identity());
    EXPECT_EQ(CovarianceMatrix(), s);
}

TEST(MakeCm, RejectsAsymmetry) {
    Matrix4 m = 0.5 * Matrix4::Identity();
    m(0, 1) = 1e-3;
    EXPECT_THROW(make_cm(m), InvalidArgument);
}

TEST(MakeCm, SymmetrizesRoundOff) {
    Matrix4 m = reference_matrix();
    m(0, 2) += 1e-13;
    const auto s = make_cm(m);
    EXPECT_EQ(s(0, 2), s(2, 0));
}

TEST(MakeCm, RejectsNonFinite) {
    Matrix4 m = 0.5 * Matrix4::Identity();
    m(2, 2) = std::nan("");
    EXPECT_THROW(make_cm(m), InvalidArgument);
    m(2, 2) = INFINITY;
    EXPECT_THROW(make_cm(m), InvalidArgument);
}

TEST(MakeCm, AcceptsReferenceBlocks) {
    Matrix2 c = Matrix2::Zero();
    c(0, 0) = 1.462;
    c(1, 1) = -1.462;
    const auto s = CovarianceMatrix::from_blocks(1.975 * Matrix2::Identity(), 1.485 * Matrix2::Identity(), c);
    EXPECT_TRUE(is_physical(s));
    EXPECT_DOUBLE_EQ(s(3, 1), -1.462);
}

TEST(SymplecticEigenvalues, Vacuum) {
    const auto nu = symplectic_eigenvalues(CovarianceMatrix::vacuum());
    EXPECT_NEAR(nu.minus, 0.5, 1e-15);
    EXPECT_NEAR(nu.plus, 0.5, 1e-15);
}

TEST(SymplecticEigenvalues, ReferenceStateAgainstRealEigenproblem) {
    const auto s = make_cm(reference_matrix());
    const auto nu = symplectic_eigenvalues(s);
    const auto expected = oracle::symplectic_spectrum(reference_matrix());
    EXPECT_NEAR(nu.minus, expected[0], 1e-10);
    EXPECT_NEAR(nu.plus, expected[1], 1e-10);
    EXPECT_NEAR(nu.minus, 0.680, 5e-4);
    // Pure thermal spectrum survives the squeeze.
    EXPECT_NEAR(nu.minus, 0.68, 1e-12);
    EXPECT_NEAR(nu.plus, 1.17, 1e-12);
}

TEST(SymplecticEigenvalues, GenericRouteMatchesClosedForm) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        const auto s = random_physical(rng);
        const auto closed = symplectic_eigenvalues(s);
        const auto generic = symplectic_eigenvalues_generic(s);
        const auto expected = oracle::symplectic_spectrum(s.matrix());
        EXPECT_NEAR(closed.minus, expected[0], 1e-9 * expected[1]);
        EXPECT_NEAR(closed.plus, expected[1], 1e-9 * expected[1]);
        EXPECT_NEAR(generic.minus, expected[0], 1e-9 * expected[1]);
    }
}

TEST(SymplecticEigenvalues, RejectsIndefinite) {
    Matrix4 m = 0.5 * Matrix4::Identity();
    m(0, 0) = -0.1;
    EXPECT_THROW(symplectic_eigenvalues(make_cm(m)), UnphysicalState);
}

TEST(IsPhysical, Examples) {
    EXPECT_TRUE(is_physical(CovarianceMatrix::vacuum()));
    EXPECT_TRUE(is_physical(make_cm(reference_matrix())));
    EXPECT_FALSE(is_physical(make_cm(0.4 * 0.5 * Matrix4::Identity())));
}

TEST(IsPhysical, PositiveDefiniteButBelowUncertaintyBound) {
    // Both local variances fine, correlations too strong.
    Matrix4 m = reference_matrix();
    m(0, 2) = m(2, 0) = 1.7;
    m(1, 3) = m(3, 1) = -1.7;
    const auto s = make_cm(m);
    EXPECT_TRUE(is_positive_definite(s));
    EXPECT_FALSE(is_physical(s));
}

TEST(Purity, Examples) {
    EXPECT_NEAR(purity(CovarianceMatrix::vacuum()), 1.0, 1e-14);
    const auto s = make_cm(reference_matrix());
    EXPECT_NEAR(s.determinant(), 0.68 * 0.68 * 1.17 * 1.17, 1e-12);
    EXPECT_NEAR(s.determinant(), 0.633, 5e-4);
    EXPECT_NEAR(purity(s), 1.0 / (4.0 * 0.68 * 1.17), 1e-12);
    EXPECT_NEAR(purity(s), 0.314, 5e-4);
}

TEST(Purity, DeterminantHomogeneity) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
        const auto s = random_physical(rng);
        for (double k : {1.0, 1.3, 3.0}) {  // k >= 1 keeps the state physical
            const auto scaled = make_cm(k * s.matrix());
            EXPECT_NEAR(purity(scaled), purity(s) / (k * k), 1e-12 * purity(s));
        }
    }
}

TEST(PartialTranspose, Examples) {
    EXPECT_EQ(partial_transpose(CovarianceMatrix::vacuum()), CovarianceMatrix::vacuum());
    const auto s = make_cm(reference_matrix());
    const auto pt = partial_transpose(s);
    EXPECT_DOUBLE_EQ(pt(0, 2), s(0, 2));
    EXPECT_DOUBLE_EQ(pt(1, 3), -s(1, 3));
    EXPECT_GT(pt(1, 3), 0.0);
    EXPECT_DOUBLE_EQ(pt(3, 3), s(3, 3));
}

TEST(PartialTranspose, IsExactInvolution) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100; ++i) {
        const auto s = random_physical(rng);
        EXPECT_EQ(partial_transpose(partial_transpose(s)), s);
    }
}

TEST(SymplecticEigenvalues, ProductMatchesDeterminant) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        const auto s = random_physical(rng);
        const auto nu = symplectic_eigenvalues(s);
        const double lhs = nu.minus * nu.minus * nu.plus * nu.plus;
        EXPECT_NEAR(lhs, s.determinant(), 1e-10 * s.determinant());
    }
}

TEST(Marginal, Examples) {
    const auto v = marginal(CovarianceMatrix::vacuum(), ModeLabel::a);
    EXPECT_EQ(v.var_x, 0.5);
    EXPECT_EQ(v.var_y, 0.5);
    EXPECT_EQ(v.cov_xy, 0.0);
    const auto s = make_cm(reference_matrix());
    const auto a = marginal(s, ModeLabel::a);
    const auto b = marginal(s, ModeLabel::b);
    EXPECT_NEAR(a.var_x, 1.975, 5e-4);
    EXPECT_DOUBLE_EQ(a.var_x, a.var_y);
    EXPECT_NEAR(b.var_y, 1.485, 5e-4);
    EXPECT_THROW(marginal(s, ModeLabel::c), InvalidArgument);
}

TEST(CombineModes, VacuumIsInvariant) {
    for (auto mode : {ModeLabel::c, ModeLabel::d, ModeLabel::e, ModeLabel::f}) {
        const auto m = combine_modes(CovarianceMatrix::vacuum(), mode);
        EXPECT_NEAR(m.var_x, 0.5, 1e-15);
        EXPECT_NEAR(m.var_y, 0.5, 1e-15);
        EXPECT_NEAR(m.cov_xy, 0.0, 1e-15);
    }
    EXPECT_THROW(combine_modes(CovarianceMatrix::vacuum(), ModeLabel::a), InvalidArgument);
}

TEST(CombineModes, ReferenceSqueezedQuadratures) {
    const auto [a, b, c] = reference_blocks();
    const auto s = make_cm(reference_matrix());
    const auto mc = combine_modes(s, ModeLabel::c);
    const auto md = combine_modes(s, ModeLabel::d);
    // c = (a+b)/sqrt2: x_c carries +c, y_c carries -c.
    EXPECT_NEAR(mc.var_x, (a + b) / 2 + c, 1e-12);
    EXPECT_NEAR(mc.var_y, (a + b) / 2 - c, 1e-12);
    EXPECT_NEAR(mc.var_y, 0.268, 5e-4);
    EXPECT_NEAR(mc.var_x, 3.191, 5e-4);
    EXPECT_NEAR(md.var_x, 0.268, 5e-4);
    EXPECT_NEAR(md.var_y, 3.191, 5e-4);
    EXPECT_NEAR(mc.cov_xy, 0.0, 1e-12);
}

TEST(CombineModes, AuxiliaryCovariancesCarryCrossCorrelations) {
    // e = (i a + b)/sqrt2 rotates a by a quarter turn, so x_e = (-y_a + x_b)/sqrt2
    // and y_e = (x_a + y_b)/sqrt2.
    Matrix4 m = reference_matrix();
    m(0, 3) = m(3, 0) = 0.21;
    m(1, 2) = m(2, 1) = -0.13;
    const auto s = make_cm(m);
    const auto e = combine_modes(s, ModeLabel::e);
    const auto f = combine_modes(s, ModeLabel::f);
    EXPECT_NEAR(e.var_x, (m(1, 1) + m(2, 2) - 2 * m(1, 2)) / 2, 1e-12);
    EXPECT_NEAR(e.var_y, (m(0, 0) + m(3, 3) + 2 * m(0, 3)) / 2, 1e-12);
    EXPECT_NEAR(f.var_x, (m(1, 1) + m(2, 2) + 2 * m(1, 2)) / 2, 1e-12);
    EXPECT_NEAR(f.var_y, (m(0, 0) + m(3, 3) - 2 * m(0, 3)) / 2, 1e-12);
    EXPECT_NEAR(e.cov_xy, (-m(0, 1) + m(2, 3) - m(1, 3) + m(0, 2)) / 2, 1e-12);
}

TEST(CombineModes, BeamSplitterSumRule) {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 100; ++i) {
        const auto s = random_physical(rng);
        const Matrix2 sum_ab = s.block_a() + s.block_b();
        const Matrix2 cd = combine_modes(s, ModeLabel::c).matrix() + combine_modes(s, ModeLabel::d).matrix();
        EXPECT_LT((cd - sum_ab).cwiseAbs().maxCoeff(), 1e-12);
        // e, f mix quarter-turned a with b: the sum is R A R^T + B.
        const Matrix2 r = quarter_turn();
        const Matrix2 ef = combine_modes(s, ModeLabel::e).matrix() + combine_modes(s, ModeLabel::f).matrix();
        EXPECT_LT((ef - (r * s.block_a() * r.transpose() + s.block_b())).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(QuadratureVariance, Examples) {
    for (double t : {0.0, 0.3, 1.0, 2.5}) EXPECT_DOUBLE_EQ(quadrature_variance(SingleModeCM{}, t), 0.5);
    const auto mc = combine_modes(make_cm(reference_matrix()), ModeLabel::c);
    EXPECT_NEAR(quadrature_variance(mc, kPi / 2), 0.268, 5e-4);
    EXPECT_NEAR(quadrature_variance(mc, 0.0), 3.191, 5e-4);
}

TEST(QuadratureVariance, PiPeriodic) {
    const SingleModeCM m{1.3, 0.7, 0.25, 0.0, 0.0};
    for (double t = 0.0; t < 2 * kPi; t += 0.1) {
        EXPECT_NEAR(quadrature_variance(m, t), quadrature_variance(m, t + kPi), 1e-14);
    }
}

TEST(RotatedMoments, Examples) {
    const auto v = rotated_quadrature_moments(SingleModeCM{});
    EXPECT_DOUBLE_EQ(v.z_second, 0.5);
    EXPECT_DOUBLE_EQ(v.t_second, 0.5);
    const auto m = rotated_quadrature_moments(SingleModeCM{1.0, 2.0, 0.3, 0.0, 0.0});
    EXPECT_NEAR(m.z_second, 1.8, 1e-14);
    EXPECT_NEAR(m.t_second, 1.2, 1e-14);
    const auto a = rotated_quadrature_moments(marginal(make_cm(reference_matrix()), ModeLabel::a));
    EXPECT_NEAR(a.z_second, 1.975, 5e-4);
    EXPECT_DOUBLE_EQ(a.z_second, a.t_second);
}

TEST(RotatedMoments, IncludeMeans) {
    const auto m = rotated_quadrature_moments(SingleModeCM{0.5, 0.5, 0.0, 1.0, 0.0});
    EXPECT_NEAR(m.z_second, 1.0, 1e-14);
    EXPECT_NEAR(m.t_second, 1.0, 1e-14);
}

TEST(Wigner, Examples) {
    const std::vector<PhasePoint> pts{{0.0, 0.0}, {1.0, 0.0}};
    const auto w = wigner(SingleModeCM{}, pts);
    EXPECT_NEAR(w[0], 1.0 / kPi, 1e-14);
    EXPECT_NEAR(w[1], std::exp(-1.0) / kPi, 1e-14);
    const auto mc = combine_modes(make_cm(reference_matrix()), ModeLabel::c);
    const std::vector<PhasePoint> origin{{0.0, 0.0}};
    EXPECT_NEAR(wigner(mc, origin)[0], 1.0 / (2 * kPi * std::sqrt(mc.var_x * mc.var_y)), 1e-14);
}

TEST(Wigner, Normalization) {
    for (const SingleModeCM& m : {SingleModeCM{}, SingleModeCM{3.19, 0.268, 0.0, 0.0, 0.0},
                                  SingleModeCM{1.2, 0.6, 0.3, 0.4, -0.2}}) {
        const double smax = std::sqrt(std::max(m.var_x, m.var_y));
        const double lo = -6 * smax, hi = 6 * smax;
        const int n = 601;
        const double h = (hi - lo) / (n - 1);
        std::vector<PhasePoint> grid;
        grid.reserve(n * n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) grid.push_back({lo + i * h, lo + j * h});
        }
        const auto w = wigner(m, grid);
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const double wi = (i == 0 || i == n - 1) ? 0.5 : 1.0;
                const double wj = (j == 0 || j == n - 1) ? 0.5 : 1.0;
                total += wi * wj * w[i * n + j];
            }
        }
        EXPECT_NEAR(total * h * h, 1.0, 1e-4);
    }
}

TEST(ModeLabel, RoundTrip) {
    for (auto m : kAllModes) EXPECT_EQ(parse_mode_label(to_string(m)), m);
    EXPECT_FALSE(parse_mode_label("g").has_value());
}
