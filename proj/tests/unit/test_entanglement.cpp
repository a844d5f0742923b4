#include "cvgauss/entanglement.hpp"
#include "cvgauss/errors.hpp"
#include "cvgauss/opo_model.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace cvgauss;

namespace {

constexpr double kPi = std::numbers::pi;
const double kRefR = std::asinh(std::sqrt(0.435));

// nu~_- from the real eigenproblem of the partially transposed matrix.
double ppt_oracle(const CovarianceMatrix& s) {
    Matrix4 m = s.matrix();
    m.row(3) *= -1.0;
    m.col(3) *= -1.0;
    return oracle::symplectic_spectrum(m)[0];
}

CovarianceMatrix local_rotation(const CovarianceMatrix& s, double t1, double t2) {
    Matrix4 r = Matrix4::Zero();
    r.block<2, 2>(0, 0) = rotation(t1);
    r.block<2, 2>(2, 2) = rotation(t2);
    return CovarianceMatrix::from_congruence(r * s.matrix() * r.transpose());
}

CovarianceMatrix symmetric_state(double nbar, double r) {
    return apply_two_mode_squeeze(thermal_cm(nbar, nbar), r);
}

}  // namespace

TEST(Ppt, Examples) {
    EXPECT_NEAR(ppt_minimum_eigenvalue(CovarianceMatrix::vacuum()), 0.5, 1e-14);
    const auto s = reference_state();
    EXPECT_NEAR(ppt_minimum_eigenvalue(s), ppt_oracle(s), 1e-10);
    EXPECT_NEAR(ppt_minimum_eigenvalue(s), 0.2475, 5e-4);
    // Closed-form ingredients.
    const double delta_t = s.block_a().determinant() + s.block_b().determinant() - 2 * s.block_c().determinant();
    const double a = s(0, 0), b = s(2, 2), c = s(0, 2);
    EXPECT_NEAR(delta_t, a * a + b * b + 2 * c * c, 1e-12);
    EXPECT_NEAR(delta_t, 10.3769, 1e-4);
}

TEST(Ppt, RejectsUnphysical) {
    EXPECT_THROW(ppt_minimum_eigenvalue(make_cm(0.2 * Matrix4::Identity())), UnphysicalState);
}

TEST(LogNegativity, Examples) {
    EXPECT_EQ(log_negativity(CovarianceMatrix::vacuum()), 0.0);
    const auto s = reference_state();
    EXPECT_NEAR(log_negativity(s), -std::log(2 * ppt_oracle(s)), 1e-10);
    EXPECT_NEAR(log_negativity(s), 0.703, 1e-3);
}

TEST(Duan, Examples) {
    const auto v = duan_criterion(CovarianceMatrix::vacuum());
    EXPECT_NEAR(v.value, 0.5, 1e-14);
    EXPECT_FALSE(v.witnessed());
    const auto s = reference_state();
    const auto d = duan_criterion(s);
    EXPECT_NEAR(d.value, (s(0, 0) + s(2, 2)) / 2 - s(0, 2), 1e-12);
    EXPECT_NEAR(d.value, 0.268, 5e-4);
    EXPECT_TRUE(d.witnessed());
    EXPECT_EQ(d.separable_bound, 0.5);
}

TEST(Epr, Examples) {
    const auto v = epr_criterion(CovarianceMatrix::vacuum());
    EXPECT_NEAR(v.a_given_b, 0.25, 1e-14);
    EXPECT_NEAR(v.b_given_a, 0.25, 1e-14);
    const auto s = reference_state();
    const double a = s(0, 0), b = s(2, 2), c = s(0, 2);
    const auto e = epr_criterion(s);
    EXPECT_NEAR(e.a_given_b, std::pow(a - c * c / b, 2), 1e-12);
    EXPECT_NEAR(e.b_given_a, std::pow(b - c * c / a, 2), 1e-12);
    EXPECT_NEAR(a - c * c / b, 0.536, 1e-3);
    EXPECT_NEAR(e.a_given_b, 0.287, 1e-3);
    EXPECT_NEAR(e.b_given_a, 0.162, 1e-3);
    EXPECT_EQ(e.bound, 0.25);
}

TEST(Epr, RejectsDegenerateConditioning) {
    Matrix4 m = 0.5 * Matrix4::Identity();
    m(2, 2) = 0.0;
    EXPECT_THROW(epr_criterion(make_cm(m)), InvalidArgument);
}

TEST(StandardForm, IsReachedByLocalOperations) {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        OpoParams p;
        p.nbar1 = 2 * u(rng);
        p.nbar2 = 2 * u(rng);
        p.two_mode_squeeze = std::polar(u(rng), 2 * kPi * u(rng));
        p.local_squeeze1 = std::polar(0.5 * u(rng), 2 * kPi * u(rng));
        p.local_squeeze2 = std::polar(0.5 * u(rng), 2 * kPi * u(rng));
        p.mixing = std::polar(u(rng), 2 * kPi * u(rng));
        const auto s = build_opo_state(p);
        const auto sf = standard_form(s);
        const auto back = sf.to_cm();
        // Local symplectic invariants: det A, det B, det C, det sigma.
        EXPECT_NEAR(sf.a * sf.a, s.block_a().determinant(), 1e-9 * sf.a * sf.a);
        EXPECT_NEAR(sf.b * sf.b, s.block_b().determinant(), 1e-9 * sf.b * sf.b);
        EXPECT_NEAR(sf.c1 * sf.c2, s.block_c().determinant(), 1e-9 * (1 + sf.a * sf.b));
        EXPECT_NEAR(back.determinant(), s.determinant(), 1e-9 * s.determinant());
        EXPECT_GE(sf.c1, std::abs(sf.c2) - 1e-12);
    }
}

TEST(Eof, Examples) {
    EXPECT_EQ(entanglement_of_formation(CovarianceMatrix::vacuum()), 0.0);
    const auto tmsv = apply_two_mode_squeeze(CovarianceMatrix::vacuum(), 0.6192);
    EXPECT_NEAR(entanglement_of_formation(tmsv), oracle::tmsv_entropy(0.6192), 1e-6);
    EXPECT_NEAR(entanglement_of_formation(tmsv), 1.270, 5e-4);
}

TEST(Eof, SymmetricClosedForm) {
    // 2 nu~_- = 0.48 on a symmetric state.
    const double x = 0.48;
    const double a = 1.0, c = a - x / 2;
    const auto s = StandardForm{a, a, c, -c}.to_cm();
    EXPECT_NEAR(2 * ppt_minimum_eigenvalue(s), x, 1e-12);
    EXPECT_NEAR(entanglement_of_formation(s), oracle::symmetric_eof(x), 1e-6);
    EXPECT_NEAR(entanglement_of_formation(s), 0.615, 5e-4);
}

TEST(Eof, SymmetricFamily) {
    for (double nbar : {0.0, 0.1, 0.5, 1.5}) {
        for (double r : {0.05, 0.2, 0.6, 1.2}) {
            const auto s = local_rotation(symmetric_state(nbar, r), 0.3, -1.1);
            EXPECT_NEAR(entanglement_of_formation(s), oracle::symmetric_eof(2 * ppt_oracle(s)), 1e-6)
                << "nbar=" << nbar << " r=" << r;
        }
    }
}

TEST(Eof, PureStatesEqualEntropyOfReduction) {
    for (double r : {0.1, 0.4, 0.9}) {
        auto s = apply_two_mode_squeeze(CovarianceMatrix::vacuum(), r, 0.7);
        s = apply_local_squeeze(s, std::polar(0.3, 0.2), std::polar(0.1, 2.0));
        const double n = std::sqrt(s.block_a().determinant()) - 0.5;
        EXPECT_NEAR(entanglement_of_formation(s), pure_state_entropy(n), 1e-6);
    }
}

TEST(Eof, BoundedByLogNegativityRelation) {
    // E_F is positive exactly when E_N is, on a grid of asymmetric states.
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            const double nbar = 0.1 + 0.2 * i;
            const double r = 0.02 + 0.06 * j;
            const auto s = apply_two_mode_squeeze(thermal_cm(nbar, 0.4 * nbar), r);
            const double en = log_negativity(s);
            const double ef = entanglement_of_formation(s);
            EXPECT_EQ(en > 0, ef > 0) << "nbar=" << nbar << " r=" << r;
            EXPECT_GE(ef, 0.0);
        }
    }
}

TEST(Eof, ReferenceStateBounds) {
    const auto s = reference_state();
    const double e = entanglement_of_formation(s);
    EXPECT_GT(e, 0.0);
    // sigma* >= TMSV(r) because the thermal core dominates I/2, so that pure
    // state is one admissible decomposition.
    EXPECT_LT(e, oracle::tmsv_entropy(kRefR));
    // Local loss cannot create entanglement.
    EXPECT_LT(entanglement_of_formation(apply_loss(s, 0.88)), e);
}

TEST(Consistency, SeparableGivesZero) {
    const auto s = apply_two_mode_squeeze(thermal_cm(1.0, 1.0), 0.1);
    ASSERT_GT(ppt_minimum_eigenvalue(s), 0.5);
    EXPECT_EQ(log_negativity(s), 0.0);
    EXPECT_EQ(entanglement_of_formation(s), 0.0);
}

TEST(Consistency, ProductStatesAreNeverWitnessed) {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        auto s = thermal_cm(u(rng), u(rng));
        s = apply_local_squeeze(s, std::polar(u(rng), 2 * kPi * u(rng)), std::polar(u(rng), 2 * kPi * u(rng)));
        EXPECT_GE(duan_criterion(s).value, 0.5 - 1e-12);
        const auto e = epr_criterion(s);
        EXPECT_GE(e.a_given_b, 0.25 - 1e-12);
        EXPECT_GE(e.b_given_a, 0.25 - 1e-12);
        EXPECT_EQ(log_negativity(s), 0.0);
    }
}

TEST(Invariance, LocalRotations) {
    const auto s = apply_local_squeeze(reference_state(), std::polar(0.2, 0.4), 0.1);
    const double nu = symplectic_eigenvalues(s).minus;
    const double nut = ppt_minimum_eigenvalue(s);
    const double en = log_negativity(s);
    const double ef = entanglement_of_formation(s);
    for (double t1 : {0.3, 1.4, 2.9}) {
        for (double t2 : {-0.7, 0.5}) {
            const auto rs = local_rotation(s, t1, t2);
            EXPECT_NEAR(symplectic_eigenvalues(rs).minus, nu, 1e-9);
            EXPECT_NEAR(ppt_minimum_eigenvalue(rs), nut, 1e-9);
            EXPECT_NEAR(log_negativity(rs), en, 1e-9);
            EXPECT_NEAR(entanglement_of_formation(rs), ef, 1e-9);
        }
    }
}

TEST(Invariance, VerdictOnReferenceFamily) {
    // Opposite rotations keep the x_a x_b / y_a y_b correlation pattern that
    // the Duan combination probes.
    for (double t : {0.0, 0.05, 0.1, 0.2}) {
        const auto rs = local_rotation(reference_state(), t, -t);
        EXPECT_TRUE(duan_criterion(rs).witnessed());
        EXPECT_EQ(epr_criterion(rs).witnessed(), epr_criterion(reference_state()).witnessed());
    }
}

TEST(Monotonicity, LogNegativityUnderLoss) {
    double previous = log_negativity(reference_state());
    for (int k = 1; k <= 90; ++k) {
        const double eta = 1.0 - 0.01 * k;
        const double en = log_negativity(apply_loss(reference_state(), eta));
        EXPECT_LE(en, previous + 1e-14) << "eta=" << eta;
        previous = en;
    }
}

TEST(PureStateEntropy, Values) {
    EXPECT_EQ(pure_state_entropy(0.0), 0.0);
    const double s2 = std::pow(std::sinh(0.6192), 2);
    EXPECT_NEAR(pure_state_entropy(s2), oracle::tmsv_entropy(0.6192), 1e-12);
}

TEST(FullReport, Vacuum) {
    const auto r = full_report(CovarianceMatrix::vacuum());
    EXPECT_TRUE(r.physical);
    EXPECT_NEAR(*r.nu_minus, 0.5, 1e-14);
    EXPECT_NEAR(*r.nu_tilde_minus, 0.5, 1e-14);
    EXPECT_NEAR(*r.purity, 1.0, 1e-14);
    EXPECT_EQ(*r.log_negativity, 0.0);
    EXPECT_EQ(*r.eof, 0.0);
    EXPECT_NEAR(r.duan.value, 0.5, 1e-14);
    EXPECT_NEAR(r.epr->a_given_b, 0.25, 1e-14);
    EXPECT_FALSE(r.uncertainties.has_value());
}

TEST(FullReport, Reference) {
    const auto s = reference_state();
    const auto r = full_report(s);
    EXPECT_NEAR(*r.nu_minus, 0.680, 5e-4);
    EXPECT_NEAR(*r.nu_plus, 1.170, 5e-4);
    EXPECT_NEAR(*r.purity, 0.314, 5e-4);
    EXPECT_NEAR(*r.nu_tilde_minus, 0.2475, 5e-4);
    EXPECT_NEAR(*r.log_negativity, 0.703, 1e-3);
    EXPECT_NEAR(*r.eof, entanglement_of_formation(s), 1e-12);
    EXPECT_NEAR(r.duan.value, 0.268, 5e-4);
}

TEST(FullReport, UncertaintyPropagation) {
    const auto s = reference_state();
    const Matrix4 err = Matrix4::Constant(0.004);
    const auto r = full_report(s, err);
    ASSERT_TRUE(r.uncertainties.has_value());
    // Oracle: forward differences on each independent entry, combined in quadrature.
    auto nu_minus = [](const Matrix4& m) { return oracle::symplectic_spectrum(m)[0]; };
    double acc = 0.0;
    for (int i = 0; i < 4; ++i) {
        for (int j = i; j < 4; ++j) {
            Matrix4 m = s.matrix();
            const double h = 1e-7;
            m(i, j) += h;
            if (i != j) m(j, i) += h;
            const double g = (nu_minus(m) - nu_minus(s.matrix())) / h;
            acc += std::pow(g * 0.004, 2);
        }
    }
    EXPECT_NEAR(r.uncertainties->nu_minus, std::sqrt(acc), 1e-4);
    EXPECT_GT(r.uncertainties->nu_minus, 0.001);
    EXPECT_LT(r.uncertainties->nu_minus, 0.02);
}

TEST(FullReport, UnphysicalKeepsDuan) {
    Matrix4 m = 0.3 * Matrix4::Identity();
    const auto r = full_report(make_cm(m));
    EXPECT_FALSE(r.physical);
    EXPECT_FALSE(r.nu_minus.has_value());
    EXPECT_FALSE(r.eof.has_value());
    EXPECT_FALSE(r.log_negativity.has_value());
    EXPECT_NEAR(r.duan.value, 0.3, 1e-14);
    EXPECT_TRUE(r.duan.witnessed());
}
