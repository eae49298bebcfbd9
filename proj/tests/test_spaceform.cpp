#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "imcf/spaceform.hpp"

using namespace imcf;

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST(TrigPair, MatchesCosSinCoshSinh) {
    for (double mu : {-2.0, -0.3, 0.0, 0.7, 1.9}) {
        EXPECT_DOUBLE_EQ(c_eps(SpaceForm::spherical, mu), std::cos(mu));
        EXPECT_DOUBLE_EQ(s_eps(SpaceForm::spherical, mu), std::sin(mu));
        EXPECT_DOUBLE_EQ(c_eps(SpaceForm::euclidean, mu), 1.0);
        EXPECT_DOUBLE_EQ(s_eps(SpaceForm::euclidean, mu), mu);
        EXPECT_DOUBLE_EQ(c_eps(SpaceForm::hyperbolic, mu), std::cosh(mu));
        EXPECT_DOUBLE_EQ(s_eps(SpaceForm::hyperbolic, mu), std::sinh(mu));
    }
}

TEST(TrigPair, PythagoreanIdentityPerSpaceForm) {
    // C^2 + eps S^2 = 1
    for (auto sf : {SpaceForm::spherical, SpaceForm::hyperbolic})
        for (double mu = -3.0; mu <= 3.0; mu += 0.25) {
            const double c = c_eps(sf, mu), s = s_eps(sf, mu);
            EXPECT_NEAR(c * c + epsilon(sf) * s * s, 1.0, 1e-12 * c * c);
        }
}

TEST(Spectrum, RejectsBadInput) {
    EXPECT_THROW(PrincipalSpectrum(SpaceForm::spherical, {}), DomainError);
    EXPECT_THROW(PrincipalSpectrum(SpaceForm::spherical, {{1.0, 0}}), DomainError);
    EXPECT_THROW(PrincipalSpectrum(SpaceForm::spherical, {{1.0, 1}, {1.0, 2}}), DomainError);
    EXPECT_THROW(PrincipalSpectrum(SpaceForm::spherical, {{NAN, 1}}), DomainError);
    EXPECT_THROW((void)space_form_from_epsilon(2), DomainError);
}

TEST(Spectrum, MeanCurvatureIsSumNotAverage) {
    PrincipalSpectrum s(SpaceForm::euclidean, {{2.0, 3}, {-1.0, 1}});
    EXPECT_EQ(s.n(), 4);
    EXPECT_EQ(s.g(), 2);
    EXPECT_DOUBLE_EQ(s.mean_curvature(), 5.0);
    EXPECT_DOUBLE_EQ(s.mean_per_direction(), 1.25);
    EXPECT_FALSE(s.equal_multiplicity());
}

TEST(ParallelPoint, SphereCircleExample) {
    // F = (1,0,0), N = (0,1,0), mu = pi/2 gives (0,1,0).
    const AmbientPoint f{1.0, 0.0, 0.0}, nrm{0.0, 1.0, 0.0};
    const auto p = parallel_point(f, nrm, kPi / 2, SpaceForm::spherical);
    EXPECT_NEAR(p[0], 0.0, 1e-15);
    EXPECT_NEAR(p[1], 1.0, 1e-15);
    EXPECT_NEAR(p[2], 0.0, 1e-15);
}

TEST(ParallelPoint, EuclideanAndHyperbolicByHand) {
    const auto e = parallel_point({0.0, 0.0, 1.0}, {0.0, 0.0, -1.0}, 0.25, SpaceForm::euclidean);
    EXPECT_DOUBLE_EQ(e[2], 0.75);
    const auto h = parallel_point({1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, 0.5, SpaceForm::hyperbolic);
    EXPECT_DOUBLE_EQ(h[0], std::cosh(0.5));
    EXPECT_DOUBLE_EQ(h[1], std::sinh(0.5));
    EXPECT_NEAR(quadric_defect(SpaceForm::hyperbolic, h), 0.0, 1e-14);
}

TEST(ParallelPoint, RejectsOffQuadricAndNonUnitNormals) {
    EXPECT_THROW((void)parallel_point({2.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, 0.1, SpaceForm::spherical), NotOnQuadric);
    EXPECT_THROW((void)parallel_point({1.0, 0.0, 0.0}, {0.0, 2.0, 0.0}, 0.1, SpaceForm::spherical), NotUnitNormal);
    EXPECT_THROW((void)parallel_point({1.0, 0.0, 0.0}, {0.6, 0.8, 0.0}, 0.1, SpaceForm::spherical), NotUnitNormal);
    // Lower sheet of the hyperboloid.
    EXPECT_THROW((void)parallel_point({-1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, 0.1, SpaceForm::hyperbolic), NotOnQuadric);
}

TEST(ParallelFrame, StaysOnQuadricWithUnitOrthogonalNormal) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ang(0.0, 2 * kPi), mus(-2.0, 2.0);
    for (int i = 0; i < 200; ++i) {
        const double a = ang(rng), b = ang(rng), mu = mus(rng);
        // Sphere S^3: F on a Clifford-type torus, N orthogonal.
        const AmbientPoint f{std::cos(a) / std::sqrt(2.0), std::sin(a) / std::sqrt(2.0), std::cos(b) / std::sqrt(2.0),
                             std::sin(b) / std::sqrt(2.0)};
        const AmbientPoint nrm{f[0], f[1], -f[2], -f[3]};
        const auto p = parallel_point(f, nrm, mu, SpaceForm::spherical);
        const auto q = parallel_normal(f, nrm, mu, SpaceForm::spherical);
        EXPECT_NEAR(quadric_defect(SpaceForm::spherical, p), 0.0, 1e-13);
        EXPECT_NEAR(ambient_inner(SpaceForm::spherical, q, q), 1.0, 1e-13);
        EXPECT_NEAR(ambient_inner(SpaceForm::spherical, p, q), 0.0, 1e-13);

        // Hyperboloid in L^4.
        const double r = mus(rng);
        const AmbientPoint fh{std::cosh(r), std::sinh(r) * std::cos(a), std::sinh(r) * std::sin(a), 0.0};
        const AmbientPoint nh{std::sinh(r), std::cosh(r) * std::cos(a), std::cosh(r) * std::sin(a), 0.0};
        const auto ph = parallel_point(fh, nh, mu, SpaceForm::hyperbolic);
        const auto qh = parallel_normal(fh, nh, mu, SpaceForm::hyperbolic);
        const double scale = std::max(1.0, ph[0] * ph[0]);
        EXPECT_NEAR(quadric_defect(SpaceForm::hyperbolic, ph), 0.0, 1e-13 * scale);
        EXPECT_NEAR(ambient_inner(SpaceForm::hyperbolic, qh, qh), 1.0, 1e-13 * scale);
        EXPECT_NEAR(ambient_inner(SpaceForm::hyperbolic, ph, qh), 0.0, 1e-13 * scale);
    }
}

TEST(ParallelCurvature, GeodesicSpheresShrinkByMu) {
    // A geodesic sphere of radius r with inward normal: k = cot r, coth r or
    // 1/r; its parallel at distance mu is the sphere of radius r - mu.
    for (double r : {0.4, 1.0, 1.3})
        for (double mu : {-0.3, 0.0, 0.2, 0.35}) {
            EXPECT_NEAR(parallel_curvature(1.0 / std::tan(r), mu, SpaceForm::spherical), 1.0 / std::tan(r - mu), 1e-12);
            EXPECT_NEAR(parallel_curvature(1.0 / std::tanh(r), mu, SpaceForm::hyperbolic), 1.0 / std::tanh(r - mu),
                        1e-12);
            EXPECT_NEAR(parallel_curvature(1.0 / r, mu, SpaceForm::euclidean), 1.0 / (r - mu), 1e-12);
        }
}

TEST(ParallelCurvature, FocalPointThrows) {
    EXPECT_THROW((void)parallel_curvature(1.0, kPi / 4, SpaceForm::spherical), FocalDegeneracy);
    EXPECT_THROW((void)parallel_curvature(1.0, 1.0, SpaceForm::euclidean), FocalDegeneracy);
    PrincipalSpectrum s(SpaceForm::euclidean, {{1.0, 2}});
    EXPECT_THROW((void)parallel_data(s, 1.0), FocalDegeneracy);
}

TEST(ParallelCurvature, HorosphereIsFixed) {
    for (double mu : {-3.0, 0.0, 4.0}) {
        EXPECT_NEAR(parallel_curvature(1.0, mu, SpaceForm::hyperbolic), 1.0, 1e-12);
        EXPECT_NEAR(parallel_curvature(-1.0, mu, SpaceForm::hyperbolic), -1.0, 1e-12);
    }
}

TEST(ParallelData, ShapeFactorIsMetricTimesCurvature) {
    PrincipalSpectrum s(SpaceForm::spherical, {{std::sqrt(2.0), 1}, {-std::sqrt(2.0) / 2, 1}});
    for (double mu : {-0.5, -0.1, 0.0, 0.3}) {
        const auto d = parallel_data(s, mu);
        ASSERT_EQ(d.size(), 2u);
        for (std::size_t j = 0; j < 2; ++j) {
            EXPECT_NEAR(d[j].shape_factor, d[j].metric_factor * d[j].curvature, 1e-13);
            const double den = std::cos(mu) - s.entries()[j].k * std::sin(mu);
            EXPECT_NEAR(d[j].metric_factor, den * den, 1e-15);
        }
    }
}

TEST(ParallelData, ExtendedMatchesDouble) {
    PrincipalSpectrum s(SpaceForm::hyperbolic, {{std::sqrt(2.0), 1}, {1.0 / std::sqrt(2.0), 1}});
    for (double mu : {-0.3, 0.0, 0.2}) {
        const auto a = parallel_data(s, mu);
        const auto b = parallel_data_extended(s, mu);
        for (std::size_t j = 0; j < 2; ++j) {
            EXPECT_NEAR(a[j].metric_factor, b[j].metric_factor, 1e-14);
            EXPECT_NEAR(a[j].curvature, b[j].curvature, 1e-14);
        }
    }
}

TEST(FlowProduct, LogAndProductAgree) {
    PrincipalSpectrum s(SpaceForm::spherical, {{3.0, 1}, {0.5, 2}, {-1.0 / 3, 1}, {-2.0, 2}});
    for (double mu : {-0.2, -0.05, 0.0, 0.05}) {
        EXPECT_NEAR(std::log(flow_product(s, mu)), log_flow_product(s, mu), 1e-13);
        EXPECT_EQ(product_residual(s, mu, log_flow_product(s, mu)) < 1e-13, true);
    }
    EXPECT_DOUBLE_EQ(flow_product(s, 0.0), 1.0);
}

TEST(FlowProduct, LogDerivativeIsMinusMeanCurvature) {
    PrincipalSpectrum s(SpaceForm::hyperbolic, {{2.0, 1}, {0.5, 1}});
    for (double mu : {-0.4, 0.0, 0.2}) {
        const double h = 1e-6;
        const double fd = (log_flow_product(s, mu + h) - log_flow_product(s, mu - h)) / (2 * h);
        EXPECT_NEAR(fd, -mean_curvature_parallel(s, mu), 1e-7);
    }
}

TEST(FlowProduct, NonPositiveFactorThrows) {
    PrincipalSpectrum s(SpaceForm::euclidean, {{1.0, 2}});
    EXPECT_THROW((void)log_flow_product(s, 1.5), FactorNonPositive);
}
