#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "imcf/closedform.hpp"
#include "imcf/serialize.hpp"

using namespace imcf;

namespace {

constexpr double kPi = std::numbers::pi;
const double kR2 = std::sqrt(2.0);

std::vector<FlowProfile> catalog_profiles() {
    std::vector<FlowProfile> out;
    out.push_back(solve_euclidean(2, 2, 1.0));
    out.push_back(solve_euclidean(3, 2, 2.0));
    out.push_back(solve_horosphere(2, 1.0));
    out.push_back(solve_horosphere(3, -1.0));
    out.push_back(solve_hyperbolic_umbilic(2, 0.5));
    out.push_back(solve_hyperbolic_umbilic(2, 2.0));
    out.push_back(solve_hyperbolic_cylinder(1, kR2));
    out.push_back(solve_hyperbolic_cylinder(2, 3.0));
    for (int g : {1, 2, 3, 4, 6})
        for (int m : {1, 2}) out.push_back(solve_sphere(g, m, sphere_k1_mean_convex_bound(g) + 0.7));
    return out;
}

std::vector<double> catalog_grid(const FlowProfile& p) { return profile_grid(p, -12.0, 12.0, 400); }

// Chebyshev T_g(x) by the three-term recurrence.
double chebyshev(int g, double x) {
    double t0 = 1.0, t1 = x;
    if (g == 0) return t0;
    for (int i = 1; i < g; ++i) {
        const double t2 = 2.0 * x * t1 - t0;
        t0 = t1;
        t1 = t2;
    }
    return t1;
}

}  // namespace

TEST(Euclidean, RadiusLawExample) {
    const auto p = solve_euclidean(2, 2, 1.0);
    EXPECT_NEAR(p.mu(2.0 * std::log(2.0)), -1.0, 1e-15);
    EXPECT_EQ(p.mu(0.0), 0.0);
    EXPECT_EQ(p.classification(), Classification::eternal);
    EXPECT_FALSE(p.t_star().has_value());
    EXPECT_EQ(p.flow_case(), FlowCase::euclid_sphere);
}

TEST(Euclidean, CylinderBaseShrinksBackwards) {
    const auto p = solve_euclidean(3, 2, 2.0);
    EXPECT_EQ(p.flow_case(), FlowCase::euclid_cylinder);
    EXPECT_NEAR(p.mu(-40.0), 2.0 * (1.0 - std::exp(-20.0)), 1e-15);
    for (double t : {-6.0, -2.0, 0.0, 1.5}) {
        const auto k = flow_curvatures(p, t);
        EXPECT_NEAR(k[0].k, std::exp(-t / 2) / 2, 1e-12 * std::exp(-t / 2));
        EXPECT_EQ(k[1].k, 0.0);
    }
}

TEST(Euclidean, RejectsBadParameters) {
    EXPECT_THROW((void)solve_euclidean(2, 3, 1.0), DomainError);
    EXPECT_THROW((void)solve_euclidean(2, 2, 0.0), DomainError);
}

TEST(Horosphere, LinearMu) {
    const auto p = solve_horosphere(2, -1.0);
    EXPECT_DOUBLE_EQ(p.mu(1.0), 0.5);
    EXPECT_EQ(p.mu(0.0), 0.0);
    EXPECT_EQ(p.classification(), Classification::eternal);
    EXPECT_THROW((void)solve_horosphere(2, 0.5), DomainError);
}

TEST(Horosphere, ProductEquationForBothSigns) {
    for (double k : {1.0, -1.0}) {
        const auto p = solve_horosphere(2, k);
        for (double t = -5.0; t <= 5.0; t += 0.125) {
            const double mu = p.mu(t);
            EXPECT_NEAR(std::pow(std::cosh(mu) - k * std::sinh(mu), 2), std::exp(t), 1e-12 * std::exp(t));
        }
    }
}

TEST(Umbilic, ImmortalIntervalAndValues) {
    const auto p = solve_hyperbolic_umbilic(2, 0.5);
    EXPECT_EQ(p.classification(), Classification::immortal);
    EXPECT_NEAR(p.interval().lo, std::log(0.75), 1e-15);
    EXPECT_NEAR(p.interval().lo, -0.287682, 1e-6);
    EXPECT_TRUE(std::isinf(p.interval().hi));

    const auto q = solve_hyperbolic_umbilic(2, 2.0);
    EXPECT_EQ(q.classification(), Classification::eternal);
    const auto [ch, sh] = q.umbilic_cosh_sinh_mu(0.0);
    EXPECT_NEAR(ch, 1.0, 1e-15);
    EXPECT_NEAR(sh, 0.0, 1e-15);
}

TEST(Umbilic, DegeneratesToTotallyGeodesicAtLowerEnd) {
    const auto p = solve_hyperbolic_umbilic(2, 0.5);
    const double t = p.interval().lo + 1e-10;
    EXPECT_LT(p.q(t), 1e-9);
    EXPECT_LT(std::abs(flow_mean_curvature(p, t)), 1e-4);
    const auto d = parallel_data(p.spectrum(), *p.mu_at_finite_endpoint());
    EXPECT_NEAR(d[0].metric_factor, 0.75, 1e-12);
    EXPECT_NEAR(d[0].shape_factor, 0.0, 1e-12);
}

TEST(Umbilic, SignPolicy) {
    EXPECT_THROW((void)solve_hyperbolic_umbilic(2, -0.5), NonMeanConvex);
    EXPECT_NO_THROW((void)solve_hyperbolic_umbilic(2, -0.5, true));
    EXPECT_THROW((void)solve_hyperbolic_umbilic(2, 1.0), DomainError);
    EXPECT_THROW((void)solve_hyperbolic_umbilic(2, 0.0), DomainError);
}

TEST(Umbilic, PrintedAndEvaluatedFormsAgree) {
    for (double k : {0.5, 2.0, -0.5, -3.0}) {
        const auto p = solve_hyperbolic_umbilic(3, k, true);
        for (double t : {-0.3, 0.0, 0.7, 4.0}) {
            if (!p.contains(t)) continue;
            const double mu = p.mu(t);
            const auto [ch, sh] = p.umbilic_cosh_sinh_mu(t);
            EXPECT_NEAR(ch, std::cosh(mu), 1e-9 * ch);
            EXPECT_NEAR(sh, std::sinh(mu), 1e-9 * ch);
        }
    }
}

TEST(HypCylinder, Examples) {
    const auto p = solve_hyperbolic_cylinder(1, kR2);
    EXPECT_EQ(p.mu(0.0), 0.0);
    EXPECT_EQ(p.classification(), Classification::eternal);
    for (double t = -5.0; t <= 5.0; t += 0.25) {
        const double mu = p.mu(t);
        EXPECT_NEAR(std::cosh(2 * mu), -8 * std::exp(t) + 3 * std::sqrt(1 + 8 * std::exp(2 * t)),
                    1e-12 * std::cosh(2 * mu));
        const auto k = flow_curvatures(p, t);
        EXPECT_NEAR(k[0].k * k[1].k, 1.0, 1e-12);
    }
    const double mu1 = p.mu(1.0);
    const double printed = std::sqrt(-4 * std::exp(1.0) + 1.5 * std::sqrt(1 + 8 * std::exp(2.0)) + 0.5);
    EXPECT_NEAR(std::cosh(mu1), printed, 1e-12);
}

TEST(HypCylinder, PrintedDoubleAngleFormsAgree) {
    const auto p = solve_hyperbolic_cylinder(2, 3.0);
    for (double t : {-8.0, -1.0, 0.5, 9.0}) {
        const double mu = p.mu(t);
        const auto [c2, s2] = p.cylinder_cosh_sinh_2mu(t);
        EXPECT_NEAR(c2 * c2 - s2 * s2, 1.0, 1e-10 * c2 * c2);
        EXPECT_NEAR(c2, std::cosh(2 * mu), 1e-10 * c2);
        EXPECT_NEAR(s2, std::sinh(2 * mu), 1e-10 * c2);
    }
    EXPECT_THROW((void)solve_hyperbolic_cylinder(1, 1.0), DomainError);
}

TEST(Sphere, HopfCollapseTime) {
    const auto p = solve_sphere(2, 1, kR2);
    EXPECT_NEAR(p.a(), kR2 / 4, 1e-16);
    EXPECT_NEAR(*p.t_star(), std::log(3 * kR2 / 4), 1e-15);
    EXPECT_NEAR(*p.t_star(), 0.5 * std::log(9.0 / 8.0), 1e-15);
    EXPECT_NEAR(*p.t_star(), 0.05889151782, 1e-11);
    EXPECT_EQ(p.classification(), Classification::ancient);
}

TEST(Sphere, GreatSphereLimitForUmbilicCap) {
    const auto p = solve_sphere(1, 2, 1.0);
    EXPECT_NEAR(*p.t_star(), std::log(2.0), 1e-15);
    const double mu_star = *p.mu_at_finite_endpoint();
    EXPECT_NEAR(std::cos(mu_star), 1.0 / kR2, 1e-12);
    EXPECT_NEAR(mu_star, -kPi / 4, 1e-12);
}

TEST(Sphere, InitialTrigValues) {
    for (int g : {1, 2, 3, 4, 6}) {
        const auto p = solve_sphere(g, 1, sphere_k1_mean_convex_bound(g) + 1.0);
        const auto [c, s] = p.sphere_cos_sin_gmu(0.0);
        EXPECT_NEAR(c, 1.0, 1e-15);
        EXPECT_NEAR(s, 0.0, 1e-15);
    }
}

TEST(Sphere, MeanConvexityIsRequired) {
    try {
        (void)solve_sphere(4, 1, 2.0);
        FAIL() << "expected NonMeanConvex";
    } catch (const NonMeanConvex& e) {
        EXPECT_NE(std::string(e.what()).find("2.414"), std::string::npos);
    }
    EXPECT_NO_THROW((void)solve_sphere(4, 1, 1.0 + kR2 + 1e-6));
    EXPECT_THROW((void)solve_sphere(5, 1, 3.0), DomainError);
}

TEST(Sphere, MeanCurvatureVanishesAtCollapse) {
    const auto p = solve_sphere(2, 1, kR2);
    const double ts = *p.t_star();
    EXPECT_LT(std::abs(flow_mean_curvature(p, ts - 2e-12)), 1e-4);
    // H^t = n sqrt(q) e^{-t/m} on the sphere.
    for (double t : {-3.0, -0.5, 0.0, 0.05}) {
        EXPECT_NEAR(flow_mean_curvature(p, t), 2.0 * std::sqrt(p.q(t)) * std::exp(-t), 1e-12);
    }
    EXPECT_EQ(p.q(ts), 0.0);
}

TEST(Interval, EndpointExclusion) {
    const auto p = solve_sphere(2, 1, kR2);
    const double ts = *p.t_star();
    EXPECT_THROW((void)p.mu(ts), OutOfInterval);
    EXPECT_THROW((void)p.mu(ts - 5e-13), OutOfInterval);
    EXPECT_THROW((void)p.mu(ts + 1.0), OutOfInterval);
    EXPECT_NO_THROW((void)p.mu(ts - 1e-11));
    EXPECT_THROW((void)flow_curvatures(p, ts + 0.1), OutOfInterval);
    EXPECT_THROW((void)p.mu(std::nan("")), OutOfInterval);

    const auto u = solve_hyperbolic_umbilic(2, 0.5);
    EXPECT_THROW((void)u.mu(std::log(0.75)), OutOfInterval);
    EXPECT_THROW((void)u.mu(-1.0), OutOfInterval);
}

TEST(Interval, ClassificationMatchesEnds) {
    for (const auto& p : catalog_profiles()) {
        const auto& iv = p.interval();
        EXPECT_TRUE(p.contains(0.0));
        EXPECT_LE(std::abs(p.mu(0.0)), 1e-14);
        switch (p.classification()) {
        case Classification::ancient: EXPECT_TRUE(!iv.lower_finite() && iv.upper_finite()); break;
        case Classification::immortal: EXPECT_TRUE(iv.lower_finite() && !iv.upper_finite()); break;
        case Classification::eternal: EXPECT_TRUE(!iv.lower_finite() && !iv.upper_finite()); break;
        }
    }
}

TEST(Invariants, ProductEquationOnGrid) {
    for (const auto& p : catalog_profiles()) {
        double worst = 0.0;
        for (double t : catalog_grid(p)) worst = std::max(worst, p.product_residual(t));
        EXPECT_LE(worst, 1e-10) << to_string(p.flow_case()) << " n=" << p.spectrum().n();
    }
}

TEST(Invariants, MuDecreasesAndMeanCurvaturePositive) {
    for (const auto& p : catalog_profiles()) {
        if (p.spectrum().mean_curvature() < 0) continue;  // horosphere with k = -1
        const auto grid = catalog_grid(p);
        double prev = std::numeric_limits<double>::infinity();
        for (double t : grid) {
            const double mu = p.mu(t);
            EXPECT_LT(mu, prev) << to_string(p.flow_case()) << " t=" << t;
            EXPECT_GT(flow_mean_curvature(p, t), 0.0);
            prev = mu;
        }
    }
}

TEST(Invariants, TrigIdentitiesAndMultipleAngle) {
    for (const auto& p : catalog_profiles()) {
        if (p.flow_case() != FlowCase::sphere_g) continue;
        const int g = p.spectrum().g();
        for (double t : catalog_grid(p)) {
            const auto [c, s] = p.sphere_cos_sin_gmu(t);
            EXPECT_NEAR(c * c + s * s, 1.0, 1e-12);
            EXPECT_GT(c, 0.0);
            EXPECT_NEAR(chebyshev(g, std::cos(p.mu(t))), c, 1e-9);
        }
    }
}

TEST(Invariants, QVanishesAtCollapse) {
    for (const auto& p : catalog_profiles()) {
        if (p.flow_case() == FlowCase::sphere_g) {
            EXPECT_LE(std::abs(p.q(*p.t_star())), 1e-15);
        }
    }
}

TEST(Curvatures, OriginalSpectrumAtZero) {
    for (const auto& p : catalog_profiles()) {
        const auto k = flow_curvatures(p, 0.0);
        for (std::size_t j = 0; j < k.size(); ++j) {
            EXPECT_NEAR(k[j].k, p.spectrum().entries()[j].k, 1e-15);
            EXPECT_EQ(k[j].m, p.spectrum().entries()[j].m);
        }
    }
}

TEST(MinimalLimit, Invariants) {
    auto a = minimal_invariants(2, 1);
    EXPECT_EQ(a.second_fundamental_form_sq, 2);
    EXPECT_EQ(a.scalar_curvature, 0);
    EXPECT_EQ(a.kind, MinimalLimit::clifford);
    auto b = minimal_invariants(1, 3);
    EXPECT_EQ(b.second_fundamental_form_sq, 0);
    EXPECT_EQ(b.kind, MinimalLimit::totally_geodesic);
    auto c = minimal_invariants(3, 2);
    EXPECT_EQ(c.second_fundamental_form_sq, 12);
    EXPECT_EQ(c.scalar_curvature, 18);
    EXPECT_EQ(c.kind, MinimalLimit::cartan_type);
    EXPECT_THROW((void)minimal_invariants(5, 1), DomainError);
    EXPECT_THROW((void)minimal_invariants(2, 0), DomainError);
}

TEST(MinimalLimit, SquaredNormFromTransportedCurvatures) {
    // |A|^2 = sum m_j (k_j^t)^2 at t* computed from the spectrum itself.
    for (int g : {2, 3, 4, 6})
        for (int m : {1, 2}) {
            const auto p = solve_sphere(g, m, sphere_k1_mean_convex_bound(g) + 0.3);
            const double mu = *p.mu_at_finite_endpoint();
            double a2 = 0.0;
            for (const auto& e : p.spectrum().entries()) {
                const double k = parallel_curvature(e.k, mu, SpaceForm::spherical);
                a2 += e.m * k * k;
            }
            EXPECT_NEAR(a2, static_cast<double>(minimal_invariants(g, m).second_fundamental_form_sq), 1e-8);
        }
}

TEST(LimitSummary, Examples) {
    const auto cyl = limit_summary(solve_euclidean(3, 2, 1.0));
    EXPECT_EQ(cyl.lower.object, "Euclidean subspace");
    EXPECT_EQ(cyl.lower.dimension, 1);

    const auto umb = limit_summary(solve_hyperbolic_umbilic(2, 0.5));
    EXPECT_EQ(umb.lower.object, "totally geodesic hypersurface");
    EXPECT_NEAR(umb.lower.t, std::log(0.75), 1e-15);

    const auto hopf = limit_summary(solve_sphere(2, 1, kR2));
    EXPECT_EQ(hopf.lower.dimension, 1);
    ASSERT_TRUE(hopf.upper.minimal.has_value());
    EXPECT_EQ(hopf.upper.minimal->second_fundamental_form_sq, 2);
    EXPECT_EQ(hopf.lower.vanishing_factors, std::vector<int>{1});
    EXPECT_NE(hopf.text().find("|A|^2 = 2"), std::string::npos);
}

TEST(Dispatch, RecognizesCatalogSpectra) {
    EXPECT_EQ(solve_closed_form(euclidean_spectrum(3, 2, 2.0)).flow_case(), FlowCase::euclid_cylinder);
    EXPECT_EQ(solve_closed_form(hyperbolic_spectrum(HyperbolicKind::horosphere, 2, -1.0)).flow_case(), FlowCase::horo);
    EXPECT_EQ(solve_closed_form(hyperbolic_spectrum(HyperbolicKind::cylinder, 2, kR2, 1)).flow_case(),
              FlowCase::hyp_cylinder);
    EXPECT_EQ(solve_closed_form(sphere_spectrum_from_k1(3, 2.0, 2)).flow_case(), FlowCase::sphere_g);
    EXPECT_THROW((void)solve_closed_form(sphere_spectrum_from_k1(4, 5.0, std::vector<int>{1, 2, 1, 2})), DomainError);
    EXPECT_THROW((void)solve_closed_form(hyperbolic_spectrum(HyperbolicKind::cylinder, 3, kR2, 1)), DomainError);
}

TEST(Serialization, ProfileJsonFields) {
    const auto j = profile_to_json(solve_sphere(2, 1, kR2));
    EXPECT_EQ(j.at("case"), "SPHERE_G");
    EXPECT_EQ(j.at("epsilon"), 1);
    EXPECT_EQ(j.at("g"), 2);
    EXPECT_EQ(j.at("classification"), "ancient");
    EXPECT_EQ(j.at("interval")[0], "-inf");
    EXPECT_NEAR(j.at("t_star").get<double>(), std::log(3 * kR2 / 4), 1e-15);

    const auto e = profile_to_json(solve_euclidean(2, 2, 1.0));
    EXPECT_TRUE(e.at("t_star").is_null());
}

TEST(Serialization, SpectrumRoundTrip) {
    const auto s = sphere_spectrum_from_k1(4, 5.0, std::vector<int>{1, 2, 1, 2});
    const auto back = spectrum_from_json(json::parse(spectrum_to_json(s).dump()));
    EXPECT_TRUE(back.same_as(s, 0.0));
    EXPECT_THROW((void)spectrum_from_json(json::parse(R"({"epsilon": 3, "entries": [{"k": 1, "m": 1}]})")),
                 DomainError);
    EXPECT_THROW((void)spectrum_from_json(json::parse(R"({"epsilon": 1})")), DomainError);
}

TEST(Sampling, CsvHasFixedColumns) {
    const auto p = solve_sphere(2, 1, kR2);
    std::ostringstream os;
    write_profile_csv(os, sample_profile(p, profile_grid(p, -1.0, 1.0, 5)));
    const auto text = os.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "t,mu,H_t,residual");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 6);
}
