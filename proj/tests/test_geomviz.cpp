#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "imcf/geomviz.hpp"

using namespace imcf;
namespace fs = std::filesystem;

namespace {

const double kR2 = std::sqrt(2.0);

fs::path scratch_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("imcf_geomviz_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

double norm3(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

AmbientPoint hyperboloid_point(double r, double a, double b) {
    return {std::cosh(r), std::sinh(r) * std::sin(a) * std::cos(b), std::sinh(r) * std::sin(a) * std::sin(b),
            std::sinh(r) * std::cos(a)};
}

}  // namespace

TEST(FlowSurface, TimeZeroIsTheImmersion) {
    const auto imm = example_immersion("hopf_torus");
    const auto grid = flow_surface(imm, solve_sphere(2, 1, kR2), 0.0, 16, 16);
    const auto us = axis_samples(imm.domain[0], 16);
    const auto vs = axis_samples(imm.domain[1], 16);
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j) {
            const auto f = imm.point_fn(us[static_cast<std::size_t>(i)], vs[static_cast<std::size_t>(j)]);
            for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(grid.at(i, j)[c], f[c]);
        }
    EXPECT_EQ(grid.mu, 0.0);
}

TEST(FlowSurface, RoundSphereRadiusLaw) {
    const auto grid = flow_surface(example_immersion("round_sphere"), solve_euclidean(2, 2, 1.0), 2 * std::log(2.0), 24, 24);
    for (const auto& p : grid.points) EXPECT_NEAR(std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]), 2.0, 1e-14);
    EXPECT_NEAR(grid.mean_curvature, 1.0, 1e-14);
}

TEST(FlowSurface, HopfTorusStaysOnSphere) {
    const auto grid = flow_surface(example_immersion("hopf_torus"), solve_sphere(2, 1, kR2), 0.05, 64, 64);
    for (const auto& p : grid.points) {
        double s = 0.0;
        for (double c : p.coords) s += c * c;
        EXPECT_NEAR(std::sqrt(s), 1.0, 1e-10);
    }
}

TEST(FlowSurface, VerticesOnQuadricForSceneTimes) {
    for (const auto& name : scene_names()) {
        const auto scene = make_scene(name, 32);
        for (double t : scene.t_values) {
            const auto grid = flow_surface(scene.immersion, scene.profile, t, 32, 32);
            for (const auto& p : grid.points) {
                const double scale = std::max(1.0, p[0] * p[0]);
                EXPECT_NEAR(quadric_defect(scene.immersion.sf, p), 0.0, 1e-9 * scale) << name << " t=" << t;
            }
        }
    }
}

TEST(FlowSurface, Errors) {
    const auto imm = example_immersion("hopf_torus");
    EXPECT_THROW((void)flow_surface(imm, solve_sphere(2, 1, 2.0), 0.0, 8, 8), SpectrumMismatch);
    EXPECT_THROW((void)flow_surface(imm, solve_euclidean(2, 2, 1.0), 0.0, 8, 8), SpectrumMismatch);
    EXPECT_THROW((void)flow_surface(imm, solve_sphere(2, 1, kR2), 1.0, 8, 8), OutOfInterval);
}

TEST(PoincareBall, Examples) {
    const auto o = poincare_ball({1.0, 0.0, 0.0, 0.0});
    for (double c : o) EXPECT_EQ(c, 0.0);
    const auto b = poincare_ball({1.5, 1.0, 0.0, -0.5});
    ASSERT_EQ(b.size(), 3u);
    EXPECT_NEAR(b[0], 0.4, 1e-15);
    EXPECT_NEAR(b[1], 0.0, 1e-15);
    EXPECT_NEAR(b[2], 0.2, 1e-15);
    EXPECT_NEAR(b[0] * b[0] + b[1] * b[1] + b[2] * b[2], 0.2, 1e-15);
}

TEST(PoincareBall, NormIdentityAndContainment) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> rr(0.0, 6.0), ang(0.0, 6.283185307179586);
    for (int i = 0; i < 500; ++i) {
        const auto p = hyperboloid_point(rr(rng), ang(rng), ang(rng));
        const auto b = poincare_ball3(p);
        const double nsq = b[0] * b[0] + b[1] * b[1] + b[2] * b[2];
        EXPECT_NEAR(nsq, (p[0] - 1) / (p[0] + 1), 1e-13);
        EXPECT_LT(nsq, 1.0);
    }
}

TEST(PoincareBall, RejectsOffQuadric) {
    EXPECT_THROW((void)poincare_ball({2.0, 0.0, 0.0, 0.0}), NotOnQuadric);
    EXPECT_THROW((void)poincare_ball({-1.0, 0.0, 0.0, 0.0}), NotOnQuadric);
}

TEST(Stereographic, Examples) {
    const auto a = stereographic({1.0, 0.0, 0.0, 0.0});
    EXPECT_EQ(a, (Vec3{1.0, 0.0, 0.0}));
    const auto b = stereographic({0.0, 0.0, 0.0, -1.0});
    EXPECT_EQ(b, (Vec3{0.0, 0.0, 0.0}));
    EXPECT_THROW((void)stereographic({0.0, 0.0, 0.0, 1.0}), AtPole);
    EXPECT_THROW((void)stereographic({0.0, 0.0, 0.0, 2.0}), NotOnQuadric);
    EXPECT_EQ(stereographic({0.0, 1.0, 0.0, 0.0}, 1), (Vec3{1.0, 0.0, 0.0}));
}

TEST(Stereographic, InverseRoundTrip) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    for (int pole = 1; pole <= 4; ++pole)
        for (int i = 0; i < 300; ++i) {
            AmbientPoint p{nd(rng), nd(rng), nd(rng), nd(rng)};
            double s = 0.0;
            for (double c : p.coords) s += c * c;
            for (auto& c : p.coords) c /= std::sqrt(s);
            if (p[static_cast<std::size_t>(pole - 1)] > 0.99) continue;
            const auto q = inverse_stereographic(stereographic(p, pole), pole);
            for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(q[c], p[c], 1e-10);
        }
}

TEST(Stereographic, HopfTorusGridIsFinite) {
    const auto grid = flow_surface(example_immersion("hopf_torus"), solve_sphere(2, 1, kR2), 0.0, 64, 64);
    const auto mesh = grid_mesh(grid, Projection::stereographic);
    for (const auto& v : mesh.vertices)
        for (double c : v) EXPECT_TRUE(std::isfinite(c));
    // Closed torus: every grid cell contributes two triangles.
    EXPECT_EQ(mesh.faces.size(), 2u * 64 * 64);
}

TEST(BallNorm, HorosphereMinimaIncrease) {
    const auto rep =
        ball_norm_limit_check(example_immersion("horosphere"), solve_horosphere(2, -1.0), {0.0, 5.0, 10.0, 15.0}, 32);
    EXPECT_TRUE(rep.minima_increasing);
    EXPECT_TRUE(rep.hard_bound_applies);
    EXPECT_TRUE(rep.hard_bound_met);
    EXPECT_TRUE(rep.passed());
    EXPECT_GT(rep.rows.back().min_norm_sq, 0.99);
    for (const auto& r : rep.rows) EXPECT_LE(r.identity_deviation, 1e-13);
}

TEST(BallNorm, HyperbolicCylinderMinimaIncrease) {
    const auto rep = ball_norm_limit_check(example_immersion("hyperbolic_cylinder"), solve_hyperbolic_cylinder(1, kR2),
                                           {0.0, 5.0, 10.0, 15.0}, 32);
    EXPECT_TRUE(rep.minima_increasing);
    EXPECT_TRUE(rep.passed());
    EXPECT_GT(rep.rows.back().min_norm_sq, rep.rows.front().min_norm_sq);
}

TEST(BallNorm, SingleTimeIsTrivial) {
    const auto rep = ball_norm_limit_check(example_immersion("horosphere"), solve_horosphere(2, -1.0), {0.0}, 16);
    EXPECT_EQ(rep.rows.size(), 1u);
    EXPECT_TRUE(rep.passed());
}

TEST(BallNorm, RejectsSphere) {
    EXPECT_THROW((void)ball_norm_limit_check(example_immersion("hopf_torus"), solve_sphere(2, 1, kR2), {0.0}), WrongSpaceForm);
}

TEST(Mesh, FaceIndicesInRangeAndChannels) {
    for (const auto& name : scene_names()) {
        for (const auto& mesh : build_scene(make_scene(name, 16))) {
            EXPECT_NO_THROW(mesh.validate());
            ASSERT_NE(mesh.channel("mean_curvature"), nullptr);
            if (name != "figure3") {
                ASSERT_NE(mesh.channel("ball_norm_sq"), nullptr);
                for (const auto& v : mesh.vertices) EXPECT_LT(norm3(v), 1.0) << name;
            }
        }
    }
}

TEST(Mesh, OpenDirectionsAreNotWrapped) {
    // Horosphere: theta open, phi periodic.
    const auto grid = flow_surface(example_immersion("horosphere"), solve_horosphere(2, -1.0), 0.0, 10, 12);
    const auto mesh = grid_mesh(grid, Projection::ball);
    EXPECT_EQ(mesh.faces.size(), 2u * 9 * 12);
}

TEST(Mesh, InvalidFaceIsRejected) {
    Mesh m;
    m.vertices = {{0, 0, 0}};
    m.faces = {{0, 1, 2}};
    EXPECT_THROW(m.validate(), DomainError);
}

TEST(Mesh, DigestIsStableAndDiscriminating) {
    const auto a = spectrum_digest(sphere_spectrum_from_k1(2, kR2, 1));
    EXPECT_EQ(a, spectrum_digest(sphere_spectrum_from_k1(2, kR2, 1)));
    EXPECT_NE(a, spectrum_digest(sphere_spectrum_from_k1(2, kR2, 2)));
    EXPECT_EQ(a.size(), 16u);
}

TEST(Export, EmptyMeshHeaders) {
    Mesh m;
    std::ostringstream obj;
    write_obj(m, obj);
    EXPECT_EQ(obj.str().find("\nv "), std::string::npos);
    std::ostringstream ply;
    write_ply(m, ply);
    const auto s = ply.str();
    EXPECT_EQ(s.rfind("ply\nformat binary_little_endian 1.0\n", 0), 0u);
    EXPECT_NE(s.find("element vertex 0\n"), std::string::npos);
    EXPECT_NE(s.find("element face 0\n"), std::string::npos);
    EXPECT_EQ(s.substr(s.size() - 11), "end_header\n");
}

TEST(Export, ObjLayout) {
    Mesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1.5, 0}};
    m.faces = {{0, 1, 2}};
    std::ostringstream os;
    write_obj(m, os);
    std::istringstream is(os.str());
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(is, line)) lines.push_back(line);
    ASSERT_EQ(lines.size(), 5u);
    EXPECT_EQ(lines[0][0], '#');
    EXPECT_EQ(lines[2], "v 1 0 0");
    EXPECT_EQ(lines[3], "v 0 1.5 0");
    EXPECT_EQ(lines[4], "f 1 2 3");
}

TEST(Export, PlyBinaryPayload) {
    Mesh m;
    m.vertices = {{0.5, -1, 2}, {1, 0, 0}, {0, 1, 0}};
    m.faces = {{0, 1, 2}};
    m.channels.push_back({"mean_curvature", {3.0, 3.0, 3.0}});
    std::ostringstream os;
    write_ply(m, os);
    const auto s = os.str();
    const auto body = s.substr(s.find("end_header\n") + 11);
    ASSERT_EQ(body.size(), 3u * 4 * 4 + 1 + 3 * 4);
    float x = 0, y = 0, h = 0;
    std::memcpy(&x, body.data(), 4);
    std::memcpy(&y, body.data() + 4, 4);
    std::memcpy(&h, body.data() + 12, 4);
    EXPECT_EQ(x, 0.5f);
    EXPECT_EQ(y, -1.0f);
    EXPECT_EQ(h, 3.0f);
    EXPECT_EQ(body[48], 3);
    std::int32_t third = 0;
    std::memcpy(&third, body.data() + 49 + 8, 4);
    EXPECT_EQ(third, 2);
    EXPECT_NE(s.find("property float mean_curvature\n"), std::string::npos);
}

TEST(Export, SceneFilesAreDeterministic) {
    const auto d1 = scratch_dir("a");
    const auto d2 = scratch_dir("b");
    const auto scene = make_scene("figure3", 64);
    ASSERT_EQ(scene.t_values.size(), 3u);
    EXPECT_NEAR(scene.t_values[2], std::log(3 * kR2 / 4) - 1e-3, 1e-15);
    const auto w1 = export_scene(scene, d1, {MeshFormat::obj, MeshFormat::ply});
    const auto w2 = export_scene(scene, d2, {MeshFormat::obj, MeshFormat::ply});
    ASSERT_EQ(w1.size(), 6u);
    for (std::size_t i = 0; i < w1.size(); ++i) {
        EXPECT_EQ(w1[i].filename(), w2[i].filename());
        EXPECT_EQ(slurp(w1[i]), slurp(w2[i])) << w1[i];
    }
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST(Export, UnwritablePathRaises) {
    Mesh m;
    EXPECT_THROW(export_mesh(m, "/nonexistent_dir_imcf/x.obj", MeshFormat::obj), IOError);
}

TEST(Scenes, UnknownNameAndContents) {
    EXPECT_THROW((void)make_scene("figure9"), UnknownName);
    const auto f1 = make_scene("figure1");
    EXPECT_EQ(f1.t_values, (std::vector<double>{-2.0, 0.0, 2.0}));
    EXPECT_EQ(f1.projection, Projection::ball);
    EXPECT_EQ(make_scene("figure3").projection, Projection::stereographic);
}
