#pragma once

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "imcf/closedform.hpp"
#include "imcf/errors.hpp"
#include "imcf/isocatalog.hpp"
#include "imcf/spaceform.hpp"
#include "imcf/spectrum.hpp"

namespace imcf {

using Vec3 = std::array<double, 3>;

/// Shortest decimal string that round-trips to the same double.
[[nodiscard]] inline std::string format_double(double x) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

// ---------------------------------------------------------------------------
// Flowed surfaces
// ---------------------------------------------------------------------------

/// F^t sampled on a (u, v) grid, row-major in u.
struct FlowGrid {
    int res_u = 0;
    int res_v = 0;
    bool periodic_u = false;
    bool periodic_v = false;
    double t = 0.0;
    double mu = 0.0;
    double mean_curvature = 0.0;
    std::vector<AmbientPoint> points;
    std::vector<AmbientPoint> normals;

    [[nodiscard]] const AmbientPoint& at(int i, int j) const {
        return points[static_cast<std::size_t>(i) * static_cast<std::size_t>(res_v) + static_cast<std::size_t>(j)];
    }
};

[[nodiscard]] inline FlowGrid flow_surface(const Immersion& imm, const FlowProfile& profile, double t, int res_u,
                                           int res_v) {
    if (imm.sf != profile.spectrum().space_form() || !imm.spectrum.same_as(profile.spectrum(), 1e-12))
        throw SpectrumMismatch("immersion '" + imm.name + "' does not carry the profile's spectrum");
    const double mu = profile.mu(t);
    const auto us = axis_samples(imm.domain[0], res_u);
    const auto vs = axis_samples(imm.domain[1], res_v);
    FlowGrid grid;
    grid.res_u = res_u;
    grid.res_v = res_v;
    grid.periodic_u = imm.domain[0].periodic;
    grid.periodic_v = imm.domain[1].periodic;
    grid.t = t;
    grid.mu = mu;
    grid.mean_curvature = mean_curvature_parallel(imm.spectrum, mu);
    grid.points.reserve(us.size() * vs.size());
    grid.normals.reserve(us.size() * vs.size());
    for (double u : us)
        for (double v : vs) {
            const AmbientPoint f = imm.point_fn(u, v);
            const AmbientPoint nrm = imm.normal_fn(u, v);
            grid.points.push_back(parallel_point(f, nrm, mu, imm.sf));
            grid.normals.push_back(parallel_normal(f, nrm, mu, imm.sf));
        }
    return grid;
}

// ---------------------------------------------------------------------------
// Projections
// ---------------------------------------------------------------------------

/// Hyperboloid to unit ball: (x_2, ..., x_{n+1}, -x_{n+2}) / (x_1 + 1).
[[nodiscard]] inline std::vector<double> poincare_ball(const AmbientPoint& p) {
    if (p.size() < 2 || !on_quadric(SpaceForm::hyperbolic, p, kQuadricTolerance * std::max(1.0, p[0] * p[0])))
        throw NotOnQuadric("point is not on the upper hyperboloid");
    std::vector<double> out(p.coords.begin() + 1, p.coords.end());
    out.back() = -out.back();
    const double inv = 1.0 / (p[0] + 1.0);
    for (auto& c : out) c *= inv;
    return out;
}

[[nodiscard]] inline Vec3 poincare_ball3(const AmbientPoint& p) {
    if (p.size() != 4) throw DomainError("ball projection to 3-space needs a point of L^4");
    const auto b = poincare_ball(p);
    return {b[0], b[1], b[2]};
}

/// Drops the 1-based `pole` coordinate and divides by (1 - p_pole).
[[nodiscard]] inline Vec3 stereographic(const AmbientPoint& p, int pole = 4) {
    if (p.size() != 4) throw DomainError("stereographic projection needs a point of S^3 in E^4");
    if (pole < 1 || pole > 4) throw DomainError("pole index must be in 1..4");
    if (!on_quadric(SpaceForm::spherical, p, kQuadricTolerance)) throw NotOnQuadric("point is not on the unit sphere");
    const double pp = p[static_cast<std::size_t>(pole - 1)];
    if (std::abs(pp - 1.0) <= 1e-9) throw AtPole("point coincides with the projection pole");
    Vec3 out{};
    std::size_t k = 0;
    for (std::size_t i = 0; i < 4; ++i)
        if (static_cast<int>(i) != pole - 1) out[k++] = p[i] / (1.0 - pp);
    return out;
}

[[nodiscard]] inline AmbientPoint inverse_stereographic(const Vec3& y, int pole = 4) {
    if (pole < 1 || pole > 4) throw DomainError("pole index must be in 1..4");
    const double s = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
    AmbientPoint p;
    p.coords.resize(4);
    std::size_t k = 0;
    for (std::size_t i = 0; i < 4; ++i)
        p[i] = static_cast<int>(i) == pole - 1 ? (s - 1.0) / (s + 1.0) : 2.0 * y[k++] / (s + 1.0);
    return p;
}

// ---------------------------------------------------------------------------
// Boundary convergence in the ball model
// ---------------------------------------------------------------------------

struct BallNormRow {
    double t = 0.0;
    double mu = 0.0;
    double min_norm_sq = 0.0;
    double max_norm_sq = 0.0;
    double identity_deviation = 0.0; ///< max | |G|^2 - (x1 - 1)/(x1 + 1) |
};

struct BallNormReport {
    std::vector<BallNormRow> rows;
    bool minima_increasing = true;
    bool heuristic_bound_met = true; ///< final min >= 1 - 10 e^{-mu}; reported only
    bool hard_bound_applies = false; ///< cosh mu(t_max) >= 100
    bool hard_bound_met = true;      ///< final min >= 0.99

    [[nodiscard]] bool passed() const noexcept { return minima_increasing && (!hard_bound_applies || hard_bound_met); }
};

[[nodiscard]] inline BallNormReport ball_norm_limit_check(const Immersion& imm, const FlowProfile& profile,
                                                          const std::vector<double>& t_list, int res = 64) {
    if (imm.sf != SpaceForm::hyperbolic) throw WrongSpaceForm("the ball model applies to hyperbolic space only");
    for (std::size_t i = 1; i < t_list.size(); ++i)
        if (!(t_list[i] > t_list[i - 1])) throw DomainError("t_list must be increasing");
    BallNormReport rep;
    for (double t : t_list) {
        const auto grid = flow_surface(imm, profile, t, res, res);
        BallNormRow row{t, grid.mu, std::numeric_limits<double>::infinity(), 0.0, 0.0};
        for (const auto& p : grid.points) {
            const auto b = poincare_ball(p);
            double nsq = 0.0;
            for (double c : b) nsq += c * c;
            row.min_norm_sq = std::min(row.min_norm_sq, nsq);
            row.max_norm_sq = std::max(row.max_norm_sq, nsq);
            row.identity_deviation = std::max(row.identity_deviation, std::abs(nsq - (p[0] - 1.0) / (p[0] + 1.0)));
        }
        if (!rep.rows.empty() && !(row.min_norm_sq > rep.rows.back().min_norm_sq)) rep.minima_increasing = false;
        rep.rows.push_back(row);
    }
    if (!rep.rows.empty()) {
        const auto& last = rep.rows.back();
        rep.heuristic_bound_met = last.min_norm_sq >= 1.0 - 10.0 * std::exp(-std::abs(last.mu));
        rep.hard_bound_applies = std::cosh(last.mu) >= 100.0;
        rep.hard_bound_met = last.min_norm_sq >= 0.99;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Meshes
// ---------------------------------------------------------------------------

struct MeshMetadata {
    std::string name;
    double t = 0.0;
    std::string flow_case;
    std::string spectrum_digest;
};

struct ScalarChannel {
    std::string name;
    std::vector<double> values;
};

/// Triangle mesh with named per-vertex scalar channels.
struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::uint32_t, 3>> faces;
    std::vector<ScalarChannel> channels;
    MeshMetadata meta;

    void validate() const {
        for (const auto& f : faces)
            for (auto i : f)
                if (i >= vertices.size()) throw DomainError("face index out of range");
        for (const auto& c : channels)
            if (c.values.size() != vertices.size()) throw DomainError("channel '" + c.name + "' has wrong length");
    }

    [[nodiscard]] const ScalarChannel* channel(std::string_view name) const {
        for (const auto& c : channels)
            if (c.name == name) return &c;
        return nullptr;
    }
};

/// 64-bit FNV-1a over a canonical text form of the spectrum, in hex.
[[nodiscard]] inline std::string spectrum_digest(const PrincipalSpectrum& spec) {
    std::string text = "eps=" + std::to_string(spec.epsilon());
    for (const auto& e : spec.entries()) text += ";" + format_double(e.k) + ":" + std::to_string(e.m);
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << h;
    return os.str();
}

enum class Projection { identity, ball, stereographic };

[[nodiscard]] inline const char* to_string(Projection p) noexcept {
    switch (p) {
    case Projection::identity: return "identity";
    case Projection::ball: return "ball";
    case Projection::stereographic: return "stereographic";
    }
    return "?";
}

/// Projects a flowed grid to 3-space and triangulates it, closing periodic
/// directions by index wrapping.
[[nodiscard]] inline Mesh grid_mesh(const FlowGrid& grid, Projection proj, int pole = 4) {
    Mesh mesh;
    mesh.vertices.reserve(grid.points.size());
    ScalarChannel ball{"ball_norm_sq", {}};
    for (const auto& p : grid.points) {
        switch (proj) {
        case Projection::identity:
            if (p.size() != 3) throw DomainError("identity projection needs points of E^3");
            mesh.vertices.push_back({p[0], p[1], p[2]});
            break;
        case Projection::ball: {
            const Vec3 b = poincare_ball3(p);
            mesh.vertices.push_back(b);
            ball.values.push_back(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
            break;
        }
        case Projection::stereographic: mesh.vertices.push_back(stereographic(p, pole)); break;
        }
    }
    mesh.channels.push_back({"mean_curvature", std::vector<double>(grid.points.size(), grid.mean_curvature)});
    if (proj == Projection::ball) mesh.channels.push_back(std::move(ball));

    const int nu = grid.periodic_u ? grid.res_u : grid.res_u - 1;
    const int nv = grid.periodic_v ? grid.res_v : grid.res_v - 1;
    auto idx = [&](int i, int j) {
        return static_cast<std::uint32_t>((i % grid.res_u) * grid.res_v + (j % grid.res_v));
    };
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j) {
            const auto a = idx(i, j), b = idx(i + 1, j), c = idx(i + 1, j + 1), d = idx(i, j + 1);
            mesh.faces.push_back({a, b, c});
            mesh.faces.push_back({a, c, d});
        }
    mesh.meta.t = grid.t;
    return mesh;
}

// ---------------------------------------------------------------------------
// Writers
// ---------------------------------------------------------------------------

enum class MeshFormat { obj, ply };

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IOError("cannot open '" + path.string() + "' for writing");
    return os;
}

inline void finish_output(std::ofstream& os, const std::filesystem::path& path) {
    os.flush();
    if (!os) throw IOError("write to '" + path.string() + "' failed");
}

inline void put_le32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

inline void put_float(std::string& buf, double x) {
    put_le32(buf, std::bit_cast<std::uint32_t>(static_cast<float>(x)));
}

}  // namespace detail

inline void write_obj(const Mesh& mesh, std::ostream& os) {
    mesh.validate();
    os << "# " << mesh.meta.name << " t=" << format_double(mesh.meta.t) << " case=" << mesh.meta.flow_case
       << " spectrum=" << mesh.meta.spectrum_digest << '\n';
    for (const auto& v : mesh.vertices)
        os << "v " << format_double(v[0]) << ' ' << format_double(v[1]) << ' ' << format_double(v[2]) << '\n';
    for (const auto& f : mesh.faces) os << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

inline void write_ply(const Mesh& mesh, std::ostream& os) {
    mesh.validate();
    std::string out = "ply\nformat binary_little_endian 1.0\n";
    out += "comment name " + mesh.meta.name + "\n";
    out += "comment t " + format_double(mesh.meta.t) + "\n";
    out += "comment case " + mesh.meta.flow_case + "\n";
    out += "comment spectrum " + mesh.meta.spectrum_digest + "\n";
    out += "element vertex " + std::to_string(mesh.vertices.size()) + "\n";
    out += "property float x\nproperty float y\nproperty float z\n";
    for (const auto& c : mesh.channels) out += "property float " + c.name + "\n";
    out += "element face " + std::to_string(mesh.faces.size()) + "\n";
    out += "property list uchar int vertex_indices\nend_header\n";
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        for (double c : mesh.vertices[i]) detail::put_float(out, c);
        for (const auto& ch : mesh.channels) detail::put_float(out, ch.values[i]);
    }
    for (const auto& f : mesh.faces) {
        out.push_back(static_cast<char>(3));
        for (auto i : f) detail::put_le32(out, i);
    }
    os.write(out.data(), static_cast<std::streamsize>(out.size()));
}

inline void export_mesh(const Mesh& mesh, const std::filesystem::path& path, MeshFormat format) {
    auto os = detail::open_output(path);
    if (format == MeshFormat::obj)
        write_obj(mesh, os);
    else
        write_ply(mesh, os);
    detail::finish_output(os, path);
}

// ---------------------------------------------------------------------------
// Figure scenes
// ---------------------------------------------------------------------------

struct Scene {
    std::string name;
    Immersion immersion;
    FlowProfile profile;
    std::vector<double> t_values;
    int res_u = 64;
    int res_v = 64;
    Projection projection = Projection::identity;
    int pole = 4;
};

[[nodiscard]] inline std::vector<std::string> scene_names() { return {"figure1", "figure2", "figure3"}; }

[[nodiscard]] inline Scene make_scene(std::string_view name, int res = 64) {
    if (name == "figure1")
        return {std::string(name), example_immersion("horosphere"), solve_horosphere(2, -1.0), {-2.0, 0.0, 2.0},
                res, res, Projection::ball, 4};
    if (name == "figure2")
        return {std::string(name), example_immersion("hyperbolic_cylinder"),
                solve_hyperbolic_cylinder(1, std::numbers::sqrt2), {-2.0, 0.0, 2.0}, res, res, Projection::ball, 4};
    if (name == "figure3") {
        auto profile = solve_sphere(2, 1, std::numbers::sqrt2);
        const double ts = *profile.t_star();
        return {std::string(name), example_immersion("hopf_torus"), std::move(profile), {-1.0, 0.0, ts - 1e-3},
                res, res, Projection::stereographic, 4};
    }
    throw UnknownName("no scene named '" + std::string(name) + "'");
}

[[nodiscard]] inline std::vector<Mesh> build_scene(const Scene& scene) {
    std::vector<Mesh> meshes;
    for (std::size_t i = 0; i < scene.t_values.size(); ++i) {
        const auto grid = flow_surface(scene.immersion, scene.profile, scene.t_values[i], scene.res_u, scene.res_v);
        Mesh mesh = grid_mesh(grid, scene.projection, scene.pole);
        mesh.meta.name = scene.name + "_" + std::to_string(i);
        mesh.meta.flow_case = to_string(scene.profile.flow_case());
        mesh.meta.spectrum_digest = spectrum_digest(scene.profile.spectrum());
        meshes.push_back(std::move(mesh));
    }
    return meshes;
}

/// Writes every mesh of a scene as <scene>_<i>.<ext>; returns the paths.
inline std::vector<std::filesystem::path> export_scene(const Scene& scene, const std::filesystem::path& dir,
                                                       const std::vector<MeshFormat>& formats) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IOError("cannot create '" + dir.string() + "': " + ec.message());
    std::vector<std::filesystem::path> written;
    for (const auto& mesh : build_scene(scene))
        for (auto f : formats) {
            auto path = dir / (mesh.meta.name + (f == MeshFormat::obj ? ".obj" : ".ply"));
            export_mesh(mesh, path, f);
            written.push_back(std::move(path));
        }
    return written;
}

}  // namespace imcf
