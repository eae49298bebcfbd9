#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "imcf/errors.hpp"
#include "imcf/spaceform.hpp"
#include "imcf/spectrum.hpp"

namespace imcf {

// ---------------------------------------------------------------------------
// Spectrum generators
// ---------------------------------------------------------------------------

/// Guard band applied to the admissible k1 ranges of sphere spectra.
inline constexpr double kAdmissibleGuard = 1e-9;

[[nodiscard]] inline bool valid_sphere_g(int g) noexcept { return g == 1 || g == 2 || g == 3 || g == 4 || g == 6; }

/// Strict lower bound on k1 for sphere spectra generated from k1.
[[nodiscard]] inline double sphere_k1_lower_bound(int g) {
    switch (g) {
    case 1:
    case 2: return 0.0;
    case 3:
    case 6: return std::numbers::sqrt3;
    case 4: return 1.0;
    default: throw DomainError("number of distinct curvatures on the sphere must be in {1,2,3,4,6}");
    }
}

/// Lower bound on k1 that makes a = H/n positive, i.e. cot(pi / 2g).
[[nodiscard]] inline double sphere_k1_mean_convex_bound(int g) {
    if (!valid_sphere_g(g)) throw DomainError("number of distinct curvatures on the sphere must be in {1,2,3,4,6}");
    if (g == 1) return 0.0;
    return 1.0 / std::tan(std::numbers::pi / (2.0 * g));
}

/// k_j = cot(s + (j-1) pi / g), each with multiplicity m.
[[nodiscard]] inline PrincipalSpectrum sphere_spectrum_from_s(int g, double s, int m) {
    if (!valid_sphere_g(g)) throw DomainError("g must be in {1,2,3,4,6}, got " + std::to_string(g));
    if (m < 1) throw DomainError("multiplicity must be positive");
    const double upper = std::numbers::pi / g;
    if (!(s > 0.0 && s < upper))
        throw DomainError("s must lie in (0, pi/g) = (0, " + std::to_string(upper) + "), got " + std::to_string(s));
    std::vector<CurvatureEntry> entries;
    for (int j = 0; j < g; ++j) {
        const double angle = s + j * std::numbers::pi / g;
        entries.push_back({std::cos(angle) / std::sin(angle), m});
    }
    return PrincipalSpectrum(SpaceForm::spherical, std::move(entries), SphereParameter{s, std::cos(g * s)});
}

/// Remaining curvatures from k1 via the closed relations for each g.
[[nodiscard]] inline PrincipalSpectrum sphere_spectrum_from_k1(int g, double k1, int m) {
    const double lower = sphere_k1_lower_bound(g);
    if (m < 1) throw DomainError("multiplicity must be positive");
    if (!(k1 > lower + kAdmissibleGuard))
        throw DomainError("k1 must exceed " + std::to_string(lower) + " for g = " + std::to_string(g) + ", got " +
                          std::to_string(k1));
    constexpr double r3 = std::numbers::sqrt3;
    std::vector<double> ks;
    switch (g) {
    case 1: ks = {k1}; break;
    case 2: ks = {k1, -1.0 / k1}; break;
    case 3: ks = {k1, (r3 * k1 - 3.0) / (3.0 * k1 + r3), (r3 * k1 + 3.0) / (r3 - 3.0 * k1)}; break;
    case 4: ks = {k1, (k1 - 1.0) / (k1 + 1.0), -1.0 / k1, (k1 + 1.0) / (1.0 - k1)}; break;
    case 6:
        ks = {k1,
              (r3 * k1 - 1.0) / (k1 + r3),
              (r3 * k1 - 3.0) / (3.0 * k1 + r3),
              -1.0 / k1,
              (r3 * k1 + 3.0) / (r3 - 3.0 * k1),
              (r3 * k1 + 1.0) / (r3 - k1)};
        break;
    default: break;
    }
    std::vector<CurvatureEntry> entries;
    for (double k : ks) entries.push_back({k, m});
    const double s = std::atan2(1.0, k1);
    return PrincipalSpectrum(SpaceForm::spherical, std::move(entries), SphereParameter{s, std::cos(g * s)});
}

/// Sphere spectrum with per-curvature multiplicities (g = 4 allows m1 = m3, m2 = m4).
[[nodiscard]] inline PrincipalSpectrum sphere_spectrum_from_k1(int g, double k1, const std::vector<int>& ms) {
    if (static_cast<int>(ms.size()) != g) throw DomainError("need one multiplicity per distinct curvature");
    if (g == 4 && (ms[0] != ms[2] || ms[1] != ms[3]))
        throw DomainError("g = 4 multiplicities must satisfy m1 = m3 and m2 = m4");
    if (g != 2 && g != 4)
        for (int mm : ms)
            if (mm != ms.front()) throw DomainError("unequal multiplicities are only possible for g in {2,4}");
    const auto base = sphere_spectrum_from_k1(g, k1, 1);
    auto entries = base.entries();
    for (int j = 0; j < g; ++j) entries[j].m = ms[j];
    return PrincipalSpectrum(SpaceForm::spherical, std::move(entries), base.sphere_parameter());
}

/// Sphere (m = n) or cylinder S^m x E^{n-m} of base radius r0 in E^{n+1}.
[[nodiscard]] inline PrincipalSpectrum euclidean_spectrum(int n, int m, double r0) {
    if (n < 1 || m < 1 || m > n) throw DomainError("need 1 <= m <= n");
    if (!(r0 > 0.0)) throw DomainError("radius must be positive");
    std::vector<CurvatureEntry> entries{{1.0 / r0, m}};
    if (m < n) entries.push_back({0.0, n - m});
    return PrincipalSpectrum(SpaceForm::euclidean, std::move(entries));
}

enum class HyperbolicKind { horosphere, umbilic, cylinder };

/// Isoparametric spectra of H^{n+1}. `k` is the common curvature for
/// horospheres and umbilics and k1 for cylinders (k2 = 1/k1, multiplicities
/// m and n - m).
[[nodiscard]] inline PrincipalSpectrum hyperbolic_spectrum(HyperbolicKind kind, int n, double k, int m = 0) {
    if (n < 1) throw DomainError("dimension must be positive");
    switch (kind) {
    case HyperbolicKind::horosphere:
        if (std::abs(std::abs(k) - 1.0) > 1e-12) throw DomainError("horosphere curvature must be +1 or -1");
        return PrincipalSpectrum(SpaceForm::hyperbolic, {{k > 0 ? 1.0 : -1.0, n}});
    case HyperbolicKind::umbilic:
        if (k == 0.0 || std::abs(std::abs(k) - 1.0) <= 1e-12)
            throw DomainError("umbilic curvature must satisfy k != 0 and |k| != 1");
        return PrincipalSpectrum(SpaceForm::hyperbolic, {{k, n}});
    case HyperbolicKind::cylinder:
        if (!(k > 1.0)) throw DomainError("cylinder requires k1 > 1");
        if (m < 1 || m >= n) throw DomainError("cylinder requires 1 <= m < n");
        return PrincipalSpectrum(SpaceForm::hyperbolic, {{k, m}, {1.0 / k, n - m}});
    }
    throw DomainError("unknown hyperbolic kind");
}

// ---------------------------------------------------------------------------
// Curvature identities
// ---------------------------------------------------------------------------

struct IdentityResidual {
    std::string name;
    double residual = 0.0;
};

struct IdentityReport {
    std::vector<IdentityResidual> items;

    [[nodiscard]] double max_residual() const noexcept {
        double r = 0.0;
        for (const auto& it : items) r = std::max(r, std::abs(it.residual));
        return r;
    }
    [[nodiscard]] bool passed(double tol = 1e-11) const noexcept { return max_residual() <= tol; }
};

/// Residuals of the symmetric-function identities satisfied by sphere
/// spectra in catalog order (k1 first). Failures are reported, not thrown.
[[nodiscard]] inline IdentityReport verify_identities(const PrincipalSpectrum& spec) {
    IdentityReport rep;
    if (spec.space_form() != SpaceForm::spherical) {
        rep.items.push_back({"spherical ambient", 1.0});
        return rep;
    }
    std::vector<double> k;
    for (const auto& e : spec.entries()) k.push_back(e.k);
    const double k1 = k.front();
    auto sum = [&] {
        double s = 0.0;
        for (double v : k) s += v;
        return s;
    };
    auto prod = [&] {
        double p = 1.0;
        for (double v : k) p *= v;
        return p;
    };
    switch (k.size()) {
    case 2: rep.items.push_back({"k1*k2 = -1", k[0] * k[1] + 1.0}); break;
    case 3: {
        const double r = k1 * (k1 * k1 - 3.0) / (3.0 * k1 * k1 - 1.0);
        rep.items.push_back({"sum k = 3k1(k1^2-3)/(3k1^2-1)", sum() - 3.0 * r});
        rep.items.push_back({"sum_{i<j} k_i k_j = -3", k[0] * k[1] + k[0] * k[2] + k[1] * k[2] + 3.0});
        rep.items.push_back({"k1*k2*k3 = -k1(k1^2-3)/(3k1^2-1)", prod() + r});
        break;
    }
    case 4: {
        const double k2 = k1 * k1;
        rep.items.push_back({"sum k = (k1^4-6k1^2+1)/(k1(k1^2-1))", sum() - (k2 * k2 - 6.0 * k2 + 1.0) / (k1 * (k2 - 1.0))});
        rep.items.push_back({"k1*k3 = -1", k[0] * k[2] + 1.0});
        rep.items.push_back({"k2*k4 = -1", k[1] * k[3] + 1.0});
        rep.items.push_back({"(k1+k3)(k2+k4) = -4", (k[0] + k[2]) * (k[1] + k[3]) + 4.0});
        rep.items.push_back({"k1*k2*k3*k4 = 1", prod() - 1.0});
        break;
    }
    case 6: {
        const double k2 = k1 * k1;
        const double k4 = k2 * k2;
        const double num = k4 * k2 - 15.0 * k4 + 15.0 * k2 - 1.0;
        const double den = 3.0 * k4 * k1 - 10.0 * k2 * k1 + 3.0 * k1;
        rep.items.push_back({"sum k = 3(k1^6-15k1^4+15k1^2-1)/(3k1^5-10k1^3+3k1)", sum() - 3.0 * num / den});
        rep.items.push_back({"k1*k4 = -1", k[0] * k[3] + 1.0});
        rep.items.push_back({"k3*k6 = -1", k[2] * k[5] + 1.0});
        rep.items.push_back({"k2*k5 = -1", k[1] * k[4] + 1.0});
        rep.items.push_back({"k1*...*k6 = -1", prod() + 1.0});
        break;
    }
    default: break;
    }
    return rep;
}

/// Ordering chain of the catalog (e.g. g = 4: k4 < k3 < 0 < k2 < k1).
[[nodiscard]] inline bool catalog_ordering_holds(const PrincipalSpectrum& spec) {
    const auto& e = spec.entries();
    for (std::size_t i = 1; i < e.size(); ++i)
        if (!(e[i].k < e[i - 1].k)) return false;
    const int g = spec.g();
    // number of positive curvatures: g=2 -> 1, g=3 -> 2, g=4 -> 2, g=6 -> 3
    const int positives = (g == 1) ? 1 : g / 2 + (g == 3 ? 1 : 0);
    for (int j = 0; j < g; ++j) {
        if (j < positives && !(e[j].k > 0.0)) return false;
        if (j >= positives && !(e[j].k < 0.0)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Example immersions
// ---------------------------------------------------------------------------

struct ParamAxis {
    double lo = 0.0;
    double hi = 1.0;
    bool periodic = false;
};

using ParamDomain = std::array<ParamAxis, 2>;

/// Sample positions along one axis: periodic axes exclude the upper bound.
[[nodiscard]] inline std::vector<double> axis_samples(const ParamAxis& axis, int res) {
    if (res < 1 || (!axis.periodic && res < 2)) throw DomainError("grid resolution too small");
    std::vector<double> out(static_cast<std::size_t>(res));
    const double step = (axis.hi - axis.lo) / (axis.periodic ? res : res - 1);
    for (int i = 0; i < res; ++i) out[static_cast<std::size_t>(i)] = axis.lo + i * step;
    return out;
}

/// Parametrized surface (n = 2) with its unit normal field.
struct Immersion {
    using Map = std::function<AmbientPoint(double, double)>;

    std::string name;
    SpaceForm sf = SpaceForm::euclidean;
    ParamDomain domain{};
    Map point_fn;
    Map normal_fn;
    PrincipalSpectrum spectrum;
};

namespace detail {

[[nodiscard]] inline double det3(const std::array<std::array<double, 3>, 3>& a) {
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

/// Unit vector orthogonal (in the ambient form) to the tangent plane and, in
/// dimension 4, to the position vector. The sign is unspecified.
[[nodiscard]] inline AmbientPoint tangent_normal(SpaceForm sf, const AmbientPoint& x, const AmbientPoint& xu,
                                                 const AmbientPoint& xv) {
    AmbientPoint w;
    if (x.size() == 3) {
        w = {xu[1] * xv[2] - xu[2] * xv[1], xu[2] * xv[0] - xu[0] * xv[2], xu[0] * xv[1] - xu[1] * xv[0]};
    } else if (x.size() == 4) {
        const std::array<const AmbientPoint*, 3> rows{&x, &xu, &xv};
        w.coords.resize(4);
        for (std::size_t col = 0; col < 4; ++col) {
            std::array<std::array<double, 3>, 3> minor{};
            for (std::size_t r = 0; r < 3; ++r) {
                std::size_t cc = 0;
                for (std::size_t c = 0; c < 4; ++c)
                    if (c != col) minor[r][cc++] = (*rows[r])[c];
            }
            w[col] = ((col % 2 == 0) ? 1.0 : -1.0) * det3(minor);
        }
        // Euclidean cofactors are orthogonal in the dot product; raise the
        // index so they become orthogonal in the Lorentz form.
        if (sf == SpaceForm::hyperbolic) w[0] = -w[0];
    } else {
        throw DomainError("numerical normals are implemented for ambient dimension 3 or 4 only");
    }
    const double nn = ambient_inner(sf, w, w);
    if (!(nn > 0.0)) throw DegenerateSample("tangent plane is degenerate");
    const double inv = 1.0 / std::sqrt(nn);
    for (auto& c : w.coords) c *= inv;
    return w;
}

}  // namespace detail

[[nodiscard]] inline std::vector<std::string> example_immersion_names() {
    return {"horosphere", "hyperbolic_cylinder", "hopf_torus", "round_sphere", "euclidean_cylinder", "clifford"};
}

/// The named example surfaces; (u, v) = (theta, phi) except for the Euclidean
/// cylinder where v is the axial coordinate.
[[nodiscard]] inline Immersion example_immersion(std::string_view name) {
    using std::cos, std::sin, std::cosh, std::sinh;
    constexpr double pi = std::numbers::pi;
    constexpr double r2 = std::numbers::sqrt2;
    constexpr double r3 = std::numbers::sqrt3;

    if (name == "horosphere") {
        // theta -> pi is the point at infinity; the domain stops short of it.
        return {std::string(name), SpaceForm::hyperbolic,
                ParamDomain{ParamAxis{0.02, 2.9, false}, ParamAxis{0.0, 2.0 * pi, true}},
                [](double th, double ph) {
                    const double w = 1.0 / (1.0 + cos(th));
                    return AmbientPoint{w * (1.5 + cos(th)), w * sin(th) * cos(ph), w * sin(th) * sin(ph),
                                        w * (-0.5 - cos(th))};
                },
                [](double th, double ph) {
                    const double w = 1.0 / (1.0 + cos(th));
                    return AmbientPoint{w * (1.0 + 0.5 * cos(th)), w * sin(th) * cos(ph), w * sin(th) * sin(ph),
                                        w * (-1.0 - 1.5 * cos(th))};
                },
                hyperbolic_spectrum(HyperbolicKind::horosphere, 2, -1.0)};
    }
    if (name == "hyperbolic_cylinder") {
        return {std::string(name), SpaceForm::hyperbolic,
                ParamDomain{ParamAxis{0.0, 2.0 * pi, true}, ParamAxis{-2.0, 2.0, false}},
                [](double th, double ph) {
                    return AmbientPoint{r2 * cosh(ph), cos(th), sin(th), r2 * sinh(ph)};
                },
                [](double th, double ph) {
                    return AmbientPoint{-cosh(ph), -r2 * cos(th), -r2 * sin(th), -sinh(ph)};
                },
                hyperbolic_spectrum(HyperbolicKind::cylinder, 2, r2, 1)};
    }
    if (name == "hopf_torus") {
        return {std::string(name), SpaceForm::spherical,
                ParamDomain{ParamAxis{0.0, 2.0 * pi, true}, ParamAxis{0.0, 2.0 * pi, true}},
                [](double th, double ph) {
                    return AmbientPoint{r3 / 3.0 * r2 * cos(ph), r3 / 3.0 * r2 * sin(ph), r3 / 3.0 * cos(th),
                                        r3 / 3.0 * sin(th)};
                },
                [](double th, double ph) {
                    return AmbientPoint{r3 / 3.0 * cos(ph), r3 / 3.0 * sin(ph), -r3 / 3.0 * r2 * cos(th),
                                        -r3 / 3.0 * r2 * sin(th)};
                },
                PrincipalSpectrum(SpaceForm::spherical, {{r2, 1}, {-r2 / 2.0, 1}})};
    }
    if (name == "round_sphere") {
        return {std::string(name), SpaceForm::euclidean,
                ParamDomain{ParamAxis{0.05, pi - 0.05, false}, ParamAxis{0.0, 2.0 * pi, true}},
                [](double th, double ph) {
                    return AmbientPoint{sin(th) * cos(ph), sin(th) * sin(ph), cos(th)};
                },
                [](double th, double ph) {
                    return AmbientPoint{-sin(th) * cos(ph), -sin(th) * sin(ph), -cos(th)};
                },
                euclidean_spectrum(2, 2, 1.0)};
    }
    if (name == "euclidean_cylinder") {
        return {std::string(name), SpaceForm::euclidean,
                ParamDomain{ParamAxis{0.0, 2.0 * pi, true}, ParamAxis{-2.0, 2.0, false}},
                [](double th, double z) { return AmbientPoint{cos(th), sin(th), z}; },
                [](double th, double) { return AmbientPoint{-cos(th), -sin(th), 0.0}; },
                euclidean_spectrum(2, 1, 1.0)};
    }
    if (name == "clifford") {
        const double c = 1.0 / r2;
        return {std::string(name), SpaceForm::spherical,
                ParamDomain{ParamAxis{0.0, 2.0 * pi, true}, ParamAxis{0.0, 2.0 * pi, true}},
                [c](double th, double ph) {
                    return AmbientPoint{c * cos(ph), c * sin(ph), c * cos(th), c * sin(th)};
                },
                [c](double th, double ph) {
                    return AmbientPoint{c * cos(ph), c * sin(ph), -c * cos(th), -c * sin(th)};
                },
                PrincipalSpectrum(SpaceForm::spherical, {{1.0, 1}, {-1.0, 1}})};
    }
    throw UnknownName("no example immersion named '" + std::string(name) + "'");
}

/// Negative control: scales one ambient axis of a spherical immersion and
/// projects back onto the unit sphere. The normal is recomputed numerically;
/// the attached spectrum is left unchanged and is no longer correct.
[[nodiscard]] inline Immersion anisotropic_perturbation(const Immersion& base, std::size_t axis, double factor) {
    if (base.sf != SpaceForm::spherical) throw WrongSpaceForm("perturbation is defined for spherical immersions");
    Immersion out = base;
    out.name = base.name + "_perturbed";
    auto point = [f = base.point_fn, axis, factor](double u, double v) {
        AmbientPoint p = f(u, v);
        p[axis] *= factor;
        double norm = 0.0;
        for (double c : p.coords) norm += c * c;
        norm = std::sqrt(norm);
        for (auto& c : p.coords) c /= norm;
        return p;
    };
    out.point_fn = point;
    out.normal_fn = [point, nf = base.normal_fn](double u, double v) {
        constexpr double h = 1e-6;
        const AmbientPoint x = point(u, v);
        const AmbientPoint xu = combine(0.5 / h, point(u + h, v), -0.5 / h, point(u - h, v));
        const AmbientPoint xv = combine(0.5 / h, point(u, v + h), -0.5 / h, point(u, v - h));
        AmbientPoint w = detail::tangent_normal(SpaceForm::spherical, x, xu, xv);
        if (ambient_inner(SpaceForm::spherical, w, nf(u, v)) < 0.0)
            for (auto& c : w.coords) c = -c;
        return w;
    };
    return out;
}

// ---------------------------------------------------------------------------
// Isoparametricity check
// ---------------------------------------------------------------------------

/// Central-difference step on parameters used by the curvature oracle.
inline constexpr double kFiniteDifferenceStep = 1e-4;

struct IsoparametricSample {
    double mu = 0.0;
    double fd_min = 0.0;
    double fd_max = 0.0;
    double transported = 0.0;      ///< mean curvature of the parallel spectrum
    double max_disagreement = 0.0; ///< max |finite difference - transported|

    [[nodiscard]] double spread() const noexcept { return fd_max - fd_min; }
};

struct IsoparametricReport {
    std::vector<IsoparametricSample> samples;
    double spread_tolerance = 1e-6;
    double agreement_tolerance = 1e-5;

    [[nodiscard]] bool passed() const noexcept {
        for (const auto& s : samples)
            if (!(s.spread() <= spread_tolerance) || !(s.max_disagreement <= agreement_tolerance)) return false;
        return true;
    }
};

/// Mean curvature of the parallel surface F^mu at (u, v) from second-order
/// central differences of the immersion. The transported normal only fixes
/// the orientation.
[[nodiscard]] inline double finite_difference_mean_curvature(const Immersion& imm, double mu, double u, double v,
                                                             double h = kFiniteDifferenceStep) {
    const SpaceForm sf = imm.sf;
    const double c = c_eps(sf, mu);
    const double s = s_eps(sf, mu);
    auto x = [&](double a, double b) { return combine(c, imm.point_fn(a, b), s, imm.normal_fn(a, b)); };

    const AmbientPoint x0 = x(u, v);
    const AmbientPoint xpu = x(u + h, v), xmu = x(u - h, v);
    const AmbientPoint xpv = x(u, v + h), xmv = x(u, v - h);
    const AmbientPoint xpp = x(u + h, v + h), xpm = x(u + h, v - h);
    const AmbientPoint xmp = x(u - h, v + h), xmm = x(u - h, v - h);

    const std::size_t dim = x0.size();
    AmbientPoint xu, xv, xuu, xvv, xuv;
    for (auto* p : {&xu, &xv, &xuu, &xvv, &xuv}) p->coords.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        xu[i] = (xpu[i] - xmu[i]) / (2.0 * h);
        xv[i] = (xpv[i] - xmv[i]) / (2.0 * h);
        xuu[i] = (xpu[i] - 2.0 * x0[i] + xmu[i]) / (h * h);
        xvv[i] = (xpv[i] - 2.0 * x0[i] + xmv[i]) / (h * h);
        xuv[i] = (xpp[i] - xpm[i] - xmp[i] + xmm[i]) / (4.0 * h * h);
    }

    AmbientPoint nu = detail::tangent_normal(sf, x0, xu, xv);
    const AmbientPoint n_mu = combine(-epsilon(sf) * s, imm.point_fn(u, v), c, imm.normal_fn(u, v));
    if (ambient_inner(sf, nu, n_mu) < 0.0)
        for (auto& comp : nu.coords) comp = -comp;

    const double e = ambient_inner(sf, xu, xu);
    const double f = ambient_inner(sf, xu, xv);
    const double g = ambient_inner(sf, xv, xv);
    const double l = ambient_inner(sf, xuu, nu);
    const double m = ambient_inner(sf, xuv, nu);
    const double n = ambient_inner(sf, xvv, nu);
    const double det = e * g - f * f;
    if (!(det > 1e-20)) throw DegenerateSample("first fundamental form is singular");
    return (g * l - 2.0 * f * m + e * n) / det;
}

/// For each mu, the spread over a res x res grid of finite-difference mean
/// curvatures of F^mu, and their agreement with the transported spectrum.
[[nodiscard]] inline IsoparametricReport check_isoparametric(const Immersion& imm, const std::vector<double>& mu_samples,
                                                             int res = 32) {
    if (imm.spectrum.n() != 2) throw DomainError("isoparametricity check needs a surface (n = 2)");
    if (res < 1) throw DomainError("grid resolution must be positive");
    IsoparametricReport rep;
    for (double mu : mu_samples) {
        if (min_metric_factor(imm.spectrum, mu) < 1e-12)
            throw DegenerateSample("focal parallel surface at mu = " + std::to_string(mu));
        IsoparametricSample smp;
        smp.mu = mu;
        smp.transported = mean_curvature_parallel(imm.spectrum, mu);
        smp.fd_min = std::numeric_limits<double>::infinity();
        smp.fd_max = -std::numeric_limits<double>::infinity();
        // cell centres keep the stencil away from polar rows
        for (int i = 0; i < res; ++i) {
            const auto& au = imm.domain[0];
            const double u = au.lo + (i + 0.5) * (au.hi - au.lo) / res;
            for (int j = 0; j < res; ++j) {
                const auto& av = imm.domain[1];
                const double v = av.lo + (j + 0.5) * (av.hi - av.lo) / res;
                const double h = finite_difference_mean_curvature(imm, mu, u, v);
                smp.fd_min = std::min(smp.fd_min, h);
                smp.fd_max = std::max(smp.fd_max, h);
                smp.max_disagreement = std::max(smp.max_disagreement, std::abs(h - smp.transported));
            }
        }
        rep.samples.push_back(smp);
    }
    return rep;
}

}  // namespace imcf
