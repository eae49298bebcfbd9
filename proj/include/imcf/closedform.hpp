#pragma once

#include <cmath>
#include <concepts>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "imcf/errors.hpp"
#include "imcf/isocatalog.hpp"
#include "imcf/spaceform.hpp"
#include "imcf/spectrum.hpp"

namespace imcf {

enum class FlowCase { euclid_sphere, euclid_cylinder, horo, hyp_umbilic, hyp_cylinder, sphere_g };
enum class Classification { ancient, immortal, eternal };

[[nodiscard]] inline const char* to_string(FlowCase c) noexcept {
    switch (c) {
    case FlowCase::euclid_sphere: return "EUCLID_SPHERE";
    case FlowCase::euclid_cylinder: return "EUCLID_CYLINDER";
    case FlowCase::horo: return "HORO";
    case FlowCase::hyp_umbilic: return "HYP_UMBILIC";
    case FlowCase::hyp_cylinder: return "HYP_CYLINDER";
    case FlowCase::sphere_g: return "SPHERE_G";
    }
    return "?";
}

[[nodiscard]] inline const char* to_string(Classification c) noexcept {
    switch (c) {
    case Classification::ancient: return "ancient";
    case Classification::immortal: return "immortal";
    case Classification::eternal: return "eternal";
    }
    return "?";
}

/// Evaluations closer than this to a finite endpoint are rejected.
inline constexpr double kEndpointExclusion = 1e-12;
/// Band around t* inside which a slightly negative q is clamped to zero.
inline constexpr double kClampBand = 1e-13;

/// Open maximal interval of definition; infinite ends are +-infinity.
struct FlowInterval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    [[nodiscard]] bool lower_finite() const noexcept { return std::isfinite(lo); }
    [[nodiscard]] bool upper_finite() const noexcept { return std::isfinite(hi); }
    [[nodiscard]] bool contains(double t) const noexcept {
        return (!lower_finite() || t > lo + kEndpointExclusion) && (!upper_finite() || t < hi - kEndpointExclusion);
    }
};

[[nodiscard]] inline Classification classify(const FlowInterval& iv) noexcept {
    if (!iv.lower_finite() && iv.upper_finite()) return Classification::ancient;
    if (iv.lower_finite() && !iv.upper_finite()) return Classification::immortal;
    return Classification::eternal;
}

/// A solved flow by parallel hypersurfaces: F^t = C(mu(t)) F + S(mu(t)) N.
/// Immutable; all evaluators are pure.
class FlowProfile {
public:
    [[nodiscard]] const PrincipalSpectrum& spectrum() const noexcept { return spec_; }
    [[nodiscard]] FlowCase flow_case() const noexcept { return case_; }
    [[nodiscard]] const FlowInterval& interval() const noexcept { return interval_; }
    [[nodiscard]] Classification classification() const noexcept { return classify(interval_); }
    /// a = H / n of the initial hypersurface.
    [[nodiscard]] double a() const noexcept { return a_; }
    /// The finite endpoint of the interval, if any.
    [[nodiscard]] std::optional<double> t_star() const noexcept {
        if (interval_.upper_finite()) return interval_.hi;
        if (interval_.lower_finite()) return interval_.lo;
        return std::nullopt;
    }
    /// Multiplicity used in the exponent e^{t/m}: the common multiplicity for
    /// sphere and cylinder cases, the multiplicity of 1/r0 for Euclidean
    /// flows and n for umbilic cases.
    [[nodiscard]] int exponent_multiplicity() const noexcept { return m_; }

    [[nodiscard]] bool contains(double t) const noexcept { return interval_.contains(t); }

    /// mu(t); OutOfInterval outside the open interval.
    [[nodiscard]] double mu(double t) const {
        require_inside(t);
        return mu_unchecked(t);
    }

    /// mu(t) evaluated in extended precision.
    [[nodiscard]] long double mu_extended(double t) const {
        require_inside(t);
        return mu_unchecked<long double>(t);
    }

    /// Limit of mu at a finite endpoint (q clamped to zero there).
    [[nodiscard]] std::optional<double> mu_at_finite_endpoint() const {
        const auto ts = t_star();
        if (!ts) return std::nullopt;
        return mu_unchecked(*ts, true);
    }

    /// The quantity under the square root of the closed forms.
    [[nodiscard]] double q(double t) const { return q_as<double>(t); }

    /// Printed closed forms (cosh mu, sinh mu) for the umbilic case.
    [[nodiscard]] std::pair<double, double> umbilic_cosh_sinh_mu(double t) const {
        expect(FlowCase::hyp_umbilic);
        require_inside(t);
        const double e = std::exp(t / m_);
        const double sq = std::sqrt(q(t));
        const double ak = std::abs(k_);
        const double den = 1.0 - k_ * k_;
        return {(e - ak * sq) / den, (k_ > 0 ? 1.0 : -1.0) * (ak * e - sq) / den};
    }

    /// Printed closed forms (cosh 2mu, sinh 2mu) for the hyperbolic cylinder.
    [[nodiscard]] std::pair<double, double> cylinder_cosh_sinh_2mu(double t) const {
        expect(FlowCase::hyp_cylinder);
        require_inside(t);
        const double e = std::exp(t / m_);
        const double sq = std::sqrt(q(t));
        const double den = a_ * a_ - 1.0;
        return {(-e + a_ * sq) / den, (-a_ * e + sq) / den};
    }

    /// Printed closed forms (cos g mu, sin g mu) for the sphere.
    [[nodiscard]] std::pair<double, double> sphere_cos_sin_gmu(double t) const {
        expect(FlowCase::sphere_g);
        require_inside(t);
        const double e = std::exp(t / m_);
        const double sq = std::sqrt(q(t));
        const double den = a_ * a_ + 1.0;
        return {(e + a_ * sq) / den, (-a_ * e + sq) / den};
    }

    /// |prod_j (C - k_j S)^{m_j} - e^t| at mu(t), evaluated in extended precision.
    [[nodiscard]] double product_residual(double t) const {
        const long double p = flow_product<long double>(spec_, mu_extended(t));
        return static_cast<double>(std::abs(p - std::exp(static_cast<long double>(t))));
    }

private:
    FlowProfile(PrincipalSpectrum spec, FlowCase c, FlowInterval iv, int m, double k, double r0)
        : spec_(std::move(spec)), case_(c), interval_(iv), m_(m), k_(k), r0_(r0) {
        a_ = spec_.mean_per_direction();
    }

    void require_inside(double t) const {
        if (!std::isfinite(t) || !interval_.contains(t)) {
            std::ostringstream os;
            os << "t = " << t << " is outside the open interval (" << interval_.lo << ", " << interval_.hi << ")";
            throw OutOfInterval(os.str());
        }
    }

    void expect(FlowCase c) const {
        if (case_ != c) throw DomainError(std::string("operation requires case ") + to_string(c));
    }

    template <std::floating_point Real>
    [[nodiscard]] Real mean_as() const {
        Real h = 0;
        for (const auto& e : spec_.entries()) h += Real(e.m) * Real(e.k);
        return h / Real(spec_.n());
    }

    template <std::floating_point Real>
    [[nodiscard]] Real q_as(Real t) const {
        using std::expm1;
        const Real a = mean_as<Real>(), k = k_, m = m_;
        switch (case_) {
        case FlowCase::hyp_umbilic: return clamp_q<Real>(expm1(2 * t / m) + k * k, t);
        case FlowCase::hyp_cylinder: return expm1(2 * t / m) + a * a;
        case FlowCase::sphere_g: return clamp_q<Real>(a * a - expm1(2 * t / m), t);
        default: return std::numeric_limits<Real>::quiet_NaN();
        }
    }

    template <std::floating_point Real>
    [[nodiscard]] Real clamp_q(Real q, Real t) const {
        if (q >= 0) return q;
        const auto ts = t_star();
        if (ts && std::abs(static_cast<double>(t) - *ts) <= kClampBand) return 0;
        throw OutOfInterval("q(t) < 0 at t = " + std::to_string(static_cast<double>(t)));
    }

    // The printed closed forms with their cancelling differences rationalized,
    // e.g. |k| e - sqrt(q) = (k^2 - 1)(e^2 - 1) / (|k| e + sqrt(q)).
    template <std::floating_point Real>
    [[nodiscard]] Real mu_unchecked(Real t, bool at_endpoint = false) const {
        using std::asinh, std::atan2, std::exp, std::expm1, std::sqrt;
        const Real a = mean_as<Real>(), k = k_, m = m_, r0 = r0_;
        switch (case_) {
        case FlowCase::euclid_sphere:
        case FlowCase::euclid_cylinder: return -r0 * expm1(t / m);
        case FlowCase::horo: return -k * t / m;
        case FlowCase::hyp_umbilic: {
            const Real e = exp(t / m);
            const Real sinh_mu = -(k > 0 ? Real(1) : Real(-1)) * expm1(2 * t / m) / (std::abs(k) * e + (at_endpoint ? Real(0) : sqrt(q_as(t))));
            return asinh(sinh_mu);
        }
        case FlowCase::hyp_cylinder: {
            const Real e = exp(t / m);
            const Real sinh_2mu = -expm1(2 * t / m) / (sqrt(q_as(t)) + a * e);
            return asinh(sinh_2mu) / 2;
        }
        case FlowCase::sphere_g: {
            const Real e = exp(t / m);
            const Real sq = at_endpoint ? Real(0) : sqrt(q_as(t));
            const Real sin_gmu = -expm1(2 * t / m) / (sq + a * e);
            const Real cos_gmu = (e + a * sq) / (a * a + 1);
            return atan2(sin_gmu, cos_gmu) / Real(spec_.g());
        }
        }
        return std::numeric_limits<Real>::quiet_NaN();
    }

    PrincipalSpectrum spec_;
    FlowCase case_;
    FlowInterval interval_;
    int m_ = 1;
    double k_ = 0.0;
    double r0_ = 0.0;
    double a_ = 0.0;

    friend FlowProfile solve_euclidean(int, int, double);
    friend FlowProfile solve_horosphere(int, double);
    friend FlowProfile solve_hyperbolic_umbilic(int, double, bool);
    friend FlowProfile solve_hyperbolic_cylinder(int, double);
    friend FlowProfile solve_sphere(int, int, double);
};

// ---------------------------------------------------------------------------
// Solvers
// ---------------------------------------------------------------------------

/// Sphere (m = n) or cylinder S^m x E^{n-m} of radius r0 in E^{n+1}:
/// mu(t) = r0 (1 - e^{t/m}), eternal.
inline FlowProfile solve_euclidean(int n, int m, double r0) {
    auto spec = euclidean_spectrum(n, m, r0);
    return FlowProfile(std::move(spec), m == n ? FlowCase::euclid_sphere : FlowCase::euclid_cylinder, FlowInterval{},
                       m, 1.0 / r0, r0);
}

/// Horosphere with all curvatures k = +-1: mu(t) = -k t / n, eternal. Only
/// |k| = 1 is validated; k = -1 has H < 0 but still satisfies the product
/// equation.
inline FlowProfile solve_horosphere(int n, double k) {
    if (k != 1.0 && k != -1.0) throw DomainError("horosphere curvature must be exactly +1 or -1");
    auto spec = hyperbolic_spectrum(HyperbolicKind::horosphere, n, k);
    return FlowProfile(std::move(spec), FlowCase::horo, FlowInterval{}, n, k, 0.0);
}

/// Totally umbilic hypersurface of H^{n+1} with curvature k, |k| != 1.
/// Immortal for 0 < |k| < 1 with t_lo = (n/2) ln(1 - k^2), eternal for |k| > 1.
/// Negative k is refused unless `allow_negative` is set.
inline FlowProfile solve_hyperbolic_umbilic(int n, double k, bool allow_negative = false) {
    if (k == 0.0 || k == 1.0 || k == -1.0) throw DomainError("umbilic curvature k must avoid {-1, 0, 1}");
    if (k < 0.0 && !allow_negative) throw NonMeanConvex("umbilic flow needs k > 0 (H > 0); pass the override for k < 0");
    auto spec = hyperbolic_spectrum(HyperbolicKind::umbilic, n, k);
    FlowInterval iv;
    if (std::abs(k) < 1.0) iv.lo = 0.5 * n * std::log1p(-k * k);
    return FlowProfile(std::move(spec), FlowCase::hyp_umbilic, iv, n, k, 0.0);
}

/// Cylinder S^m x H^m in H^{2m+1} with k1 > 1 and k2 = 1/k1; eternal.
inline FlowProfile solve_hyperbolic_cylinder(int m, double k1) {
    if (m < 1) throw DomainError("multiplicity must be positive");
    if (!(k1 > 1.0)) throw DomainError("hyperbolic cylinder requires k1 > 1");
    auto spec = hyperbolic_spectrum(HyperbolicKind::cylinder, 2 * m, k1, m);
    return FlowProfile(std::move(spec), FlowCase::hyp_cylinder, FlowInterval{}, m, k1, 0.0);
}

/// Isoparametric hypersurface of S^{n+1} with g distinct curvatures of common
/// multiplicity m; ancient on (-inf, t*) with t* = (m/2) ln(a^2 + 1).
inline FlowProfile solve_sphere(int g, int m, double k1) {
    auto spec = sphere_spectrum_from_k1(g, k1, m);
    const double a = spec.mean_per_direction();
    if (!(a > 0.0)) {
        std::ostringstream os;
        os << "a = H/n = " << a << " <= 0; g = " << g << " needs k1 > " << sphere_k1_mean_convex_bound(g);
        throw NonMeanConvex(os.str());
    }
    FlowInterval iv;
    iv.hi = 0.5 * m * std::log1p(a * a);
    return FlowProfile(std::move(spec), FlowCase::sphere_g, iv, m, k1, 0.0);
}

/// Recognizes a catalog spectrum and dispatches to the matching solver.
inline FlowProfile solve_closed_form(const PrincipalSpectrum& spec, bool allow_negative = false) {
    const auto& e = spec.entries();
    const int n = spec.n();
    switch (spec.space_form()) {
    case SpaceForm::euclidean:
        if (e.size() == 1 && e[0].k > 0.0) return solve_euclidean(n, n, 1.0 / e[0].k);
        if (e.size() == 2) {
            const auto& curved = e[0].k != 0.0 ? e[0] : e[1];
            const auto& flat = e[0].k != 0.0 ? e[1] : e[0];
            if (flat.k == 0.0 && curved.k > 0.0) return solve_euclidean(n, curved.m, 1.0 / curved.k);
        }
        break;
    case SpaceForm::hyperbolic:
        if (e.size() == 1 && std::abs(e[0].k) == 1.0) return solve_horosphere(n, e[0].k);
        if (e.size() == 1) return solve_hyperbolic_umbilic(n, e[0].k, allow_negative);
        if (e.size() == 2 && e[0].m == e[1].m) {
            const double k1 = std::max(e[0].k, e[1].k);
            const double k2 = std::min(e[0].k, e[1].k);
            if (k1 > 1.0 && std::abs(k1 * k2 - 1.0) <= 1e-12) return solve_hyperbolic_cylinder(e[0].m, k1);
        }
        break;
    case SpaceForm::spherical:
        if (spec.equal_multiplicity() && valid_sphere_g(spec.g())) {
            const double k1 = e[0].k;
            const auto ref = sphere_spectrum_from_k1(spec.g(), k1, e[0].m);
            if (ref.same_as(spec, 1e-12)) return solve_sphere(spec.g(), e[0].m, k1);
        }
        break;
    }
    throw DomainError("no closed-form solution for this spectrum; use the numerical solvers");
}

// ---------------------------------------------------------------------------
// Curvatures along the flow and limit objects
// ---------------------------------------------------------------------------

/// Transported principal curvatures k_j^t with multiplicities.
[[nodiscard]] inline std::vector<CurvatureEntry> flow_curvatures(const FlowProfile& profile, double t) {
    const double mu = profile.mu(t);
    std::vector<CurvatureEntry> out;
    for (const auto& e : profile.spectrum().entries())
        out.push_back({parallel_curvature(e.k, mu, profile.spectrum().space_form()), e.m});
    return out;
}

/// H^t = sum_j m_j k_j^t.
[[nodiscard]] inline double flow_mean_curvature(const FlowProfile& profile, double t) {
    double h = 0.0;
    for (const auto& e : flow_curvatures(profile, t)) h += e.m * e.k;
    return h;
}

enum class MinimalLimit { totally_geodesic, clifford, cartan_type };

[[nodiscard]] inline const char* to_string(MinimalLimit l) noexcept {
    switch (l) {
    case MinimalLimit::totally_geodesic: return "totally geodesic hypersurface";
    case MinimalLimit::clifford: return "Clifford minimal hypersurface";
    case MinimalLimit::cartan_type: return "Cartan-type minimal hypersurface";
    }
    return "?";
}

struct MinimalInvariants {
    long long second_fundamental_form_sq = 0; ///< |A|^2 = n (g - 1)
    long long scalar_curvature = 0;           ///< R = n (n - g)
    MinimalLimit kind = MinimalLimit::totally_geodesic;
};

/// Invariants of the minimal hypersurface reached at t* on the sphere.
[[nodiscard]] inline MinimalInvariants minimal_invariants(int g, int m) {
    if (!valid_sphere_g(g)) throw DomainError("g must be in {1,2,3,4,6}");
    if (m < 1) throw DomainError("multiplicity must be positive");
    const long long n = static_cast<long long>(g) * m;
    const MinimalLimit kind = g == 1 ? MinimalLimit::totally_geodesic
                              : g == 2 ? MinimalLimit::clifford
                                       : MinimalLimit::cartan_type;
    return {n * (g - 1), n * (n - g), kind};
}

struct EndpointLimit {
    double t = 0.0;
    std::string object;
    int dimension = 0;
    std::vector<int> vanishing_factors; ///< 1-based indices j with (C - k_j S)^2 -> 0
    std::optional<MinimalInvariants> minimal;
};

struct LimitSummary {
    EndpointLimit lower;
    EndpointLimit upper;

    [[nodiscard]] std::string text() const {
        std::ostringstream os;
        auto line = [&os](const char* label, const EndpointLimit& e) {
            os << label << " (t -> " << e.t << "): " << e.object << ", dimension " << e.dimension;
            if (!e.vanishing_factors.empty()) {
                os << ", vanishing metric factors j =";
                for (int j : e.vanishing_factors) os << ' ' << j;
            }
            if (e.minimal)
                os << ", |A|^2 = " << e.minimal->second_fundamental_form_sq << ", R = " << e.minimal->scalar_curvature;
            os << '\n';
        };
        line("lower", lower);
        line("upper", upper);
        return os.str();
    }
};

[[nodiscard]] inline LimitSummary limit_summary(const FlowProfile& profile) {
    const auto& spec = profile.spectrum();
    const int n = spec.n();
    const auto& iv = profile.interval();
    LimitSummary s;
    s.lower.t = iv.lo;
    s.upper.t = iv.hi;
    std::vector<int> all;
    for (int j = 1; j <= spec.g(); ++j) all.push_back(j);

    switch (profile.flow_case()) {
    case FlowCase::euclid_sphere:
        s.lower = {iv.lo, "point", 0, all, std::nullopt};
        s.upper = {iv.hi, "sphere of unbounded radius", n, {}, std::nullopt};
        break;
    case FlowCase::euclid_cylinder: {
        const int m = profile.exponent_multiplicity();
        s.lower = {iv.lo, "Euclidean subspace", n - m, {1}, std::nullopt};
        s.upper = {iv.hi, "cylinder of unbounded radius", n, {}, std::nullopt};
        break;
    }
    case FlowCase::horo:
        s.lower = {iv.lo, "point", 0, all, std::nullopt};
        s.upper = {iv.hi, "conformal boundary", n, {}, std::nullopt};
        break;
    case FlowCase::hyp_umbilic:
        if (iv.lower_finite())
            s.lower = {iv.lo, "totally geodesic hypersurface", n, {}, std::nullopt};
        else
            s.lower = {iv.lo, "point", 0, all, std::nullopt};
        s.upper = {iv.hi, "conformal boundary", n, {}, std::nullopt};
        break;
    case FlowCase::hyp_cylinder: {
        const int m = profile.exponent_multiplicity();
        s.lower = {iv.lo, "submanifold", n - m, {1}, std::nullopt};
        s.upper = {iv.hi, "conformal boundary", n, {}, std::nullopt};
        break;
    }
    case FlowCase::sphere_g: {
        const int g = spec.g();
        const int m = profile.exponent_multiplicity();
        const auto inv = minimal_invariants(g, m);
        s.lower = {iv.lo, g == 1 ? "point" : "submanifold", m * (g - 1), {1}, std::nullopt};
        s.upper = {iv.hi, to_string(inv.kind), n, {}, inv};
        break;
    }
    }
    return s;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

struct ProfileSample {
    double t = 0.0;
    double mu = 0.0;
    double mean_curvature = 0.0;
    double residual = 0.0;
};

/// Uniform grid over the interval clipped to [t_min, t_max]; finite
/// endpoints are pulled in by `margin`.
[[nodiscard]] inline std::vector<double> profile_grid(const FlowProfile& profile, double t_min, double t_max,
                                                      int points, double margin = 1e-3) {
    if (points < 1) throw DomainError("grid needs at least one point");
    const auto& iv = profile.interval();
    const double lo = iv.lower_finite() ? std::max(t_min, iv.lo + margin) : t_min;
    const double hi = iv.upper_finite() ? std::min(t_max, iv.hi - margin) : t_max;
    if (!(lo <= hi)) throw DomainError("requested time range does not meet the interval of definition");
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        grid[static_cast<std::size_t>(i)] = points == 1 ? lo : lo + (hi - lo) * i / (points - 1);
    return grid;
}

[[nodiscard]] inline std::vector<ProfileSample> sample_profile(const FlowProfile& profile,
                                                               const std::vector<double>& grid) {
    std::vector<ProfileSample> out;
    out.reserve(grid.size());
    for (double t : grid) {
        const double mu = profile.mu(t);
        out.push_back({t, mu, mean_curvature_parallel(profile.spectrum(), mu), profile.product_residual(t)});
    }
    return out;
}

}  // namespace imcf
