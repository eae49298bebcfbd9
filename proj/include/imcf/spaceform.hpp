#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "imcf/errors.hpp"
#include "imcf/spectrum.hpp"

namespace imcf {

/// Denominator threshold below which the parallel map is treated as focal.
inline constexpr double kFocalTolerance = 1e-14;
/// Input tolerance for the model-quadric and unit-normal checks.
inline constexpr double kQuadricTolerance = 1e-9;

// ---------------------------------------------------------------------------
// C_eps / S_eps
// ---------------------------------------------------------------------------

/// cos / 1 / cosh of mu for eps = +1 / 0 / -1.
template <std::floating_point Real>
[[nodiscard]] Real c_eps(SpaceForm sf, Real mu) noexcept {
    using std::cos, std::cosh;
    switch (sf) {
    case SpaceForm::spherical: return cos(mu);
    case SpaceForm::euclidean: return Real(1);
    case SpaceForm::hyperbolic: return cosh(mu);
    }
    return std::numeric_limits<Real>::quiet_NaN();
}

/// sin / identity / sinh of mu for eps = +1 / 0 / -1.
template <std::floating_point Real>
[[nodiscard]] Real s_eps(SpaceForm sf, Real mu) noexcept {
    using std::sin, std::sinh;
    switch (sf) {
    case SpaceForm::spherical: return sin(mu);
    case SpaceForm::euclidean: return mu;
    case SpaceForm::hyperbolic: return sinh(mu);
    }
    return std::numeric_limits<Real>::quiet_NaN();
}

// ---------------------------------------------------------------------------
// Ambient points
// ---------------------------------------------------------------------------

/// Coordinates in E^{n+1} (eps = 0), E^{n+2} (eps = +1) or L^{n+2} (eps = -1).
struct AmbientPoint {
    std::vector<double> coords;

    AmbientPoint() = default;
    explicit AmbientPoint(std::vector<double> c) : coords(std::move(c)) {}
    AmbientPoint(std::initializer_list<double> c) : coords(c) {}

    [[nodiscard]] std::size_t size() const noexcept { return coords.size(); }
    double& operator[](std::size_t i) noexcept { return coords[i]; }
    double operator[](std::size_t i) const noexcept { return coords[i]; }

    friend bool operator==(const AmbientPoint&, const AmbientPoint&) = default;
};

[[nodiscard]] inline AmbientPoint combine(double a, const AmbientPoint& x, double b, const AmbientPoint& y) {
    if (x.size() != y.size()) throw DomainError("ambient dimension mismatch");
    AmbientPoint r;
    r.coords.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = a * x[i] + b * y[i];
    return r;
}

/// Ambient bilinear form: Lorentzian (-,+,...,+) for eps = -1, Euclidean otherwise.
[[nodiscard]] inline double ambient_inner(SpaceForm sf, std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DomainError("ambient dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    if (sf == SpaceForm::hyperbolic && !x.empty()) s -= 2.0 * x[0] * y[0];
    return s;
}

[[nodiscard]] inline double ambient_inner(SpaceForm sf, const AmbientPoint& x, const AmbientPoint& y) {
    return ambient_inner(sf, std::span<const double>(x.coords), std::span<const double>(y.coords));
}

/// Signed deviation from the model quadric: |x|^2 - 1 on the sphere,
/// <x,x>_L + 1 on the hyperboloid, 0 in Euclidean space.
[[nodiscard]] inline double quadric_defect(SpaceForm sf, const AmbientPoint& x) {
    switch (sf) {
    case SpaceForm::spherical: return ambient_inner(sf, x, x) - 1.0;
    case SpaceForm::hyperbolic: return ambient_inner(sf, x, x) + 1.0;
    case SpaceForm::euclidean: return 0.0;
    }
    return 0.0;
}

[[nodiscard]] inline bool on_quadric(SpaceForm sf, const AmbientPoint& x, double tol = 1e-12) {
    if (std::abs(quadric_defect(sf, x)) > tol) return false;
    return sf != SpaceForm::hyperbolic || x[0] >= 1.0 - tol;
}

namespace detail {

inline void check_frame(SpaceForm sf, const AmbientPoint& f, const AmbientPoint& nrm) {
    if (f.size() != nrm.size()) throw DomainError("point and normal have different dimensions");
    if (sf != SpaceForm::euclidean && !on_quadric(sf, f, kQuadricTolerance))
        throw NotOnQuadric("point violates the model quadric (defect " +
                           std::to_string(quadric_defect(sf, f)) + ")");
    const double nn = ambient_inner(sf, nrm, nrm);
    if (std::abs(nn - 1.0) > kQuadricTolerance)
        throw NotUnitNormal("normal has squared norm " + std::to_string(nn));
    if (sf != SpaceForm::euclidean && std::abs(ambient_inner(sf, f, nrm)) > kQuadricTolerance)
        throw NotUnitNormal("normal is not orthogonal to the point");
}

}  // namespace detail

/// Point at signed distance mu along the normal geodesic: C F + S N.
[[nodiscard]] inline AmbientPoint parallel_point(const AmbientPoint& f, const AmbientPoint& nrm, double mu,
                                                 SpaceForm sf) {
    detail::check_frame(sf, f, nrm);
    return combine(c_eps(sf, mu), f, s_eps(sf, mu), nrm);
}

/// Unit normal of the parallel hypersurface: -eps S F + C N.
[[nodiscard]] inline AmbientPoint parallel_normal(const AmbientPoint& f, const AmbientPoint& nrm, double mu,
                                                  SpaceForm sf) {
    detail::check_frame(sf, f, nrm);
    return combine(-epsilon(sf) * s_eps(sf, mu), f, c_eps(sf, mu), nrm);
}

// ---------------------------------------------------------------------------
// Parallel-hypersurface calculus on spectra
// ---------------------------------------------------------------------------

/// k^mu = (eps S + k C) / (C - k S).
template <std::floating_point Real>
[[nodiscard]] Real parallel_curvature(Real k, Real mu, SpaceForm sf) {
    const Real c = c_eps(sf, mu);
    const Real s = s_eps(sf, mu);
    const Real den = c - k * s;
    if (!(std::abs(den) >= Real(kFocalTolerance)))
        throw FocalDegeneracy("focal point reached for k = " + std::to_string(static_cast<double>(k)) +
                              " at mu = " + std::to_string(static_cast<double>(mu)));
    return (Real(epsilon(sf)) * s + k * c) / den;
}

/// Diagonal factors of the first and second fundamental forms and the
/// transported curvature for one distinct principal curvature.
struct ParallelData {
    double metric_factor = 1.0;
    double shape_factor = 0.0;
    double curvature = 0.0;
};

[[nodiscard]] inline std::vector<ParallelData> parallel_data(const PrincipalSpectrum& spec, double mu) {
    const SpaceForm sf = spec.space_form();
    const double c = c_eps(sf, mu);
    const double s = s_eps(sf, mu);
    std::vector<ParallelData> out;
    out.reserve(spec.entries().size());
    for (std::size_t j = 0; j < spec.entries().size(); ++j) {
        const double k = spec.entries()[j].k;
        const double den = c - k * s;
        if (!(std::abs(den) >= kFocalTolerance))
            throw FocalDegeneracy("focal point for curvature index " + std::to_string(j + 1) + " at mu = " +
                                  std::to_string(mu));
        const double num = epsilon(sf) * s + k * c;
        out.push_back({den * den, den * num, num / den});
    }
    return out;
}

/// ParallelData kept in long double; large metric factors need the extra bits.
struct ParallelDataExtended {
    long double metric_factor = 1.0L;
    long double shape_factor = 0.0L;
    long double curvature = 0.0L;
};

[[nodiscard]] inline std::vector<ParallelDataExtended> parallel_data_extended(const PrincipalSpectrum& spec, long double mu) {
    const SpaceForm sf = spec.space_form();
    const long double c = c_eps(sf, mu);
    const long double s = s_eps(sf, mu);
    std::vector<ParallelDataExtended> out;
    out.reserve(spec.entries().size());
    for (std::size_t j = 0; j < spec.entries().size(); ++j) {
        const long double k = spec.entries()[j].k;
        const long double den = c - k * s;
        if (!(std::abs(den) >= kFocalTolerance))
            throw FocalDegeneracy("focal point for curvature index " + std::to_string(j + 1));
        const long double num = epsilon(sf) * s + k * c;
        out.push_back({den * den, den * num, num / den});
    }
    return out;
}

/// H^mu = sum_j m_j k_j^mu.
[[nodiscard]] inline double mean_curvature_parallel(const PrincipalSpectrum& spec, double mu) {
    double h = 0.0;
    for (const auto& e : spec.entries()) h += e.m * parallel_curvature(e.k, mu, spec.space_form());
    return h;
}

/// Smallest diagonal metric factor (C - k_j S)^2 over the spectrum.
[[nodiscard]] inline double min_metric_factor(const PrincipalSpectrum& spec, double mu) {
    const double c = c_eps(spec.space_form(), mu);
    const double s = s_eps(spec.space_form(), mu);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : spec.entries()) {
        const double d = c - e.k * s;
        best = std::min(best, d * d);
    }
    return best;
}

/// prod_j (C - k_j S)^{m_j}, which equals e^t along the flow.
template <std::floating_point Real = double>
[[nodiscard]] Real flow_product(const PrincipalSpectrum& spec, Real mu) {
    const Real c = c_eps(spec.space_form(), mu);
    const Real s = s_eps(spec.space_form(), mu);
    Real p = 1;
    for (const auto& e : spec.entries()) {
        const Real d = c - Real(e.k) * s;
        for (int r = 0; r < e.m; ++r) p *= d;
    }
    return p;
}

/// sum_j m_j ln(C - k_j S), which equals t along the flow. Requires every
/// factor to be positive.
template <class Real = double>
[[nodiscard]] Real log_flow_product(const PrincipalSpectrum& spec, Real mu) {
    using std::log;
    const Real c = c_eps(spec.space_form(), mu);
    const Real s = s_eps(spec.space_form(), mu);
    Real sum = 0;
    for (const auto& e : spec.entries()) {
        const Real d = c - Real(e.k) * s;
        if (!(d > 0))
            throw FactorNonPositive("factor C - k S = " + std::to_string(static_cast<double>(d)) +
                                    " for k = " + std::to_string(e.k) +
                                    " at mu = " + std::to_string(static_cast<double>(mu)));
        sum += e.m * log(d);
    }
    return sum;
}

/// |prod_j (C - k_j S)^{m_j} - e^t|.
[[nodiscard]] inline double product_residual(const PrincipalSpectrum& spec, double mu, double t) {
    return std::abs(flow_product(spec, mu) - std::exp(t));
}

}  // namespace imcf
