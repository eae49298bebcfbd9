#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "imcf/errors.hpp"

namespace imcf {

/// Sign of the ambient sectional curvature.
enum class SpaceForm : int { hyperbolic = -1, euclidean = 0, spherical = 1 };

[[nodiscard]] constexpr int epsilon(SpaceForm sf) noexcept { return static_cast<int>(sf); }

[[nodiscard]] inline SpaceForm space_form_from_epsilon(int eps) {
    switch (eps) {
    case -1: return SpaceForm::hyperbolic;
    case 0: return SpaceForm::euclidean;
    case 1: return SpaceForm::spherical;
    default: throw DomainError("epsilon must be -1, 0 or +1, got " + std::to_string(eps));
    }
}

[[nodiscard]] inline const char* to_string(SpaceForm sf) noexcept {
    switch (sf) {
    case SpaceForm::hyperbolic: return "hyperbolic";
    case SpaceForm::euclidean: return "euclidean";
    case SpaceForm::spherical: return "spherical";
    }
    return "?";
}

/// One distinct principal curvature and its multiplicity.
struct CurvatureEntry {
    double k = 0.0;
    int m = 1;

    friend bool operator==(const CurvatureEntry&, const CurvatureEntry&) = default;
};

/// Parameter of a generated sphere spectrum, k_j = cot(s + (j-1)pi/g).
/// tau = cos(g s) is kept as metadata only.
struct SphereParameter {
    double s = 0.0;
    double tau = 0.0;
};

/// Distinct principal curvatures with multiplicities of an isoparametric
/// hypersurface. The products over i = 1..n used throughout the library are
/// evaluated as powered products over the g distinct values.
class PrincipalSpectrum {
public:
    PrincipalSpectrum(SpaceForm sf, std::vector<CurvatureEntry> entries,
                      std::optional<SphereParameter> sphere_param = std::nullopt)
        : sf_(sf), entries_(std::move(entries)), sphere_param_(sphere_param) {
        if (entries_.empty()) throw DomainError("spectrum needs at least one curvature");
        n_ = 0;
        for (const auto& e : entries_) {
            if (e.m < 1) throw DomainError("multiplicities must be positive");
            if (!std::isfinite(e.k)) throw DomainError("curvatures must be finite");
            n_ += e.m;
        }
        for (std::size_t i = 0; i < entries_.size(); ++i)
            for (std::size_t j = i + 1; j < entries_.size(); ++j)
                if (entries_[i].k == entries_[j].k)
                    throw DomainError("distinct curvatures must be pairwise different");
    }

    [[nodiscard]] SpaceForm space_form() const noexcept { return sf_; }
    [[nodiscard]] int epsilon() const noexcept { return imcf::epsilon(sf_); }
    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] int g() const noexcept { return static_cast<int>(entries_.size()); }
    [[nodiscard]] const std::vector<CurvatureEntry>& entries() const noexcept { return entries_; }
    [[nodiscard]] const std::optional<SphereParameter>& sphere_parameter() const noexcept {
        return sphere_param_;
    }

    /// H = sum of all n principal curvatures.
    [[nodiscard]] double mean_curvature() const noexcept {
        double h = 0.0;
        for (const auto& e : entries_) h += e.m * e.k;
        return h;
    }

    /// a = H / n.
    [[nodiscard]] double mean_per_direction() const noexcept { return mean_curvature() / n_; }

    [[nodiscard]] bool equal_multiplicity() const noexcept {
        return std::all_of(entries_.begin(), entries_.end(),
                           [&](const CurvatureEntry& e) { return e.m == entries_.front().m; });
    }

    /// Entry-wise comparison up to ordering, with absolute tolerance on k.
    [[nodiscard]] bool same_as(const PrincipalSpectrum& other, double tol = 1e-12) const {
        if (sf_ != other.sf_ || n_ != other.n_ || g() != other.g()) return false;
        auto a = entries_;
        auto b = other.entries_;
        auto by_k = [](const CurvatureEntry& x, const CurvatureEntry& y) { return x.k > y.k; };
        std::sort(a.begin(), a.end(), by_k);
        std::sort(b.begin(), b.end(), by_k);
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i].m != b[i].m || std::abs(a[i].k - b[i].k) > tol) return false;
        return true;
    }

private:
    SpaceForm sf_;
    int n_ = 0;
    std::vector<CurvatureEntry> entries_;
    std::optional<SphereParameter> sphere_param_;
};

}  // namespace imcf
