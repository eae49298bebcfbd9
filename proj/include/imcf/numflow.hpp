#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "imcf/errors.hpp"
#include "imcf/spaceform.hpp"
#include "imcf/spectrum.hpp"

namespace imcf {

enum class BoundaryReason { mean_curvature_zero, focal_degeneracy, step_underflow };
enum class PathEnd { lower, upper };

[[nodiscard]] inline const char* to_string(BoundaryReason r) noexcept {
    switch (r) {
    case BoundaryReason::mean_curvature_zero: return "MEAN_CURVATURE_ZERO";
    case BoundaryReason::focal_degeneracy: return "FOCAL_DEGENERACY";
    case BoundaryReason::step_underflow: return "STEP_UNDERFLOW";
    }
    return "?";
}

[[nodiscard]] inline const char* to_string(PathEnd e) noexcept { return e == PathEnd::lower ? "lower" : "upper"; }

inline constexpr double kMinTolerance = 1e-13;
inline constexpr double kMaxTolerance = 1e-6;
/// A metric factor (C - k S)^2 below this value halts the path.
inline constexpr double kFocalMetricThreshold = 1e-10;
inline constexpr double kNewtonTolerance = 1e-12;
inline constexpr int kNewtonMaxIterations = 50;

struct PathSample {
    double t = 0.0;
    double mu = 0.0;
    double mean_curvature = 0.0;
};

struct BoundaryEvent {
    double t = 0.0;
    double mu = 0.0;
    BoundaryReason reason = BoundaryReason::step_underflow;
    PathEnd end = PathEnd::upper;
};

/// A numerically traced flow; samples are ordered by increasing t.
struct NumericPath {
    PrincipalSpectrum spectrum;
    std::vector<PathSample> samples;
    double tol = 0.0;
    double t_lo = 0.0; ///< requested span
    double t_hi = 0.0;
    std::vector<BoundaryEvent> events;

    [[nodiscard]] const BoundaryEvent* event_at(PathEnd end) const {
        for (const auto& e : events)
            if (e.end == end) return &e;
        return nullptr;
    }

    /// Sample at exactly time t, if recorded.
    [[nodiscard]] std::optional<PathSample> sample_at(double t) const {
        auto it = std::lower_bound(samples.begin(), samples.end(), t,
                                   [](const PathSample& s, double v) { return s.t < v; });
        if (it != samples.end() && it->t == t) return *it;
        return std::nullopt;
    }
};

/// |sum_j m_j ln(C - k_j S) - t|, the residual of the log-sum form of the
/// product equation.
[[nodiscard]] inline double log_product_residual(const PrincipalSpectrum& spec, double mu, double t) {
    return static_cast<double>(std::abs(log_flow_product<long double>(spec, mu) - t));
}

struct FlowOptions {
    /// Allows spectra with H < 0 (e.g. the horosphere with k = -1); the
    /// thresholds then act on |H|.
    bool allow_negative_mean_curvature = false;
    /// Times the integrator must land on exactly.
    std::vector<double> output_times;
    long max_steps = 2'000'000;
};

namespace detail {

[[nodiscard]] inline double initial_sign(const PrincipalSpectrum& spec, bool allow_negative) {
    const double h0 = spec.mean_curvature();
    if (h0 > 0.0) return 1.0;
    if (h0 < 0.0 && allow_negative) return -1.0;
    std::ostringstream os;
    os << "initial mean curvature H(0) = " << h0 << " must be positive";
    throw PreconditionError(os.str());
}

/// True when every factor C - k_j S is positive and sigma * H(mu) > 0.
[[nodiscard]] inline bool on_branch(const PrincipalSpectrum& spec, double mu, double sigma, double* h_out = nullptr) {
    const double c = c_eps(spec.space_form(), mu);
    const double s = s_eps(spec.space_form(), mu);
    double h = 0.0;
    for (const auto& e : spec.entries()) {
        const double den = c - e.k * s;
        if (!(den > 0.0)) return false;
        h += e.m * (epsilon(spec.space_form()) * s + e.k * c) / den;
    }
    if (h_out) *h_out = h;
    return sigma * h > 0.0;
}

[[nodiscard]] inline double mean_threshold(double tol, double h0) {
    return std::sqrt(tol) * std::max(1.0, std::abs(h0));
}

/// Halt reason after a successful step, if any.
[[nodiscard]] inline std::optional<BoundaryReason> halt_reason(const PrincipalSpectrum& spec, double mu, double h,
                                                               double tol, double h0) {
    if (std::abs(h) < mean_threshold(tol, h0)) return BoundaryReason::mean_curvature_zero;
    if (min_metric_factor(spec, mu) < kFocalMetricThreshold) return BoundaryReason::focal_degeneracy;
    return std::nullopt;
}

/// From a point on the branch, march mu in direction `dir` until H changes
/// sign, then bisect. Returns the last on-branch mu, or nothing if a focal
/// factor vanishes first or no crossing is found.
[[nodiscard]] inline std::optional<double> locate_mean_zero(const PrincipalSpectrum& spec, double mu0, double dir,
                                                            double sigma) {
    auto crossed = [&](double mu) {
        const double c = c_eps(spec.space_form(), mu);
        const double s = s_eps(spec.space_form(), mu);
        double h = 0.0;
        for (const auto& e : spec.entries()) {
            const double den = c - e.k * s;
            if (!(den > 0.0)) return -1;  // focal first
            h += e.m * (epsilon(spec.space_form()) * s + e.k * c) / den;
        }
        return sigma * h > 0.0 ? 0 : 1;
    };
    if (crossed(mu0) != 0) return std::nullopt;
    double good = mu0;
    double bad = mu0;
    double delta = 1e-9 * std::max(1.0, std::abs(mu0));
    bool found = false;
    for (int i = 0; i < 80; ++i) {
        const double trial = mu0 + dir * delta;
        const int c = crossed(trial);
        if (c < 0) return std::nullopt;
        if (c > 0) {
            bad = trial;
            found = true;
            break;
        }
        good = trial;
        delta *= 2.0;
    }
    if (!found) return std::nullopt;
    for (int i = 0; i < 200 && good != bad; ++i) {
        const double mid = 0.5 * (good + bad);
        if (mid == good || mid == bad) break;
        const int c = crossed(mid);
        if (c < 0) return std::nullopt;
        (c == 0 ? good : bad) = mid;
    }
    return good;
}

/// Bisection on min metric factor = threshold near mu0, searching along
/// `dir` when mu0 is still above the threshold and backwards otherwise.
[[nodiscard]] inline double locate_focal(const PrincipalSpectrum& spec, double mu0, double dir) {
    auto below = [&](double mu) { return min_metric_factor(spec, mu) < kFocalMetricThreshold; };
    const bool start_below = below(mu0);
    const double search = start_below ? -dir : dir;
    double near = mu0;
    double far = mu0;
    double delta = 1e-12 * std::max(1.0, std::abs(mu0));
    for (int i = 0; i < 200; ++i) {
        far = mu0 + search * delta;
        if (below(far) != start_below) break;
        near = far;
        delta *= 2.0;
    }
    double good = start_below ? far : near;
    double bad = start_below ? near : far;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (good + bad);
        if (mid == good || mid == bad) break;
        (below(mid) ? bad : good) = mid;
    }
    return good;
}

/// One outward integration branch from (0, 0) to t_end.
inline void integrate_branch(const PrincipalSpectrum& spec, double t_end, double tol, double sigma, double h0,
                             const FlowOptions& opts, std::vector<PathSample>& out,
                             std::vector<BoundaryEvent>& events) {
    if (t_end == 0.0) return;
    const double dir = t_end > 0.0 ? 1.0 : -1.0;
    const PathEnd end = dir > 0 ? PathEnd::upper : PathEnd::lower;

    std::vector<double> stops;
    for (double s : opts.output_times)
        if (dir * s > 0.0 && dir * (s - t_end) < 0.0) stops.push_back(s);
    stops.push_back(t_end);
    std::sort(stops.begin(), stops.end(), [dir](double a, double b) { return dir * a < dir * b; });
    stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
    std::size_t next_stop = 0;

    // Dormand-Prince 5(4)
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;

    auto rhs = [&](double mu, double& f) {
        double h = 0.0;
        if (!on_branch(spec, mu, sigma, &h)) return false;
        f = -1.0 / h;
        return true;
    };

    double t = 0.0;
    double mu = 0.0;
    double k1 = -1.0 / h0;
    double h = dir * std::min(1e-2, std::abs(t_end));
    double err_old = 1e-4;
    long steps = 0;

    while (true) {
        if (++steps > opts.max_steps) {
            events.push_back({t, mu, BoundaryReason::step_underflow, end});
            return;
        }
        const double target = stops[next_stop];
        bool hits_stop = false;
        if (dir * (t + h - target) >= 0.0) {
            h = target - t;
            hits_stop = true;
        }
        if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t))) {
            events.push_back({t, mu, BoundaryReason::step_underflow, end});
            return;
        }

        double k2, k3, k4, k5, k6, k7;
        bool ok = rhs(mu + h * a21 * k1, k2) && rhs(mu + h * (a31 * k1 + a32 * k2), k3) &&
                  rhs(mu + h * (a41 * k1 + a42 * k2 + a43 * k3), k4) &&
                  rhs(mu + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), k5) &&
                  rhs(mu + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), k6);
        double mu_new = 0.0;
        if (ok) {
            mu_new = mu + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            ok = rhs(mu_new, k7);
        }
        if (!ok) {
            h *= 0.25;
            continue;
        }
        const double err_est = std::abs(h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7));
        // A local error e in mu shifts sum_j m_j ln(C - k_j S) - t by about H e
        // for the rest of the branch, hence the 1/|H| weight.
        const double weight = 1.0 / std::max({1.0, std::abs(1.0 / k1), std::abs(1.0 / k7)});
        const double scale = (0.5 * tol + 0.5 * tol * std::max(std::abs(mu), std::abs(mu_new))) * weight;
        const double err = err_est / scale;

        if (err <= 1.0) {
            t = hits_stop ? target : t + h;
            mu = mu_new;
            k1 = k7;
            const double hh = -1.0 / k7;
            out.push_back({t, mu, hh});
            if (auto why = halt_reason(spec, mu, hh, tol, h0)) {
                events.push_back({t, mu, *why, end});
                return;
            }
            if (hits_stop && ++next_stop == stops.size()) return;
            const double fac = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.17) * std::pow(err_old, 0.04);
            h *= std::clamp(fac, 0.2, 5.0);
            err_old = std::max(err, 1e-4);
        } else {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
        }
    }
}

}  // namespace detail

/// Integrates mu' = -1/H(mu), mu(0) = 0 outward from 0 over [t_a, t_b]
/// with an embedded 5(4) Runge-Kutta pair.
[[nodiscard]] inline NumericPath integrate_mu(const PrincipalSpectrum& spec, double t_a, double t_b, double tol,
                                              const FlowOptions& opts = {}) {
    if (!(t_a <= 0.0 && 0.0 <= t_b)) throw DomainError("span must satisfy t_a <= 0 <= t_b");
    if (!(tol >= kMinTolerance && tol <= kMaxTolerance)) throw DomainError("tol must lie in [1e-13, 1e-6]");
    const double sigma = detail::initial_sign(spec, opts.allow_negative_mean_curvature);
    const double h0 = spec.mean_curvature();

    NumericPath path{spec, {}, tol, t_a, t_b, {}};
    std::vector<PathSample> lower;
    detail::integrate_branch(spec, t_a, tol, sigma, h0, opts, lower, path.events);
    std::reverse(lower.begin(), lower.end());
    path.samples = std::move(lower);
    path.samples.push_back({0.0, 0.0, h0});
    detail::integrate_branch(spec, t_b, tol, sigma, h0, opts, path.samples, path.events);
    return path;
}

/// Newton iteration on f(mu) = sum_j m_j ln(C - k_j S) - t, f' = -H(mu),
/// with backtracking that keeps iterates on the branch where every factor
/// is positive and H has the sign of H(0).
[[nodiscard]] inline double solve_product_equation(const PrincipalSpectrum& spec, double t, double mu_guess) {
    const double sigma = spec.mean_curvature() >= 0.0 ? 1.0 : -1.0;
    double mu = mu_guess;
    auto residual = [&](double x) { return static_cast<double>(log_flow_product<long double>(spec, x) - t); };
    double f = residual(mu);
    for (int it = 0; it < kNewtonMaxIterations; ++it) {
        double h = 0.0;
        if (!detail::on_branch(spec, mu, sigma, &h))
            throw NoConvergence("iterate left the mean-convex branch at mu = " + std::to_string(mu));
        // Past |H| ulp(mu) the residual is below what a double mu resolves.
        const double resolution = std::abs(h) * (std::nextafter(std::abs(mu), std::numeric_limits<double>::infinity()) - std::abs(mu));
        if (std::abs(f) <= std::max(kNewtonTolerance, resolution)) {
            // One polishing step where it stays on the branch.
            const double polished = mu + f / h;
            if (detail::on_branch(spec, polished, sigma)) {
                const double fp = residual(polished);
                if (std::abs(fp) <= std::abs(f)) return polished;
            }
            return mu;
        }
        double step = f / h;
        double next = mu + step;
        int backtracks = 0;
        while (!detail::on_branch(spec, next, sigma) && backtracks < 60) {
            step *= 0.5;
            next = mu + step;
            ++backtracks;
        }
        if (backtracks == 60) break;
        mu = next;
        f = residual(mu);
    }
    std::ostringstream os;
    os << "Newton did not reach |f| <= 1e-12 at t = " << t << " (last mu = " << mu << ", f = " << f << ")";
    throw NoConvergence(os.str());
}

/// Warm-started Newton continuation along an increasing grid containing 0.
[[nodiscard]] inline NumericPath continuation_sweep(const PrincipalSpectrum& spec, const std::vector<double>& grid,
                                                    double tol = 1e-10, const FlowOptions& opts = {}) {
    if (grid.empty()) throw DomainError("grid is empty");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw DomainError("grid must be strictly increasing");
    const auto zero = std::find(grid.begin(), grid.end(), 0.0);
    if (zero == grid.end()) throw DomainError("grid must contain t = 0");
    if (!(tol >= kMinTolerance && tol <= kMaxTolerance)) throw DomainError("tol must lie in [1e-13, 1e-6]");
    const double sigma = detail::initial_sign(spec, opts.allow_negative_mean_curvature);
    const double h0 = spec.mean_curvature();
    const std::size_t i0 = static_cast<std::size_t>(zero - grid.begin());

    NumericPath path{spec, {}, tol, grid.front(), grid.back(), {}};

    auto branch = [&](int dir, std::vector<PathSample>& out) {
        const PathEnd end = dir > 0 ? PathEnd::upper : PathEnd::lower;
        double mu = 0.0;
        double h = h0;
        double t_prev = 0.0;
        for (std::size_t i = i0;;) {
            if (dir > 0) {
                if (++i >= grid.size()) return;
            } else {
                if (i == 0) return;
                --i;
            }
            const double t = grid[i];
            double guess = mu - (t - t_prev) / h;
            if (!detail::on_branch(spec, guess, sigma)) guess = mu;
            double mu_new;
            try {
                mu_new = solve_product_equation(spec, t, guess);
            } catch (const Error& err) {
                const double mu_dir = -sigma * dir;
                if (auto star = detail::locate_mean_zero(spec, mu, mu_dir, sigma)) {
                    const double t_star = log_flow_product(spec, *star);
                    if (dir * (t - t_star) > 0.0) {
                        path.events.push_back({t_star, *star, BoundaryReason::mean_curvature_zero, end});
                        return;
                    }
                }
                std::ostringstream os;
                os << "continuation failed at t = " << t << ": " << err.what();
                if (err.family() == ErrorFamily::numerical) throw NoConvergence(os.str());
                throw DomainError(os.str());
            }
            const double h_new = mean_curvature_parallel(spec, mu_new);
            out.push_back({t, mu_new, h_new});
            if (auto why = detail::halt_reason(spec, mu_new, h_new, tol, h0)) {
                path.events.push_back({t, mu_new, *why, end});
                return;
            }
            mu = mu_new;
            h = h_new;
            t_prev = t;
        }
    };

    std::vector<PathSample> lower;
    branch(-1, lower);
    std::reverse(lower.begin(), lower.end());
    path.samples = std::move(lower);
    path.samples.push_back({0.0, 0.0, h0});
    branch(+1, path.samples);
    return path;
}

struct BoundaryEstimate {
    double t = 0.0;
    std::optional<BoundaryReason> reason; ///< empty when the span was left without an event
};

/// Refines the event time at one end of a path. Mean-curvature and focal
/// events are located by bisection in mu and mapped back through the
/// log-sum form, t = sum_j m_j ln(C - k_j S).
[[nodiscard]] inline BoundaryEstimate estimate_boundary(const NumericPath& path, PathEnd end) {
    const double dir = end == PathEnd::upper ? 1.0 : -1.0;
    const BoundaryEvent* ev = path.event_at(end);
    if (!ev) {
        const double span_end = end == PathEnd::upper ? path.t_hi : path.t_lo;
        if (span_end == 0.0 || path.samples.empty())
            throw NoEvent(std::string("no boundary event at the ") + to_string(end) + " end");
        const double reached = end == PathEnd::upper ? path.samples.back().t : path.samples.front().t;
        if (reached != span_end) throw NoEvent(std::string("path stopped early without an event at the ") + to_string(end) + " end");
        return {dir * std::numeric_limits<double>::infinity(), std::nullopt};
    }
    const auto& spec = path.spectrum;
    const double sigma = spec.mean_curvature() >= 0.0 ? 1.0 : -1.0;
    const double mu_dir = -sigma * dir;
    switch (ev->reason) {
    case BoundaryReason::mean_curvature_zero: {
        const auto star = detail::locate_mean_zero(spec, ev->mu, mu_dir, sigma);
        if (!star) return {ev->t, ev->reason};
        return {log_flow_product(spec, *star), ev->reason};
    }
    case BoundaryReason::focal_degeneracy: {
        const double mu_f = detail::locate_focal(spec, ev->mu, mu_dir);
        return {log_flow_product(spec, mu_f), ev->reason};
    }
    case BoundaryReason::step_underflow: return {ev->t, ev->reason};
    }
    return {ev->t, ev->reason};
}

}  // namespace imcf
