#pragma once

#include "wavelab/blowup.hpp"
#include "wavelab/lattice.hpp"
#include "wavelab/problem.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wavelab {

/// Row statistics recorded for every time level the marcher computes.
struct RowStat {
    double t = 0.0;
    double max_abs = 0.0;
    double min_value = 0.0;
};

/// Rows kept by a march: stored row r is time level r * row_stride.
class LatticeSolution {
public:
    LatticeSolution() = default;
    LatticeSolution(double h, double x_min, std::size_t n_x, std::size_t row_stride)
        : h_(h), x_min_(x_min), n_x_(n_x), row_stride_(row_stride) {}

    double h() const noexcept { return h_; }
    double x_min() const noexcept { return x_min_; }
    std::size_t n_x() const noexcept { return n_x_; }
    std::size_t row_stride() const noexcept { return row_stride_; }
    std::size_t rows() const noexcept { return levels_.size(); }
    std::size_t level(std::size_t r) const noexcept { return levels_[r]; }

    double x(std::size_t i) const noexcept { return x_min_ + h_ * static_cast<double>(i); }
    double t(std::size_t r) const noexcept { return h_ * static_cast<double>(levels_[r]); }
    double operator()(std::size_t i, std::size_t r) const noexcept { return values_[r * n_x_ + i]; }
    std::span<const double> row(std::size_t r) const { return {values_.data() + r * n_x_, n_x_}; }

    void append(std::size_t level, std::span<const double> row);

    /// The stored rows as a GridFunction; requires row_stride == 1.
    GridFunction to_grid() const;

private:
    double h_ = 0.0;
    double x_min_ = 0.0;
    std::size_t n_x_ = 0;
    std::size_t row_stride_ = 1;
    std::vector<std::size_t> levels_;
    std::vector<double> values_;
};

struct MarchOptions {
    /// 0: keep no rows; k: keep every k-th level (plus the last one).
    std::size_t store_stride = 0;
    /// Extra source S(x,t) added to H, for manufactured solutions.
    std::function<double(double, double)> forcing;
    /// Lattice half-width; defaults to R + T_max (R = support radius or cutoff).
    std::optional<double> half_width;
    double cutoff = 20.0;
    /// Refuse to store more values than this.
    std::size_t max_stored_values = 400'000'000;
};

struct MarchResult {
    LatticeSolution solution;
    std::vector<RowStat> history;
    /// First level whose max |u| reached the threshold.
    std::optional<std::size_t> blowup_row;
    double min_value = 0.0;
    double h = 0.0;
};

/// Time-marching on the characteristic lattice with the parallelogram rule
///   u(x,t+h) = u(x+h,t) + u(x-h,t) - u(x,t-h) + h^2 H(x, u(x,t)).
/// Level 0 is eps f; level 1 is eps u^0(x,h) plus the base-triangle source
/// (vertex rule, solved for the unknown apex value). Stops at T_max or at the
/// first level with max |u| >= threshold. The result is the lattice fixed
/// point of the discrete integral equation that picard_step iterates.
/// Throws NumericalOverflow on a non-finite value.
MarchResult march(const ProblemSpec& spec, double h, double T_max, double threshold,
                  const MarchOptions& options = {});

/// Root of the line fitted to w = max|u|^{-(p-1)} against t over the last
/// (up to) 10 first-crossings of the levels 2^n. Needs >= 5 crossings and a
/// strictly increasing tail; throws ExtrapolationError otherwise.
double extrapolate_blowup_time(std::span<const RowStat> history, double p);

struct BlowupRecord {
    double eps = 0.0;
    double T_numeric = 0.0;
    double T_extrapolated = 0.0;
    double h = 0.0;
    double threshold = 0.0;
    double a = 0.0;
    bool censored = false;      ///< reached T_max without blow-up
    bool extrapolated = false;  ///< false: T_extrapolated fell back to T_numeric
    bool converged() const noexcept { return !censored && extrapolated; }
};

/// One blow-up run without row storage.
BlowupRecord measure_blowup(const ProblemSpec& spec, double h, double T_max, double threshold);

/// Independent runs per eps, each with T_max = 3 * upper_lifespan_bound(eps);
/// records sorted by eps. jobs = 0 picks the hardware concurrency.
std::vector<BlowupRecord> epsilon_sweep(const ProblemSpec& spec_template,
                                        std::span<const double> eps_list, double h,
                                        double threshold, unsigned jobs = 0);

/// eps_start * ratio^k, k = 0..count-1.
std::vector<double> geometric_eps(double eps_start, int count, double ratio = 0.70710678118654752);

/// eps for which the unit-constant law eps^{-(p-1)/(1-a)} (or phi^{-1}(eps^{-(p-1)}))
/// equals T_target. Default top of a sweep.
double eps_for_scale(double p, double a, double T_target);

enum class FitRegime { PowerLaw, PhiLaw };

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double stderr_slope = 0.0;
    std::size_t n_points = 0;
    FitRegime regime = FitRegime::PowerLaw;
    double theory_slope = 0.0;
};

/// -(p-1)/(1-a) for a < 0, -(p-1) otherwise (phi-space for a = 0).
double theory_slope(double a, double p);

/// Least squares of log T (or log phi(T) when a = 0) against log eps over
/// uncensored records. Throws InsufficientData below 4 points.
ScalingFit fit_scaling(std::span<const BlowupRecord> records, double a, double p);

struct EnvelopeAuditEntry {
    int j = 0;
    std::size_t checked = 0;
    std::size_t skipped = 0;
    std::size_t violations = 0;
    std::size_t beyond_threshold = 0;
    double worst_margin = 0.0;  ///< min over checked nodes of u - env (1 - tol)
    std::string message;
};

/// u >= envelope_j (1 - 10 h) on every stored node of the regime's region, j = 1..j_max.
std::vector<EnvelopeAuditEntry> envelope_audit(const LatticeSolution& solution,
                                               const IterationConstants& consts, int j_max,
                                               double threshold);

struct SeedAudit {
    std::size_t checked = 0;
    std::size_t violations = 0;
    double worst_ratio = 0.0;  ///< min of u / (eps c0) over checked nodes
};

/// u >= eps c0 (1 - 5 h) on the stored nodes of Gamma_1.
SeedAudit linear_seed_audit(const LatticeSolution& solution, double eps, double c0);

struct SandwichEntry {
    double eps = 0.0;
    double lower = 0.0;  ///< self-consistent certified horizon
    double T = 0.0;      ///< T_extrapolated
    double upper = 0.0;  ///< upper_lifespan_bound
    bool asserted = false;
    bool pass = true;
    std::string note;
};

inline constexpr double kSandwichTolerance = 0.2;

/// certified_horizon <= T_extrapolated <= (1 + 0.2) upper bound for every
/// uncensored record with eps <= eps_cap; others are reported, not asserted.
std::vector<SandwichEntry> sandwich_check(std::span<const BlowupRecord> records,
                                          const ProblemSpec& spec_template);

/// Relative change of T_extrapolated when h is halved.
double h_robustness_shift(const ProblemSpec& spec, double h, double T_max, double threshold);

}  // namespace wavelab
