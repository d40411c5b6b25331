#pragma once

// Streaming moment accumulators and the confidence arithmetic the harness
// reports: normal-approximation half-widths, covariance-aware Yao gaps, and
// delta-method ratio intervals.

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace wks {

// Two-sided 99% standard normal quantile.
inline constexpr double kZ99 = 2.5758293035489004;

// Welford accumulator.
class StatSeries {
public:
    void add(double x) {
        ++count_;
        double d = x - mean_;
        mean_ += d / static_cast<double>(count_);
        m2_ += d * (x - mean_);
    }

    std::int64_t count() const { return count_; }
    double mean() const { return mean_; }
    double variance() const {
        return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
    }
    double stddev() const { return std::sqrt(variance()); }
    double half_width(double z) const {
        return count_ > 0 ? z * stddev() / std::sqrt(static_cast<double>(count_)) : 0.0;
    }

private:
    std::int64_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

// Joint accumulator for the covariance between two per-trial quantities.
class PairSeries {
public:
    void add(double x, double y) {
        ++count_;
        double dx = x - mean_x_;
        mean_x_ += dx / static_cast<double>(count_);
        mean_y_ += (y - mean_y_) / static_cast<double>(count_);
        c_ += dx * (y - mean_y_);
    }

    std::int64_t count() const { return count_; }
    double covariance() const {
        return count_ > 1 ? c_ / static_cast<double>(count_ - 1) : 0.0;
    }

private:
    std::int64_t count_ = 0;
    double mean_x_ = 0.0;
    double mean_y_ = 0.0;
    double c_ = 0.0;
};

struct GapEstimate {
    double value = 0.0;
    double half_width = 0.0;
};

// mean_a - alpha * mean_b with the half-width propagated through the
// difference, using the per-trial covariance of the two quantities.
inline GapEstimate gap_estimate(double mean_a, double var_a, double mean_b, double var_b,
                                double cov, std::int64_t count, double alpha, double z) {
    GapEstimate g;
    g.value = mean_a - alpha * mean_b;
    if (count > 1) {
        double se2 = (var_a + alpha * alpha * var_b - 2.0 * alpha * cov) /
                     static_cast<double>(count);
        g.half_width = z * std::sqrt(se2 > 0.0 ? se2 : 0.0);
    }
    return g;
}

// mean_a / mean_b with the first-order (delta method) half-width.
inline GapEstimate ratio_estimate(double mean_a, double var_a, double mean_b, double var_b,
                                  double cov, std::int64_t count, double z) {
    if (mean_b == 0.0) throw std::domain_error("ratio_estimate: denominator mean is zero");
    GapEstimate g;
    g.value = mean_a / mean_b;
    if (count > 1) {
        double b2 = mean_b * mean_b;
        double se2 = (var_a / b2 + mean_a * mean_a * var_b / (b2 * b2) -
                      2.0 * mean_a * cov / (b2 * mean_b)) /
                     static_cast<double>(count);
        g.half_width = z * std::sqrt(se2 > 0.0 ? se2 : 0.0);
    }
    return g;
}

// Per-trial cost series of one experiment. opt holds whichever offline bound
// the resolved opt mode selected; adv always holds the constructive serving
// cost, which upper-bounds the true optimum.
struct RunStats {
    StatSeries alg;
    StatSeries opt;
    StatSeries adv;
    StatSeries calls;
    PairSeries alg_opt;
    PairSeries alg_adv;
    double z = kZ99;
};

inline GapEstimate yao_gap(const RunStats& s, double alpha) {
    return gap_estimate(s.alg.mean(), s.alg.variance(), s.opt.mean(), s.opt.variance(),
                        s.alg_opt.covariance(), s.alg.count(), alpha, s.z);
}

inline GapEstimate yao_gap_vs_adv(const RunStats& s, double alpha) {
    return gap_estimate(s.alg.mean(), s.alg.variance(), s.adv.mean(), s.adv.variance(),
                        s.alg_adv.covariance(), s.alg.count(), alpha, s.z);
}

inline GapEstimate cost_ratio_vs_opt(const RunStats& s) {
    return ratio_estimate(s.alg.mean(), s.alg.variance(), s.opt.mean(), s.opt.variance(),
                          s.alg_opt.covariance(), s.alg.count(), s.z);
}

inline GapEstimate cost_ratio_vs_adv(const RunStats& s) {
    return ratio_estimate(s.alg.mean(), s.alg.variance(), s.adv.mean(), s.adv.variance(),
                          s.alg_adv.covariance(), s.alg.count(), s.z);
}

// Two-sided test: the target lies inside the series' confidence interval.
inline bool within_ci(const StatSeries& s, double target, double z) {
    return std::abs(s.mean() - target) <= s.half_width(z);
}

// One-sided tests: the mean clears the bound up to statistical noise.
inline bool clears_lower_bound(const StatSeries& s, double target, double z) {
    return s.mean() >= target - s.half_width(z);
}

inline bool clears_upper_bound(const StatSeries& s, double target, double z) {
    return s.mean() <= target + s.half_width(z);
}

}  // namespace wks
