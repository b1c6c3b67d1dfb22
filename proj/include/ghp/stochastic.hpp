#pragma once

#include <span>
#include <vector>

#include "ghp/model.hpp"

namespace ghp {

/// Discretized AR(1) price process: ordered levels, a row-stochastic
/// transition matrix, and its stationary distribution.
struct PriceLattice {
    std::vector<double> levels;     // EUR/MWh, strictly increasing
    std::vector<double> transition; // row-major L x L
    std::vector<double> stationary; // left fixed point of transition

    int size() const { return static_cast<int>(levels.size()); }
    double prob(int from, int to) const { return transition[static_cast<std::size_t>(from) * levels.size() + to]; }
    std::span<const double> row(int from) const {
        return {transition.data() + static_cast<std::size_t>(from) * levels.size(), levels.size()};
    }
    /// Index of the level closest to `price`.
    int nearest(double price) const;
    double stationary_mean() const;
};

/// Tauchen construction over the stationary range mean +- span*std. Each
/// transition row places the Gaussian mass of the half-open midpoint cells,
/// tails folded into the edge cells. levels == 1 collapses to the mean.
PriceLattice discretize_ar1(const PriceProcessParams& p, int levels, double span_std);

/// Per-day probabilities over discrete production outcomes 0..levels-1.
struct ProductionDistribution {
    int days = 0;
    int levels = 0;
    std::vector<double> prob; // row-major days x levels, day index 1-based externally

    double at(int day, int level) const {
        return prob[static_cast<std::size_t>(day - 1) * levels + level];
    }
    std::span<const double> day_row(int day) const {
        return {prob.data() + static_cast<std::size_t>(day - 1) * levels, static_cast<std::size_t>(levels)};
    }
    double expected(int day) const;
};

/// Power-law wind shear from the measurement height to hub height.
double adjust_height(double v10, const WindModel& wind);

/// Turbine power curve, MW. Cubic ramp between cut-in and rated speed,
/// rated output on [rated, cut-out], zero elsewhere.
double power_output(double v, const TurbineCurve& turbine);

/// Builds the per-day production distribution by pushing the month's
/// Weibull wind-speed distribution through height adjustment, the power
/// curve, 24 h aggregation, and rounding to whole units. Mass beyond the
/// top bin folds into the top bin; speeds outside [cut_in, cut_out] land
/// on level 0.
ProductionDistribution production_distribution(const WindModel& wind, const SystemParams& params);

struct WeibullFit {
    double shape = 0.0;
    double scale = 0.0;
    int iterations = 0;
};

/// Maximum-likelihood Weibull fit. Requires >= 30 strictly positive
/// observations; throws std::invalid_argument otherwise and
/// std::runtime_error on degenerate (zero-variance) samples or
/// non-convergence.
WeibullFit fit_weibull(std::span<const double> samples);

/// 0-based month for a 1-based day of a non-leap year; wraps past day 365.
int month_of_day(int day);

/// Inverse-CDF Weibull sampler (shared by tests and the fit oracle).
double weibull_quantile(double u, double shape, double scale);

} // namespace ghp
