#include "ghp/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ghp {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double weibull_cdf(double v, double shape, double scale) {
    if (v <= 0.0) return 0.0;
    return -std::expm1(-std::pow(v / scale, shape));
}

constexpr int kMonthDays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};

} // namespace

int PriceLattice::nearest(double price) const {
    int best = 0;
    double dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i < size(); ++i) {
        const double d = std::abs(levels[i] - price);
        if (d < dist) {
            dist = d;
            best = i;
        }
    }
    return best;
}

double PriceLattice::stationary_mean() const {
    double m = 0.0;
    for (int i = 0; i < size(); ++i) m += stationary[i] * levels[i];
    return m;
}

PriceLattice discretize_ar1(const PriceProcessParams& p, int levels, double span_std) {
    if (levels < 1) throw std::invalid_argument("discretize_ar1: levels must be >= 1");
    if (!(span_std > 0.0)) throw std::invalid_argument("discretize_ar1: span must be > 0");
    if (!(std::abs(p.theta) < 1.0)) throw std::invalid_argument("discretize_ar1: stationarity violated");

    PriceLattice lat;
    const double mean = p.stationary_mean();
    if (levels == 1) {
        lat.levels = {mean};
        lat.transition = {1.0};
        lat.stationary = {1.0};
        return lat;
    }

    const double sd = p.stationary_std();
    const double lo = mean - span_std * sd;
    const double hi = mean + span_std * sd;
    lat.levels.resize(levels);
    for (int i = 0; i < levels; ++i)
        lat.levels[i] = lo + (hi - lo) * i / (levels - 1);

    lat.transition.assign(static_cast<std::size_t>(levels) * levels, 0.0);
    for (int i = 0; i < levels; ++i) {
        const double m = p.mu + p.theta * lat.levels[i];
        double* row = lat.transition.data() + static_cast<std::size_t>(i) * levels;
        if (p.sigma <= 0.0) {
            // Degenerate noise: point mass on the nearest level.
            row[lat.nearest(m)] = 1.0;
            continue;
        }
        double prev_cdf = 0.0;
        for (int j = 0; j < levels; ++j) {
            const double upper = (j == levels - 1)
                                     ? 1.0
                                     : normal_cdf((0.5 * (lat.levels[j] + lat.levels[j + 1]) - m) / p.sigma);
            row[j] = upper - prev_cdf;
            prev_cdf = upper;
        }
        double sum = 0.0;
        for (int j = 0; j < levels; ++j) sum += row[j];
        for (int j = 0; j < levels; ++j) row[j] /= sum;
    }

    // Stationary distribution by power iteration.
    lat.stationary.assign(levels, 1.0 / levels);
    std::vector<double> next(levels);
    for (int it = 0; it < 100000; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int i = 0; i < levels; ++i) {
            const double w = lat.stationary[i];
            const double* row = lat.transition.data() + static_cast<std::size_t>(i) * levels;
            for (int j = 0; j < levels; ++j) next[j] += w * row[j];
        }
        double diff = 0.0, total = 0.0;
        for (int j = 0; j < levels; ++j) {
            diff += std::abs(next[j] - lat.stationary[j]);
            total += next[j];
        }
        for (int j = 0; j < levels; ++j) lat.stationary[j] = next[j] / total;
        if (diff < 1e-13) break;
    }
    return lat;
}

double ProductionDistribution::expected(int day) const {
    double e = 0.0;
    for (int y = 0; y < levels; ++y) e += at(day, y) * y;
    return e;
}

double adjust_height(double v10, const WindModel& wind) {
    if (!(wind.reference_height > 0.0))
        throw std::invalid_argument("adjust_height: reference_height must be > 0");
    return v10 * std::pow(wind.hub_height / wind.reference_height, wind.shear_exponent);
}

double power_output(double v, const TurbineCurve& t) {
    if (v < t.cut_in) return 0.0;
    if (v > t.cut_out) return 0.0;
    if (v >= t.rated_speed) return t.rated_power_mw;
    const double denom = std::pow(t.rated_speed, 3) - std::pow(t.cut_in, 3);
    const double a = t.rated_power_mw / denom;
    const double b = std::pow(t.cut_in, 3) / denom;
    return a * v * v * v - b * t.rated_power_mw;
}

int month_of_day(int day) {
    int d = (day - 1) % 365; // wraps horizons beyond one year
    for (int m = 0; m < 12; ++m) {
        if (d < kMonthDays[m]) return m;
        d -= kMonthDays[m];
    }
    return 11;
}

ProductionDistribution production_distribution(const WindModel& wind, const SystemParams& params) {
    const int L = wind.production_levels;
    const TurbineCurve& t = wind.turbine;
    const double shear = std::pow(wind.hub_height / wind.reference_height, wind.shear_exponent);
    const double daily_rated_mwh = 24.0 * t.rated_power_mw;
    const int rated_level = std::min<long>(L - 1, std::lround(daily_rated_mwh / params.unit_mwh));
    const double denom = std::pow(t.rated_speed, 3) - std::pow(t.cut_in, 3);
    const double a = t.rated_power_mw / denom;
    const double b3 = std::pow(t.cut_in, 3); // a*v^3 - a*b3 gives MW on the ramp

    // Hub-height speed where the daily energy first rounds to level k.
    auto ramp_speed_for = [&](int k) {
        const double energy = (k - 0.5) * params.unit_mwh; // MWh/day
        const double cube = energy / 24.0 / a + b3;
        return std::cbrt(cube);
    };

    // One distribution per month, replicated across its days.
    std::array<std::vector<double>, 12> monthly;
    for (int m = 0; m < 12; ++m) {
        const auto& w = wind.monthly_weibull[m];
        const double scale_hub = w.scale * shear; // Weibull scale transforms linearly
        auto cdf = [&](double v) { return weibull_cdf(v, w.shape, scale_hub); };

        std::vector<double> p(L, 0.0);
        p[0] += cdf(t.cut_in);           // below cut-in
        p[0] += 1.0 - cdf(t.cut_out);    // above cut-out
        // Ramp region [cut_in, rated): walk the level thresholds.
        double lower = t.cut_in;
        for (int k = 0; lower < t.rated_speed; ++k) {
            double upper = ramp_speed_for(k + 1);
            if (!(upper > lower)) upper = lower; // level k empty on the ramp
            upper = std::min(upper, t.rated_speed);
            if (upper > lower) {
                p[std::min(k, L - 1)] += cdf(upper) - cdf(lower);
                lower = upper;
            }
            if (k > 10 * L + static_cast<int>(daily_rated_mwh / params.unit_mwh) + 2) break;
        }
        p[rated_level] += cdf(t.cut_out) - cdf(t.rated_speed);

        double sum = 0.0;
        for (double v : p) sum += v;
        for (double& v : p) v /= sum;
        monthly[m] = std::move(p);
    }

    ProductionDistribution dist;
    dist.days = params.horizon_days;
    dist.levels = L;
    dist.prob.resize(static_cast<std::size_t>(dist.days) * L);
    for (int day = 1; day <= dist.days; ++day) {
        const auto& src = monthly[month_of_day(day)];
        std::copy(src.begin(), src.end(), dist.prob.begin() + static_cast<std::size_t>(day - 1) * L);
    }
    return dist;
}

double weibull_quantile(double u, double shape, double scale) {
    return scale * std::pow(-std::log1p(-u), 1.0 / shape);
}

WeibullFit fit_weibull(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 30) throw std::invalid_argument("fit_weibull: need at least 30 observations");
    double log_sum = 0.0;
    double first = samples[0];
    bool varied = false;
    for (double x : samples) {
        if (!(x > 0.0)) throw std::invalid_argument("fit_weibull: observations must be strictly positive");
        if (x != first) varied = true;
        log_sum += std::log(x);
    }
    if (!varied) throw std::runtime_error("fit_weibull: degenerate sample (all observations equal)");
    const double mean_log = log_sum / static_cast<double>(n);

    // Work on x/max(x): the profile equation is scale-invariant and the
    // normalized powers stay in (0, 1], so large trial shapes cannot overflow.
    const double xmax = *std::max_element(samples.begin(), samples.end());
    std::vector<double> z(n), lz(n);
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = samples[i] / xmax;
        lz[i] = std::log(z[i]);
    }
    const double mean_lz = mean_log - std::log(xmax);

    // Profile likelihood in the shape k: solve g(k) = 0 with
    // g(k) = 1/k + mean(log z) - sum(z^k log z) / sum(z^k).
    auto g_and_dg = [&](double k, double& g, double& dg) {
        double s0 = 0.0, s1 = 0.0, s2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double zk = std::pow(z[i], k);
            s0 += zk;
            s1 += zk * lz[i];
            s2 += zk * lz[i] * lz[i];
        }
        g = 1.0 / k + mean_lz - s1 / s0;
        dg = -1.0 / (k * k) - (s2 * s0 - s1 * s1) / (s0 * s0);
    };

    // g is decreasing; bracket the root, then Newton with bisection fallback.
    double lo = 1e-2, hi = 100.0;
    double k = 1.5;
    WeibullFit fit;
    bool converged = false;
    for (int it = 0; it < 200; ++it) {
        double g, dg;
        g_and_dg(k, g, dg);
        fit.iterations = it + 1;
        if (std::abs(g) < 1e-13) {
            converged = true;
            break;
        }
        if (g > 0.0) lo = k; else hi = k;
        double next = k - g / dg;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - k) < 1e-15 * k) {
            k = next;
            converged = true;
            break;
        }
        k = next;
    }
    if (!converged) throw std::runtime_error("fit_weibull: did not converge");

    double sk = 0.0;
    for (std::size_t i = 0; i < n; ++i) sk += std::pow(z[i], k);
    fit.shape = k;
    fit.scale = xmax * std::pow(sk / static_cast<double>(n), 1.0 / k);
    return fit;
}

} // namespace ghp
