#include "ghp/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ghp/parallel.hpp"
#include "ghp/rng.hpp"

namespace ghp {

namespace {

constexpr double kEps = 1e-9;

/// Everything one replication contributes, kept per replication so the
/// final reduction runs in replication order whatever the worker count.
struct RepStats {
    double profit = 0.0; // per-year averages
    double hydrogen = 0.0;
    double ppa = 0.0;
    double market = 0.0;
    double h2_units = 0.0;
    double loss_mwh = 0.0;
    double curtailed_units = 0.0;
    double sell_value = 0.0; // EUR, for volume-weighted prices
    double sell_units = 0.0;
    double buy_value = 0.0;
    double buy_units = 0.0;
    double h2_value = 0.0;
    double summer_inv = 0.0; // per-day means over the seasonal windows
    double winter_inv = 0.0;
    std::int64_t h2_days = 0;
    std::int64_t buy_days = 0;
    std::int64_t sell_days = 0;
    std::int64_t ppa_days = 0;
    std::int64_t deadlines = 0;
    std::int64_t shortfalls = 0;
};

CiValue ci_over(const std::vector<double>& xs) {
    CiValue out;
    const std::size_t n = xs.size();
    if (n == 0) return out;
    double sum = 0.0;
    for (double x : xs) sum += x;
    out.mean = sum / static_cast<double>(n);
    if (n < 2) return out;
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    out.ci95_half = 1.96 * sd / std::sqrt(static_cast<double>(n));
    return out;
}

} // namespace

double energy_loss_accounting(const Trace& trace, const SystemParams&) {
    double loss = 0.0;
    for (const auto& rec : trace) loss += rec.flows.loss_mwh;
    return loss;
}

HeatmapData inventory_heatmap(const std::vector<Trace>& traces, const InventoryGrid& grid, int periods) {
    HeatmapData h;
    h.periods = periods;
    h.grid_values.resize(grid.points);
    for (int i = 0; i < grid.points; ++i) h.grid_values[i] = grid.value(i);
    h.prob.assign(static_cast<std::size_t>(periods) * grid.points, 0.0);
    h.mean_inventory.assign(periods, 0.0);
    std::vector<std::int64_t> totals(periods, 0);
    for (const auto& trace : traces) {
        for (const auto& rec : trace) {
            const int t = rec.t;
            if (t < 1 || t > periods) continue;
            const int bin = grid.index_of(rec.inventory_end);
            h.prob[static_cast<std::size_t>(t - 1) * grid.points + bin] += 1.0;
            ++totals[t - 1];
        }
    }
    for (int t = 0; t < periods; ++t) {
        if (totals[t] == 0) continue;
        double mean = 0.0;
        for (int i = 0; i < grid.points; ++i) {
            double& cell = h.prob[static_cast<std::size_t>(t) * grid.points + i];
            cell /= static_cast<double>(totals[t]);
            mean += cell * h.grid_values[i];
        }
        h.mean_inventory[t] = mean;
    }
    return h;
}

KpiReport simulate(const Instance& inst, const ValueTable& table, const SimOptions& opts,
                   std::vector<Trace>* traces) {
    if (table.config_hash() != inst.hash)
        throw std::runtime_error("value table does not match the configuration (hash mismatch)");
    if (opts.replications < 1) throw std::invalid_argument("simulate: replications must be >= 1");
    if (opts.years < 1) throw std::invalid_argument("simulate: years must be >= 1");

    const SystemParams& p = inst.params;
    const int T = p.horizon_days;
    const int reps = opts.replications;
    const int bins = inst.grid.points;

    std::vector<RepStats> stats(reps);
    // Seasonal day masks (post-decision inventory, calendar months).
    std::vector<int> season(T + 1, 0);
    int summer_days = 0, winter_days = 0;
    for (int t = 1; t <= T; ++t) {
        const int m = month_of_day(t);
        if (m >= 5 && m <= 7) {
            season[t] = 1;
            ++summer_days;
        } else if (m == 11 || m <= 1) {
            season[t] = 2;
            ++winter_days;
        }
    }
    // Post-decision inventory occupancy counts, one block per worker chunk
    // is unnecessary: integer adds commute, but replication-sliced buffers
    // keep the reduction exact and simple.
    std::vector<std::int64_t> heat_counts(static_cast<std::size_t>(T) * bins, 0);
    std::vector<std::vector<std::int64_t>> heat_partials;

    const int workers = std::max(1, opts.workers);
    if (traces) traces->assign(std::min(opts.trace_reps, reps), Trace{});

    auto run_range = [&](std::size_t lo, std::size_t hi, std::vector<std::int64_t>& heat) {
        for (std::size_t rep = lo; rep < hi; ++rep) {
            Rng rng = Rng::substream(opts.seed, rep);
            RepStats& st = stats[rep];
            Trace* trace = (traces && rep < traces->size()) ? &(*traces)[rep] : nullptr;

            int pe = inst.init_pe;
            int ph = inst.init_ph;
            double inv = snap_down(inst.init_inventory, inst.grid.resolution);
            double profit = 0.0, hydrogen = 0.0, ppa_comp = 0.0, market = 0.0;

            for (int year = 0; year < opts.years; ++year) {
                int v = inst.init_v;
                for (int t = 1; t <= T; ++t) {
                    pe = rng.categorical(inst.elec.row(pe));
                    ph = rng.categorical(inst.hyd.row(ph));
                    const int y = rng.categorical(inst.prod.day_row(t));
                    const State s{t, pe, ph, y, inv, v};
                    const GreedyResult g = greedy_action(table, s, inst);
                    const PostDecisionState post = transition_deterministic(s, g.decision, p);

                    profit += g.reward.total;
                    hydrogen += g.reward.hydrogen;
                    ppa_comp += g.reward.ppa;
                    market += g.reward.market_sell + g.reward.market_buy;
                    st.h2_units += g.decision.h2;
                    st.loss_mwh += g.flows.loss_mwh;
                    st.curtailed_units += g.flows.curtailed;
                    if (g.decision.h2 > kEps) {
                        ++st.h2_days;
                        const double price = std::holds_alternative<FixedContract>(inst.policy)
                                                 ? std::get<FixedContract>(inst.policy).fixed_price
                                                 : inst.hyd.levels[ph];
                        st.h2_value += price * g.decision.h2 * p.unit_mwh;
                    }
                    if (g.decision.buy > kEps) {
                        ++st.buy_days;
                        st.buy_value += -g.reward.market_buy;
                        st.buy_units += g.decision.buy;
                    }
                    if (g.decision.sell > kEps) {
                        ++st.sell_days;
                        st.sell_value += g.reward.market_sell;
                        st.sell_units += g.decision.sell;
                    }
                    if (g.decision.ppa > kEps) ++st.ppa_days;
                    if (ppa_deadline(t, p)) {
                        ++st.deadlines;
                        if (v - g.decision.ppa > kEps) ++st.shortfalls;
                    }
                    heat[static_cast<std::size_t>(t - 1) * bins + inst.grid.index_of(post.inventory)] += 1;
                    if (season[t] == 1) st.summer_inv += post.inventory;
                    else if (season[t] == 2) st.winter_inv += post.inventory;
                    if (trace)
                        trace->push_back(PeriodRecord{t, pe, ph, y, inv, v, g.decision, g.flows, g.reward,
                                                      post.inventory});
                    inv = post.inventory;
                    v = post.ppa_due;
                }
            }
            const double years = static_cast<double>(opts.years);
            st.profit = profit / years;
            st.hydrogen = hydrogen / years;
            st.ppa = ppa_comp / years;
            st.market = market / years;
            if (summer_days > 0) st.summer_inv /= summer_days * years;
            if (winter_days > 0) st.winter_inv /= winter_days * years;
        }
    };

    if (workers <= 1) {
        run_range(0, static_cast<std::size_t>(reps), heat_counts);
    } else {
        heat_partials.assign(workers, std::vector<std::int64_t>(heat_counts.size(), 0));
        std::vector<std::pair<std::size_t, std::size_t>> ranges;
        const std::size_t chunk = (reps + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const std::size_t lo = w * chunk;
            const std::size_t hi = std::min<std::size_t>(reps, lo + chunk);
            if (lo < hi) ranges.emplace_back(lo, hi);
        }
        parallel_for(ranges.size(), workers, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t k = lo; k < hi; ++k) run_range(ranges[k].first, ranges[k].second, heat_partials[k]);
        });
        for (const auto& partial : heat_partials)
            for (std::size_t k = 0; k < heat_counts.size(); ++k) heat_counts[k] += partial[k];
    }

    // Reduction in replication order.
    KpiReport kpi;
    kpi.config_hash = inst.hash;
    kpi.policy = inst.policy_label;
    kpi.replications = reps;
    kpi.years = opts.years;
    kpi.seed = opts.seed;
    kpi.value_at_start = table.interp(0, inst.init_pe, inst.init_ph, inst.init_v,
                                      inst.init_inventory, inst.grid.resolution);

    std::vector<double> xs(reps);
    auto reduce = [&](auto member) {
        for (int r = 0; r < reps; ++r) xs[r] = stats[r].*member;
        return ci_over(xs);
    };
    kpi.profit = reduce(&RepStats::profit);
    kpi.profit_hydrogen = reduce(&RepStats::hydrogen);
    kpi.profit_ppa = reduce(&RepStats::ppa);
    kpi.profit_market = reduce(&RepStats::market);
    kpi.summer_inventory = reduce(&RepStats::summer_inv);
    kpi.winter_inventory = reduce(&RepStats::winter_inv);

    double h2_units = 0, loss = 0, curtailed = 0;
    double sell_value = 0, sell_units = 0, buy_value = 0, buy_units = 0, h2_value = 0;
    std::int64_t h2_days = 0, buy_days = 0, sell_days = 0, ppa_days = 0, deadlines = 0, shortfalls = 0;
    for (const auto& st : stats) {
        h2_units += st.h2_units;
        loss += st.loss_mwh;
        curtailed += st.curtailed_units;
        sell_value += st.sell_value;
        sell_units += st.sell_units;
        buy_value += st.buy_value;
        buy_units += st.buy_units;
        h2_value += st.h2_value;
        h2_days += st.h2_days;
        buy_days += st.buy_days;
        sell_days += st.sell_days;
        ppa_days += st.ppa_days;
        deadlines += st.deadlines;
        shortfalls += st.shortfalls;
    }
    const double rep_years = static_cast<double>(reps) * opts.years;
    const double days = rep_years * T;
    kpi.h2_sold_mwh = h2_units * p.unit_mwh / rep_years;
    kpi.h2_sold_mwh_fuelcell_equiv = kpi.h2_sold_mwh / p.eff_fuelcell;
    kpi.energy_lost_mwh = loss / rep_years;
    kpi.curtailed_mwh = curtailed * p.unit_mwh / rep_years;
    kpi.p_h2_sale = h2_days / days;
    kpi.p_buy = buy_days / days;
    kpi.p_sell = sell_days / days;
    kpi.p_ppa_delivery = ppa_days / days;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    kpi.mean_sell_price = sell_units > 0 ? sell_value / (sell_units * p.unit_mwh) : nan;
    kpi.mean_buy_price = buy_units > 0 ? buy_value / (buy_units * p.unit_mwh) : nan;
    kpi.mean_h2_price = h2_units > 0 ? h2_value / (h2_units * p.unit_mwh) : nan;
    kpi.ppa_shortfall_freq = deadlines > 0 ? static_cast<double>(shortfalls) / deadlines : 0.0;

    kpi.heatmap.periods = T;
    kpi.heatmap.grid_values.resize(bins);
    for (int i = 0; i < bins; ++i) kpi.heatmap.grid_values[i] = inst.grid.value(i);
    kpi.heatmap.prob.resize(heat_counts.size());
    kpi.heatmap.mean_inventory.assign(T, 0.0);
    for (int t = 0; t < T; ++t) {
        double mean = 0.0;
        for (int i = 0; i < bins; ++i) {
            const double pr = heat_counts[static_cast<std::size_t>(t) * bins + i] / rep_years;
            kpi.heatmap.prob[static_cast<std::size_t>(t) * bins + i] = pr;
            mean += pr * inst.grid.value(i);
        }
        kpi.heatmap.mean_inventory[t] = mean;
    }
    return kpi;
}

} // namespace ghp
