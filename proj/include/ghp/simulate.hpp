#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ghp/solver.hpp"

namespace ghp {

/// One simulated period of one replication.
struct PeriodRecord {
    int t = 0;
    int pe_idx = 0;
    int ph_idx = 0;
    int y = 0;
    double inventory_start = 0.0;
    int ppa_due = 0;
    Decision decision;
    DerivedFlows flows;
    RewardBreakdown reward;
    double inventory_end = 0.0;
};

using Trace = std::vector<PeriodRecord>;

/// Empirical distribution of the post-decision inventory per period, plus
/// its mean line (the data behind the occupancy heatmap).
struct HeatmapData {
    int periods = 0;
    std::vector<double> grid_values;    // inventory level per bin
    std::vector<double> prob;           // row-major periods x bins
    std::vector<double> mean_inventory; // per period
};

struct CiValue {
    double mean = 0.0;
    double ci95_half = 0.0;
};

struct SimOptions {
    int replications = 1000;
    int years = 1;       // chained years per replication, v reset yearly
    std::uint64_t seed = 1;
    int workers = 1;
    int trace_reps = 0;  // capture full traces for the first n replications
};

struct KpiReport {
    std::uint64_t config_hash = 0;
    std::string policy;
    int replications = 0;
    int years = 1;
    std::uint64_t seed = 0;

    CiValue profit;          // EUR per year
    CiValue profit_hydrogen; // includes fixed-contract shortfall penalties
    CiValue profit_ppa;      // includes PPA shortfall penalties
    CiValue profit_market;   // sell + buy

    double h2_sold_mwh = 0.0;                // stored-energy MWh per year
    double h2_sold_mwh_fuelcell_equiv = 0.0; // divided by fuel-cell efficiency
    double energy_lost_mwh = 0.0;            // conversion loss per year
    double curtailed_mwh = 0.0;              // spilled production per year

    double p_h2_sale = 0.0; // day fractions
    double p_buy = 0.0;
    double p_sell = 0.0;
    double p_ppa_delivery = 0.0;

    double mean_sell_price = 0.0; // EUR/MWh, volume weighted; NaN if no volume
    double mean_buy_price = 0.0;
    double mean_h2_price = 0.0;

    double ppa_shortfall_freq = 0.0; // fraction of deadlines missed
    double value_at_start = 0.0;     // table value at the initial state

    // Mean post-decision inventory over June-August and December-February
    // days present in the horizon (CIs over replications).
    CiValue summer_inventory;
    CiValue winter_inventory;

    HeatmapData heatmap;
};

/// Monte Carlo evaluation of the greedy-optimal policy. Exogenous draws per
/// period, in order: electricity price index, hydrogen price index,
/// production level. Replication r uses substream r of the master seed, so
/// results are independent of the worker count. Throws std::runtime_error
/// on a config-hash mismatch between table and instance.
KpiReport simulate(const Instance& inst, const ValueTable& table, const SimOptions& opts,
                   std::vector<Trace>* traces = nullptr);

/// Total conversion loss booked at electrolysis over a trace, MWh.
double energy_loss_accounting(const Trace& trace, const SystemParams& params);

/// Occupancy distribution over the inventory grid per period.
HeatmapData inventory_heatmap(const std::vector<Trace>& traces, const InventoryGrid& grid, int periods);

} // namespace ghp
