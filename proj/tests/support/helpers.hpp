#pragma once

#include <vector>

#include "ghp/instance.hpp"
#include "ghp/rng.hpp"

namespace ghp::test {

/// Overwrites every day's production distribution (probabilities over
/// levels 0..probs.size()-1). Keeps instance and hash consistent for
/// solve/simulate pairs built from the same object.
inline void set_production(Instance& inst, const std::vector<double>& probs) {
    inst.prod.levels = static_cast<int>(probs.size());
    inst.prod.days = inst.params.horizon_days;
    inst.prod.prob.resize(static_cast<std::size_t>(inst.prod.days) * inst.prod.levels);
    for (int d = 0; d < inst.prod.days; ++d)
        std::copy(probs.begin(), probs.end(), inst.prod.prob.begin() + static_cast<std::size_t>(d) * probs.size());
}

/// Minimal config for hand-built instances: tiny lattices, controllable
/// capacities. Wind fields stay valid but tests usually replace the
/// production distribution afterwards.
inline RunConfig small_config() {
    RunConfig cfg = base_case_config();
    cfg.system.horizon_days = 3;
    cfg.system.ppa_interval = 3;
    cfg.system.ppa_target = 1;
    cfg.system.cap_transmission = 2;
    cfg.system.cap_electrolyzer = 2;
    cfg.system.cap_fuelcell = 2;
    cfg.system.cap_h2_sale = 2;
    cfg.system.storage_capacity = 2;
    cfg.system.unit_mwh = 4.0;
    cfg.system.eff_electrolyzer = cfg.system.eff_fuelcell = std::sqrt(0.5);
    cfg.grids.elec_levels = 2;
    cfg.grids.hyd_levels = 2;
    cfg.wind.production_levels = 2;
    return cfg;
}

/// Random tiny configuration for oracle comparisons. All flow quantities
/// stay on the 0.5-unit grid (round trip 0.5 or 1.0), so interpolation and
/// snapping are both exact.
inline RunConfig random_tiny_config(Rng& rng) {
    RunConfig cfg = base_case_config();
    auto pick_int = [&](int lo, int hi) { return lo + static_cast<int>(rng.next_unit() * (hi - lo + 1)); };
    auto pick = [&](double lo, double hi) { return lo + rng.next_unit() * (hi - lo); };

    cfg.system.horizon_days = pick_int(1, 3);
    cfg.system.ppa_interval = pick_int(1, 3);
    cfg.system.ppa_target = pick_int(0, 1);
    cfg.system.ppa_price = pick(5.0, 60.0);
    cfg.system.shortage_penalty = pick(50.0, 300.0);
    const double alpha = rng.next_unit() < 0.5 ? 0.5 : 1.0;
    cfg.system.eff_electrolyzer = cfg.system.eff_fuelcell = std::sqrt(alpha);
    cfg.system.cap_electrolyzer = pick_int(0, 2);
    cfg.system.cap_fuelcell = pick_int(0, 2);
    cfg.system.cap_transmission = pick_int(1, 3);
    cfg.system.cap_h2_sale = pick_int(0, 2);
    cfg.system.storage_capacity = pick_int(0, 2);
    cfg.system.buy_premium = pick(0.0, 5.0);
    cfg.system.unit_mwh = pick(1.0, 8.0);
    cfg.system.inventory_resolution = 0.5;

    cfg.elec_price.theta = pick(0.2, 0.9);
    cfg.elec_price.mu = pick(2.0, 8.0);
    cfg.elec_price.sigma = pick(0.5, 6.0);
    cfg.hyd_price.theta = pick(0.2, 0.9);
    cfg.hyd_price.mu = pick(2.0, 8.0);
    cfg.hyd_price.sigma = pick(0.5, 6.0);
    cfg.grids.elec_levels = pick_int(1, 2);
    cfg.grids.hyd_levels = pick_int(1, 2);
    cfg.grids.span_std = pick(1.5, 3.0);

    const int n_levels = pick_int(1, 2);
    cfg.wind.production_levels = std::max(2, n_levels); // validation floor

    switch (pick_int(0, 4)) {
    case 0: cfg.policy = FreeEveryPeriod{}; break;
    case 1: cfg.policy = FreePeriodic{pick_int(1, 2)}; break;
    case 2: cfg.policy = FixedContract{pick_int(1, 2), pick(5.0, 60.0), static_cast<double>(pick_int(0, 2))}; break;
    case 3: cfg.policy = NoSale{}; break;
    default: cfg.policy = NoStorage{}; break;
    }

    const int inv_points = static_cast<int>(cfg.system.storage_capacity / 0.5) + 1;
    cfg.initial.inventory = 0.5 * pick_int(0, inv_points - 1);
    return cfg;
}

/// Random production probabilities over the configured level count.
inline std::vector<double> random_production(Rng& rng, int levels) {
    std::vector<double> p(levels);
    double sum = 0.0;
    for (auto& v : p) {
        v = 0.05 + rng.next_unit();
        sum += v;
    }
    for (auto& v : p) v /= sum;
    return p;
}

} // namespace ghp::test
