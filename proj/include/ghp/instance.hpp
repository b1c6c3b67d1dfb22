#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "ghp/config.hpp"
#include "ghp/model.hpp"
#include "ghp/stochastic.hpp"

namespace ghp {

/// Discrete stored-energy axis: points i = 0..points-1 at i*resolution.
struct InventoryGrid {
    double resolution = 0.5;
    int points = 1;

    double value(int i) const { return i * resolution; }
    double capacity() const { return (points - 1) * resolution; }
    int steps_per_unit() const { return static_cast<int>(std::lround(1.0 / resolution)); }
    /// Grid index of an on-grid value (asserts closeness in debug).
    int index_of(double inv) const { return static_cast<int>(std::lround(inv / resolution)); }
};

/// Everything derived from a RunConfig that solving and simulation need:
/// effective parameters, both price lattices, the per-day production
/// distribution, the inventory grid, and the resolved initial state.
struct Instance {
    SystemParams params; // effective (NoStorage already applied)
    HydrogenPolicy policy;
    PriceLattice elec;
    PriceLattice hyd;
    ProductionDistribution prod;
    InventoryGrid grid;
    int init_pe = 0;
    int init_ph = 0;
    double init_inventory = 0.0;
    int init_v = 0;
    std::uint64_t hash = 0;
    std::string policy_label;
};

/// Validates the configuration (throwing ConfigError listing violations)
/// and compiles it.
Instance build_instance(const RunConfig& cfg);

} // namespace ghp
