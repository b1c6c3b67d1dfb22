#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace ghp {

// Plant, contract, and capacity constants. Energy quantities are in
// discretized units (unit_mwh MWh each) unless a _mwh suffix says
// otherwise; prices and penalties are EUR/MWh; capacities are units per
// daily period.
struct SystemParams {
    int horizon_days = 365;
    int ppa_interval = 7;                 // periods between PPA deadlines
    int ppa_target = 5;                   // units due per interval
    double ppa_price = 35.0;
    double shortage_penalty = 200.0;      // applies to PPA and fixed-H2 shortfalls
    double eff_electrolyzer = 0.7071067811865476;
    double eff_fuelcell = 0.7071067811865476;
    double cap_electrolyzer = 21.0;       // max units entering storage per period
    double cap_fuelcell = 21.0;           // max units leaving storage per period
    double cap_transmission = 21.0;       // grid cable, units per period
    double cap_h2_sale = 35.0;            // max units sold as gas per period
    double storage_capacity = 200.0;      // tank size, units
    double buy_premium = 0.0;             // EUR/MWh markup when buying
    double unit_mwh = 5.7;                // MWh per discretized unit
    double inventory_resolution = 0.5;    // stored-energy grid step, units

    double round_trip() const { return eff_electrolyzer * eff_fuelcell; }
};

/// AR(1) price process p' = mu + theta*p + N(0, sigma), EUR/MWh.
struct PriceProcessParams {
    double mu = 5.23;
    double theta = 0.873;
    double sigma = 5.551;

    double stationary_mean() const { return mu / (1.0 - theta); }
    double stationary_std() const;
};

struct WeibullParams {
    double shape = 2.0;
    double scale = 6.0;
};

struct TurbineCurve {
    double rated_power_mw = 4.5;
    double cut_in = 3.0;      // m/s
    double rated_speed = 13.0;
    double cut_out = 25.0;
};

struct WindModel {
    std::array<WeibullParams, 12> monthly_weibull{};
    TurbineCurve turbine{};
    double hub_height = 125.0;       // m
    double reference_height = 10.0;  // m, height of the speed records
    double shear_exponent = 1.0 / 7.0;
    int production_levels = 22;      // discrete daily outcomes 0..L-1 units
};

// Hydrogen trading structures. Settings A..E of the benchmark map onto
// these: A = FreeEveryPeriod, B(n) = FreePeriodic, C(n,p,Q) = FixedContract,
// D = NoSale, E = NoStorage.
struct FreeEveryPeriod {};
struct FreePeriodic {
    int n_h = 7; // selling allowed only when t mod n_h == 0
};
struct FixedContract {
    int n_h = 1;
    double fixed_price = 35.0; // EUR/MWh
    double quantity = 3.0;     // units due each n_h-th period
};
struct NoSale {};
struct NoStorage {};

using HydrogenPolicy = std::variant<FreeEveryPeriod, FreePeriodic, FixedContract, NoSale, NoStorage>;

enum class SaleMode { Free, Zero, Fixed };

/// How hydrogen may leave the tank as gas at period t (1-based).
SaleMode sale_mode_at(const HydrogenPolicy& policy, int t);

/// Buying from the market exists only to feed storage; NoStorage excludes it.
bool policy_allows_buy(const HydrogenPolicy& policy);

std::string policy_name(const HydrogenPolicy& policy);

/// MDP state at the start of period t (1-based). Prices are carried as
/// lattice indices; inventory lives on the configured grid.
struct State {
    int t = 1;
    int pe_idx = 0;
    int ph_idx = 0;
    int y = 0;          // production units realized this period
    double inventory = 0.0;
    int ppa_due = 0;    // outstanding obligation v, units
};

struct Decision {
    double sell = 0.0;
    double buy = 0.0;
    double ppa = 0.0;
    double h2 = 0.0;
};

struct DerivedFlows {
    double x_in = 0.0;      // units entering storage, post conversion loss
    double x_out = 0.0;     // units leaving storage
    double curtailed = 0.0; // production units discarded
    double loss_mwh = 0.0;  // conversion loss this period, MWh
};

struct PostDecisionState {
    int t = 0;
    int pe_idx = 0;
    int ph_idx = 0;
    double inventory = 0.0;
    int ppa_due = 0;
};

struct ValidationReport {
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
    std::string joined() const;
};

/// Checks every structural invariant of the configuration. Report-based:
/// never throws, never mutates.
ValidationReport validate(const SystemParams& params, const HydrogenPolicy& policy, const WindModel& wind);

ValidationReport validate_price_process(const PriceProcessParams& p, const std::string& label);

/// NoStorage zeroes the conversion capacities in the effective parameter set.
SystemParams effective_params(SystemParams params, const HydrogenPolicy& policy);

} // namespace ghp
