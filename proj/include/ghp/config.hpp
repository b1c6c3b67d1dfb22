#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "ghp/model.hpp"

namespace ghp {

inline constexpr const char* kToolVersion = "0.1.0";

/// Lattice construction knobs for the two price processes.
struct GridSpec {
    int elec_levels = 11;
    int hyd_levels = 11;
    double span_std = 3.0; // lattice covers stationary mean +- span*std
};

/// Start-of-horizon state. Unset prices default to the lattice level
/// nearest the stationary mean; unset ppa_due defaults to the target.
struct InitialState {
    double inventory = 0.0;
    std::optional<int> ppa_due;
    std::optional<double> elec_price;
    std::optional<double> hyd_price;
};

struct RunConfig {
    SystemParams system;
    PriceProcessParams elec_price{5.23, 0.873, 5.551};
    PriceProcessParams hyd_price{5.23, 0.873, 5.551};
    WindModel wind;
    HydrogenPolicy policy = FreeEveryPeriod{};
    GridSpec grids;
    InitialState initial;
};

/// Thrown for unreadable files, malformed JSON, or schema violations.
/// CLI maps it to exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text);
std::string config_to_json(const RunConfig& cfg); // canonical: sorted keys, 2-space indent
void save_config(const RunConfig& cfg, const std::string& path);

/// FNV-1a over the canonical JSON form; identifies a configuration in
/// value tables and emitted artifacts.
std::uint64_t config_hash(const RunConfig& cfg);

/// All invariant checks over the full configuration (system, policy, wind,
/// both price processes, grids).
ValidationReport validate_config(const RunConfig& cfg);

/// Benchmark constants: 4.5 MW turbine, 120 MWh/day cable, 5.7 MWh unit,
/// 200-unit tank, 5-unit weekly PPA at EUR 35, EUR 200/MWh penalty, the
/// fitted monthly Weibull table, and matching AR(1) processes for both
/// commodities.
RunConfig base_case_config();

std::uint64_t fnv1a64(const std::string& text);

} // namespace ghp
