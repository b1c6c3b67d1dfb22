#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ghp/report_io.hpp"

namespace ghp {

/// One benchmark trading setting: A, B(n), C(n,p,Q), D(H2), D(B), E.
struct Setting {
    enum class Kind { FreeMarket, FreePeriodicSale, FixedSale, StorageOnly, NoStorage };
    Kind kind = Kind::FreeMarket;
    int n_h = 0;
    double fixed_price = 0.0;
    double quantity = 0.0;
    double round_trip = 0.5; // StorageOnly conversion rate (H2 = 0.5, B = 0.9)
    std::string label = "A";
};

/// Parses "A", "B(7)", "C(1,35,3)", "D(H2)", "D(B)", "E".
Setting parse_setting(const std::string& text);

/// Applies a setting to a base configuration: swaps the trading policy,
/// adjusts conversion efficiencies for the storage-only variants, collapses
/// the hydrogen lattice when prices cannot matter, and refines the
/// inventory grid so conversion flows stay on it.
RunConfig apply_setting(RunConfig base, const Setting& s);

enum class SweepAxis { None, FixedH2Price, H2MarketMean, PpaTarget, RoundTripEff };

SweepAxis parse_axis(const std::string& name);
std::string axis_name(SweepAxis axis);

/// Overrides one swept quantity on an already setting-specialized config.
RunConfig apply_axis(RunConfig cfg, SweepAxis axis, double value);

struct ExperimentSpec {
    RunConfig base;
    std::vector<Setting> settings;
    SweepAxis axis = SweepAxis::None;
    std::vector<double> grid_values; // single dummy entry when axis == None
    int replications = 1000;
    int years = 1;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
};

/// Reads the experiment JSON; base_config paths resolve relative to the
/// experiment file's directory.
ExperimentSpec load_experiment(const std::string& path);

struct SweepRow {
    std::string setting;
    double axis_value = 0.0;
    KpiReport kpi;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<std::string> failures; // "<setting>@<value>: <error>"
};

/// Solves and simulates every (setting x grid point); value tables are
/// cached by config hash within the run. Per-point failures are recorded
/// and the sweep continues.
SweepResult run_sweep(const ExperimentSpec& spec, int workers);

/// Long-format CSV of a sweep result (one row per point).
void write_sweep_csv(const SweepResult& result, SweepAxis axis, const std::string& path);

/// Solve-with-cache helper shared by the sweep driver and tests. Keeps the
/// most recently used tables only; sweeps over distinct configs would
/// otherwise pin every table in memory.
class TableCache {
public:
    explicit TableCache(std::size_t capacity = 4) : capacity_(capacity) {}

    std::shared_ptr<const ValueTable> solve(const RunConfig& cfg, int workers);

private:
    std::size_t capacity_;
    std::vector<std::pair<std::uint64_t, std::shared_ptr<const ValueTable>>> cache_;
};

std::string sanitize_label(const std::string& label);

} // namespace ghp
