#pragma once

#include <string>

#include "ghp/simulate.hpp"

namespace ghp {

/// KpiReport as a JSON document (sorted keys; NaN prices become null).
std::string kpi_to_json(const KpiReport& kpi);
void write_kpi_json(const KpiReport& kpi, const std::string& path);

/// period,inventory,probability,mean_inventory rows; probabilities to four
/// decimals, inventory levels and means to two.
void write_heatmap_csv(const HeatmapData& heatmap, const std::string& path);

/// One row per simulated period of each captured replication.
void write_traces_csv(const std::vector<Trace>& traces, const std::string& path);

/// Fixed-format numeric fields shared by every CSV artifact.
std::string fmt_fixed(double value, int decimals);

} // namespace ghp
