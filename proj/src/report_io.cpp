#include "ghp/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

#include "ghp/config.hpp"

namespace ghp {

using nlohmann::json;

namespace {

json nan_to_null(double x) {
    if (std::isnan(x)) return nullptr;
    return x;
}

json ci_to_json(const CiValue& v) { return json{{"mean", v.mean}, {"ci95_half", v.ci95_half}}; }

void open_or_throw(std::ofstream& out, const std::string& path) {
    out.open(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
}

} // namespace

std::string fmt_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    return buf;
}

std::string kpi_to_json(const KpiReport& kpi) {
    json j;
    j["tool_version"] = kToolVersion;
    j["config_hash"] = kpi.config_hash;
    j["policy"] = kpi.policy;
    j["replications"] = kpi.replications;
    j["years"] = kpi.years;
    j["seed"] = kpi.seed;
    j["profit"] = ci_to_json(kpi.profit);
    j["profit_hydrogen"] = ci_to_json(kpi.profit_hydrogen);
    j["profit_ppa"] = ci_to_json(kpi.profit_ppa);
    j["profit_market"] = ci_to_json(kpi.profit_market);
    j["h2_sold_mwh"] = kpi.h2_sold_mwh;
    j["h2_sold_mwh_fuelcell_equiv"] = kpi.h2_sold_mwh_fuelcell_equiv;
    j["energy_lost_mwh"] = kpi.energy_lost_mwh;
    j["curtailed_mwh"] = kpi.curtailed_mwh;
    j["p_h2_sale"] = kpi.p_h2_sale;
    j["p_buy"] = kpi.p_buy;
    j["p_sell"] = kpi.p_sell;
    j["p_ppa_delivery"] = kpi.p_ppa_delivery;
    j["mean_sell_price"] = nan_to_null(kpi.mean_sell_price);
    j["mean_buy_price"] = nan_to_null(kpi.mean_buy_price);
    j["mean_h2_price"] = nan_to_null(kpi.mean_h2_price);
    j["ppa_shortfall_freq"] = kpi.ppa_shortfall_freq;
    j["value_at_start"] = kpi.value_at_start;
    j["summer_inventory"] = ci_to_json(kpi.summer_inventory);
    j["winter_inventory"] = ci_to_json(kpi.winter_inventory);
    return j.dump(2);
}

void write_kpi_json(const KpiReport& kpi, const std::string& path) {
    std::ofstream out;
    open_or_throw(out, path);
    out << kpi_to_json(kpi) << "\n";
}

void write_heatmap_csv(const HeatmapData& heatmap, const std::string& path) {
    std::ofstream out;
    open_or_throw(out, path);
    out << "period,inventory,probability,mean_inventory\n";
    const int bins = static_cast<int>(heatmap.grid_values.size());
    for (int t = 0; t < heatmap.periods; ++t) {
        for (int i = 0; i < bins; ++i) {
            const double pr = heatmap.prob[static_cast<std::size_t>(t) * bins + i];
            if (pr == 0.0) continue; // sparse rows keep the file small
            out << (t + 1) << ',' << fmt_fixed(heatmap.grid_values[i], 2) << ','
                << fmt_fixed(pr, 4) << ',' << fmt_fixed(heatmap.mean_inventory[t], 2) << "\n";
        }
    }
}

void write_traces_csv(const std::vector<Trace>& traces, const std::string& path) {
    std::ofstream out;
    open_or_throw(out, path);
    out << "replication,period,pe_idx,ph_idx,production,inventory_start,ppa_due,"
           "sell,buy,ppa,h2,x_in,x_out,curtailed,loss_mwh,"
           "reward_market_sell,reward_market_buy,reward_ppa,reward_hydrogen,reward_total,inventory_end\n";
    for (std::size_t r = 0; r < traces.size(); ++r) {
        for (const auto& rec : traces[r]) {
            out << r << ',' << rec.t << ',' << rec.pe_idx << ',' << rec.ph_idx << ',' << rec.y << ','
                << fmt_fixed(rec.inventory_start, 2) << ',' << rec.ppa_due << ','
                << fmt_fixed(rec.decision.sell, 2) << ',' << fmt_fixed(rec.decision.buy, 2) << ','
                << fmt_fixed(rec.decision.ppa, 2) << ',' << fmt_fixed(rec.decision.h2, 2) << ','
                << fmt_fixed(rec.flows.x_in, 2) << ',' << fmt_fixed(rec.flows.x_out, 2) << ','
                << fmt_fixed(rec.flows.curtailed, 2) << ',' << fmt_fixed(rec.flows.loss_mwh, 2) << ','
                << fmt_fixed(rec.reward.market_sell, 2) << ',' << fmt_fixed(rec.reward.market_buy, 2) << ','
                << fmt_fixed(rec.reward.ppa, 2) << ',' << fmt_fixed(rec.reward.hydrogen, 2) << ','
                << fmt_fixed(rec.reward.total, 2) << ',' << fmt_fixed(rec.inventory_end, 2) << "\n";
        }
    }
}

} // namespace ghp
