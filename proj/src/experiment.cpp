#include "ghp/experiment.hpp"

#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ghp {

using nlohmann::json;

namespace {

std::vector<double> parse_args_list(const std::string& text, std::size_t open, const std::string& original) {
    if (text.back() != ')') throw ConfigError("setting '" + original + "': missing ')'");
    std::vector<double> args;
    std::string inner = text.substr(open + 1, text.size() - open - 2);
    std::stringstream ss(inner);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            args.push_back(std::stod(tok));
        } catch (...) {
            throw ConfigError("setting '" + original + "': bad argument '" + tok + "'");
        }
    }
    return args;
}

/// Finest grid step (from the benchmark choices 0.5 and 0.1) that keeps
/// alpha times an integer on the grid.
double resolution_for(double round_trip, double base_resolution) {
    auto aligned = [&](double res) {
        const double steps = round_trip / res;
        return std::abs(steps - std::round(steps)) < 1e-9;
    };
    if (aligned(base_resolution)) return base_resolution;
    if (aligned(0.1)) return 0.1;
    return base_resolution; // generic solver path handles the rest
}

void set_round_trip(RunConfig& cfg, double alpha) {
    const double stage = std::sqrt(alpha);
    cfg.system.eff_electrolyzer = stage;
    cfg.system.eff_fuelcell = stage;
    cfg.system.inventory_resolution = resolution_for(alpha, cfg.system.inventory_resolution);
}

} // namespace

Setting parse_setting(const std::string& text) {
    Setting s;
    s.label = text;
    if (text == "A") {
        s.kind = Setting::Kind::FreeMarket;
        return s;
    }
    if (text == "E") {
        s.kind = Setting::Kind::NoStorage;
        return s;
    }
    if (text == "D(H2)" || text == "D(h2)") {
        s.kind = Setting::Kind::StorageOnly;
        s.round_trip = 0.5;
        return s;
    }
    if (text == "D(B)" || text == "D(b)") {
        s.kind = Setting::Kind::StorageOnly;
        s.round_trip = 0.9;
        return s;
    }
    const std::size_t open = text.find('(');
    if (open == 1 && (text[0] == 'B' || text[0] == 'C')) {
        const auto args = parse_args_list(text, open, text);
        if (text[0] == 'B') {
            if (args.size() != 1) throw ConfigError("setting '" + text + "': expected B(n_h)");
            s.kind = Setting::Kind::FreePeriodicSale;
            s.n_h = static_cast<int>(std::lround(args[0]));
            return s;
        }
        if (args.size() != 3) throw ConfigError("setting '" + text + "': expected C(n_h,price,quantity)");
        s.kind = Setting::Kind::FixedSale;
        s.n_h = static_cast<int>(std::lround(args[0]));
        s.fixed_price = args[1];
        s.quantity = args[2];
        return s;
    }
    throw ConfigError("unknown setting '" + text + "'");
}

RunConfig apply_setting(RunConfig base, const Setting& s) {
    switch (s.kind) {
    case Setting::Kind::FreeMarket:
        base.policy = FreeEveryPeriod{};
        break;
    case Setting::Kind::FreePeriodicSale:
        base.policy = FreePeriodic{s.n_h};
        break;
    case Setting::Kind::FixedSale:
        base.policy = FixedContract{s.n_h, s.fixed_price, s.quantity};
        base.grids.hyd_levels = 1; // contract price replaces the market process
        break;
    case Setting::Kind::StorageOnly:
        base.policy = NoSale{};
        base.grids.hyd_levels = 1;
        set_round_trip(base, s.round_trip);
        break;
    case Setting::Kind::NoStorage:
        base.policy = NoStorage{};
        base.grids.hyd_levels = 1;
        break;
    }
    return base;
}

SweepAxis parse_axis(const std::string& name) {
    if (name == "none") return SweepAxis::None;
    if (name == "fixed_h2_price") return SweepAxis::FixedH2Price;
    if (name == "h2_market_mean") return SweepAxis::H2MarketMean;
    if (name == "ppa_target") return SweepAxis::PpaTarget;
    if (name == "round_trip_eff") return SweepAxis::RoundTripEff;
    throw ConfigError("unknown sweep axis '" + name + "'");
}

std::string axis_name(SweepAxis axis) {
    switch (axis) {
    case SweepAxis::None: return "none";
    case SweepAxis::FixedH2Price: return "fixed_h2_price";
    case SweepAxis::H2MarketMean: return "h2_market_mean";
    case SweepAxis::PpaTarget: return "ppa_target";
    case SweepAxis::RoundTripEff: return "round_trip_eff";
    }
    return "none";
}

RunConfig apply_axis(RunConfig cfg, SweepAxis axis, double value) {
    switch (axis) {
    case SweepAxis::None:
        break;
    case SweepAxis::FixedH2Price:
        if (auto* c = std::get_if<FixedContract>(&cfg.policy)) c->fixed_price = value;
        break; // settings without a contract serve as fixed reference curves
    case SweepAxis::H2MarketMean:
        cfg.hyd_price.mu = value * (1.0 - cfg.hyd_price.theta);
        break;
    case SweepAxis::PpaTarget:
        cfg.system.ppa_target = static_cast<int>(std::lround(value));
        break;
    case SweepAxis::RoundTripEff:
        set_round_trip(cfg, value);
        break;
    }
    return cfg;
}

ExperimentSpec load_experiment(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open experiment file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid experiment JSON: ") + e.what());
    }

    ExperimentSpec spec;
    if (!j.contains("base_config")) throw ConfigError("experiment: missing 'base_config'");
    const std::filesystem::path base_path =
        std::filesystem::path(path).parent_path() / j.at("base_config").get<std::string>();
    spec.base = load_config(base_path.string());

    if (!j.contains("settings") || !j.at("settings").is_array() || j.at("settings").empty())
        throw ConfigError("experiment: 'settings' must be a non-empty array");
    for (const auto& s : j.at("settings")) spec.settings.push_back(parse_setting(s.get<std::string>()));

    if (j.contains("sweep")) {
        const auto& sweep = j.at("sweep");
        spec.axis = parse_axis(sweep.value("axis", std::string("none")));
        if (spec.axis != SweepAxis::None) {
            if (!sweep.contains("grid") || !sweep.at("grid").is_array() || sweep.at("grid").empty())
                throw ConfigError("experiment: sweep.grid must be a non-empty array");
            for (const auto& v : sweep.at("grid")) spec.grid_values.push_back(v.get<double>());
            for (std::size_t i = 1; i < spec.grid_values.size(); ++i)
                if (!(spec.grid_values[i] > spec.grid_values[i - 1]))
                    throw ConfigError("experiment: sweep.grid must be strictly increasing");
        }
    }
    if (spec.grid_values.empty()) spec.grid_values.push_back(0.0);

    spec.replications = j.value("replications", 1000);
    spec.years = j.value("years", 1);
    spec.seed = j.value("seed", static_cast<std::uint64_t>(1));
    spec.out_dir = j.value("out_dir", std::string("out"));
    if (spec.replications < 1) throw ConfigError("experiment: replications must be >= 1");
    return spec;
}

std::shared_ptr<const ValueTable> TableCache::solve(const RunConfig& cfg, int workers) {
    const std::uint64_t hash = config_hash(cfg);
    for (std::size_t k = 0; k < cache_.size(); ++k) {
        if (cache_[k].first == hash) {
            auto entry = cache_[k];
            cache_.erase(cache_.begin() + k);
            cache_.push_back(entry);
            return entry.second;
        }
    }
    const Instance inst = build_instance(cfg);
    auto table = std::make_shared<ValueTable>(backward_induction(inst, workers));
    cache_.emplace_back(hash, table);
    if (cache_.size() > capacity_) cache_.erase(cache_.begin());
    return table;
}

SweepResult run_sweep(const ExperimentSpec& spec, int workers) {
    SweepResult result;
    TableCache cache;
    for (const auto& setting : spec.settings) {
        const RunConfig with_setting = apply_setting(spec.base, setting);
        for (double value : spec.grid_values) {
            try {
                const RunConfig cfg = apply_axis(with_setting, spec.axis, value);
                const Instance inst = build_instance(cfg);
                auto table = cache.solve(cfg, workers);
                SimOptions opts;
                opts.replications = spec.replications;
                opts.years = spec.years;
                opts.seed = spec.seed;
                opts.workers = workers;
                SweepRow row;
                row.setting = setting.label;
                row.axis_value = value;
                row.kpi = simulate(inst, *table, opts);
                result.rows.push_back(std::move(row));
            } catch (const std::exception& e) {
                std::ostringstream os;
                os << setting.label << "@" << value << ": " << e.what();
                result.failures.push_back(os.str());
            }
        }
    }
    return result;
}

void write_sweep_csv(const SweepResult& result, SweepAxis axis, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write sweep CSV: " + path);
    out << "setting,axis,axis_value,profit,profit_ci95,profit_hydrogen,profit_ppa,profit_market,"
           "h2_sold_mwh,energy_lost_mwh,curtailed_mwh,p_h2_sale,p_buy,p_sell,p_ppa_delivery,"
           "mean_sell_price,mean_buy_price,mean_h2_price,ppa_shortfall_freq,value_at_start,config_hash\n";
    auto price = [](double v) { return std::isnan(v) ? std::string() : fmt_fixed(v, 2); };
    auto quoted = [](const std::string& s) {
        return s.find(',') == std::string::npos ? s : "\"" + s + "\"";
    };
    for (const auto& row : result.rows) {
        const KpiReport& k = row.kpi;
        out << quoted(row.setting) << ',' << axis_name(axis) << ',' << fmt_fixed(row.axis_value, 3) << ','
            << fmt_fixed(k.profit.mean, 2) << ',' << fmt_fixed(k.profit.ci95_half, 2) << ','
            << fmt_fixed(k.profit_hydrogen.mean, 2) << ',' << fmt_fixed(k.profit_ppa.mean, 2) << ','
            << fmt_fixed(k.profit_market.mean, 2) << ',' << fmt_fixed(k.h2_sold_mwh, 2) << ','
            << fmt_fixed(k.energy_lost_mwh, 2) << ',' << fmt_fixed(k.curtailed_mwh, 2) << ','
            << fmt_fixed(k.p_h2_sale, 4) << ',' << fmt_fixed(k.p_buy, 4) << ',' << fmt_fixed(k.p_sell, 4)
            << ',' << fmt_fixed(k.p_ppa_delivery, 4) << ',' << price(k.mean_sell_price) << ','
            << price(k.mean_buy_price) << ',' << price(k.mean_h2_price) << ','
            << fmt_fixed(k.ppa_shortfall_freq, 4) << ',' << fmt_fixed(k.value_at_start, 2) << ','
            << k.config_hash << "\n";
    }
}

std::string sanitize_label(const std::string& label) {
    std::string out;
    for (char c : label) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '.') out.push_back(c);
        else if (c == '(' || c == ',' ) out.push_back('_');
        // ')' dropped
    }
    return out;
}

} // namespace ghp
