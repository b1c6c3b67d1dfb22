#include "ghp/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ghp {

using nlohmann::json;

namespace {

json turbine_to_json(const TurbineCurve& t) {
    return json{{"rated_power_mw", t.rated_power_mw},
                {"cut_in", t.cut_in},
                {"rated_speed", t.rated_speed},
                {"cut_out", t.cut_out}};
}

json wind_to_json(const WindModel& w) {
    json months = json::array();
    for (const auto& m : w.monthly_weibull) months.push_back(json{{"shape", m.shape}, {"scale", m.scale}});
    return json{{"monthly_weibull", months},
                {"turbine", turbine_to_json(w.turbine)},
                {"hub_height", w.hub_height},
                {"reference_height", w.reference_height},
                {"shear_exponent", w.shear_exponent},
                {"production_levels", w.production_levels}};
}

json policy_to_json(const HydrogenPolicy& p) {
    struct Visitor {
        json operator()(const FreeEveryPeriod&) const { return json{{"type", "free_every_period"}}; }
        json operator()(const FreePeriodic& v) const {
            return json{{"type", "free_periodic"}, {"n_h", v.n_h}};
        }
        json operator()(const FixedContract& v) const {
            return json{{"type", "fixed_contract"}, {"n_h", v.n_h}, {"fixed_price", v.fixed_price}, {"quantity", v.quantity}};
        }
        json operator()(const NoSale&) const { return json{{"type", "no_sale"}}; }
        json operator()(const NoStorage&) const { return json{{"type", "no_storage"}}; }
    };
    return std::visit(Visitor{}, p);
}

json system_to_json(const SystemParams& s) {
    return json{{"horizon_days", s.horizon_days},
                {"ppa_interval", s.ppa_interval},
                {"ppa_target", s.ppa_target},
                {"ppa_price", s.ppa_price},
                {"shortage_penalty", s.shortage_penalty},
                {"eff_electrolyzer", s.eff_electrolyzer},
                {"eff_fuelcell", s.eff_fuelcell},
                {"cap_electrolyzer", s.cap_electrolyzer},
                {"cap_fuelcell", s.cap_fuelcell},
                {"cap_transmission", s.cap_transmission},
                {"cap_h2_sale", s.cap_h2_sale},
                {"storage_capacity", s.storage_capacity},
                {"buy_premium", s.buy_premium},
                {"unit_mwh", s.unit_mwh},
                {"inventory_resolution", s.inventory_resolution}};
}

json process_to_json(const PriceProcessParams& p) {
    return json{{"mu", p.mu}, {"theta", p.theta}, {"sigma", p.sigma}};
}

template <typename T>
T require(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

SystemParams system_from_json(const json& j) {
    SystemParams s;
    maybe(j, "horizon_days", s.horizon_days);
    maybe(j, "ppa_interval", s.ppa_interval);
    maybe(j, "ppa_target", s.ppa_target);
    maybe(j, "ppa_price", s.ppa_price);
    maybe(j, "shortage_penalty", s.shortage_penalty);
    maybe(j, "eff_electrolyzer", s.eff_electrolyzer);
    maybe(j, "eff_fuelcell", s.eff_fuelcell);
    maybe(j, "cap_electrolyzer", s.cap_electrolyzer);
    maybe(j, "cap_fuelcell", s.cap_fuelcell);
    maybe(j, "cap_transmission", s.cap_transmission);
    maybe(j, "cap_h2_sale", s.cap_h2_sale);
    maybe(j, "storage_capacity", s.storage_capacity);
    maybe(j, "buy_premium", s.buy_premium);
    maybe(j, "unit_mwh", s.unit_mwh);
    maybe(j, "inventory_resolution", s.inventory_resolution);
    return s;
}

PriceProcessParams process_from_json(const json& j, const std::string& where) {
    PriceProcessParams p;
    p.mu = require<double>(j, "mu", where);
    p.theta = require<double>(j, "theta", where);
    p.sigma = require<double>(j, "sigma", where);
    return p;
}

WindModel wind_from_json(const json& j) {
    WindModel w;
    if (j.contains("monthly_weibull")) {
        const auto& months = j.at("monthly_weibull");
        if (!months.is_array() || months.size() != 12)
            throw ConfigError("wind.monthly_weibull: expected 12 entries");
        for (std::size_t m = 0; m < 12; ++m) {
            w.monthly_weibull[m].shape = require<double>(months[m], "shape", "wind.monthly_weibull");
            w.monthly_weibull[m].scale = require<double>(months[m], "scale", "wind.monthly_weibull");
        }
    }
    if (j.contains("turbine")) {
        const auto& t = j.at("turbine");
        maybe(t, "rated_power_mw", w.turbine.rated_power_mw);
        maybe(t, "cut_in", w.turbine.cut_in);
        maybe(t, "rated_speed", w.turbine.rated_speed);
        maybe(t, "cut_out", w.turbine.cut_out);
    }
    maybe(j, "hub_height", w.hub_height);
    maybe(j, "reference_height", w.reference_height);
    maybe(j, "shear_exponent", w.shear_exponent);
    maybe(j, "production_levels", w.production_levels);
    return w;
}

HydrogenPolicy policy_from_json(const json& j) {
    const std::string type = require<std::string>(j, "type", "policy");
    if (type == "free_every_period") return FreeEveryPeriod{};
    if (type == "free_periodic") {
        FreePeriodic p;
        p.n_h = require<int>(j, "n_h", "policy");
        return p;
    }
    if (type == "fixed_contract") {
        FixedContract p;
        p.n_h = require<int>(j, "n_h", "policy");
        p.fixed_price = require<double>(j, "fixed_price", "policy");
        p.quantity = require<double>(j, "quantity", "policy");
        return p;
    }
    if (type == "no_sale") return NoSale{};
    if (type == "no_storage") return NoStorage{};
    throw ConfigError("policy.type: unknown value '" + type + "'");
}

} // namespace

std::string config_to_json(const RunConfig& cfg) {
    json j;
    j["system"] = system_to_json(cfg.system);
    j["electricity_price"] = process_to_json(cfg.elec_price);
    j["hydrogen_price"] = process_to_json(cfg.hyd_price);
    j["wind"] = wind_to_json(cfg.wind);
    j["policy"] = policy_to_json(cfg.policy);
    j["grids"] = json{{"elec_levels", cfg.grids.elec_levels},
                      {"hyd_levels", cfg.grids.hyd_levels},
                      {"span_std", cfg.grids.span_std}};
    json init{{"inventory", cfg.initial.inventory}};
    if (cfg.initial.ppa_due) init["ppa_due"] = *cfg.initial.ppa_due;
    if (cfg.initial.elec_price) init["elec_price"] = *cfg.initial.elec_price;
    if (cfg.initial.hyd_price) init["hyd_price"] = *cfg.initial.hyd_price;
    j["initial"] = init;
    return j.dump(2);
}

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    RunConfig cfg;
    try {
        if (j.contains("system")) cfg.system = system_from_json(j.at("system"));
        if (j.contains("electricity_price"))
            cfg.elec_price = process_from_json(j.at("electricity_price"), "electricity_price");
        if (j.contains("hydrogen_price"))
            cfg.hyd_price = process_from_json(j.at("hydrogen_price"), "hydrogen_price");
        if (j.contains("wind")) cfg.wind = wind_from_json(j.at("wind"));
        if (j.contains("policy")) cfg.policy = policy_from_json(j.at("policy"));
        if (j.contains("grids")) {
            const auto& g = j.at("grids");
            maybe(g, "elec_levels", cfg.grids.elec_levels);
            maybe(g, "hyd_levels", cfg.grids.hyd_levels);
            maybe(g, "span_std", cfg.grids.span_std);
        }
        if (j.contains("initial")) {
            const auto& i = j.at("initial");
            maybe(i, "inventory", cfg.initial.inventory);
            if (i.contains("ppa_due")) cfg.initial.ppa_due = i.at("ppa_due").get<int>();
            if (i.contains("elec_price")) cfg.initial.elec_price = i.at("elec_price").get<double>();
            if (i.contains("hyd_price")) cfg.initial.hyd_price = i.at("hyd_price").get<double>();
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config schema: ") + e.what());
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void save_config(const RunConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write config file: " + path);
    out << config_to_json(cfg) << "\n";
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t config_hash(const RunConfig& cfg) {
    return fnv1a64(config_to_json(cfg));
}

ValidationReport validate_config(const RunConfig& cfg) {
    ValidationReport report = validate(cfg.system, cfg.policy, cfg.wind);
    auto merge = [&](ValidationReport r) {
        for (auto& v : r.violations) report.violations.push_back(std::move(v));
    };
    merge(validate_price_process(cfg.elec_price, "electricity_price"));
    merge(validate_price_process(cfg.hyd_price, "hydrogen_price"));
    if (cfg.grids.elec_levels < 1) report.violations.push_back("grids.elec_levels must be >= 1");
    if (cfg.grids.hyd_levels < 1) report.violations.push_back("grids.hyd_levels must be >= 1");
    if (!(cfg.grids.span_std > 0)) report.violations.push_back("grids.span_std must be > 0");
    if (cfg.initial.inventory < 0 || cfg.initial.inventory > cfg.system.storage_capacity + 1e-9)
        report.violations.push_back("initial.inventory outside [0, storage_capacity]");
    if (cfg.initial.ppa_due && (*cfg.initial.ppa_due < 0 || *cfg.initial.ppa_due > cfg.system.ppa_target))
        report.violations.push_back("initial.ppa_due outside [0, ppa_target]");
    return report;
}

RunConfig base_case_config() {
    RunConfig cfg;
    cfg.system = SystemParams{}; // defaults encode the benchmark plant
    cfg.elec_price = PriceProcessParams{5.23, 0.873, 5.551};
    cfg.hyd_price = PriceProcessParams{5.23, 0.873, 5.551};
    cfg.wind.monthly_weibull = {{{2.514, 6.816},
                                 {2.483, 6.643},
                                 {2.566, 6.413},
                                 {3.027, 5.641},
                                 {3.388, 5.670},
                                 {3.107, 5.330},
                                 {3.144, 5.142},
                                 {3.097, 4.939},
                                 {2.641, 5.223},
                                 {2.702, 5.812},
                                 {2.695, 5.959},
                                 {2.547, 6.453}}};
    cfg.wind.turbine = TurbineCurve{4.5, 3.0, 13.0, 25.0};
    cfg.wind.hub_height = 125.0;
    cfg.wind.reference_height = 10.0;
    cfg.wind.shear_exponent = 1.0 / 7.0;
    cfg.wind.production_levels = 22;
    cfg.policy = FreeEveryPeriod{};
    cfg.grids = GridSpec{11, 11, 3.0};
    return cfg;
}

} // namespace ghp
