#include "ghp/model.hpp"

#include <cmath>
#include <sstream>

namespace ghp {

double PriceProcessParams::stationary_std() const {
    return sigma / std::sqrt(1.0 - theta * theta);
}

SaleMode sale_mode_at(const HydrogenPolicy& policy, int t) {
    struct Visitor {
        int t;
        SaleMode operator()(const FreeEveryPeriod&) const { return SaleMode::Free; }
        SaleMode operator()(const FreePeriodic& p) const {
            return (t % p.n_h == 0) ? SaleMode::Free : SaleMode::Zero;
        }
        SaleMode operator()(const FixedContract& p) const {
            return (t % p.n_h == 0) ? SaleMode::Fixed : SaleMode::Zero;
        }
        SaleMode operator()(const NoSale&) const { return SaleMode::Zero; }
        SaleMode operator()(const NoStorage&) const { return SaleMode::Zero; }
    };
    return std::visit(Visitor{t}, policy);
}

bool policy_allows_buy(const HydrogenPolicy& policy) {
    return !std::holds_alternative<NoStorage>(policy);
}

std::string policy_name(const HydrogenPolicy& policy) {
    struct Visitor {
        std::string operator()(const FreeEveryPeriod&) const { return "free_every_period"; }
        std::string operator()(const FreePeriodic& p) const {
            return "free_periodic(" + std::to_string(p.n_h) + ")";
        }
        std::string operator()(const FixedContract& p) const {
            std::ostringstream os;
            os << "fixed_contract(" << p.n_h << "," << p.fixed_price << "," << p.quantity << ")";
            return os.str();
        }
        std::string operator()(const NoSale&) const { return "no_sale"; }
        std::string operator()(const NoStorage&) const { return "no_storage"; }
    };
    return std::visit(Visitor{}, policy);
}

std::string ValidationReport::joined() const {
    std::string out;
    for (const auto& v : violations) {
        if (!out.empty()) out += "; ";
        out += v;
    }
    return out;
}

namespace {

bool divides_unit(double resolution) {
    if (resolution <= 0.0) return false;
    const double steps = 1.0 / resolution;
    return std::abs(steps - std::round(steps)) < 1e-9;
}

} // namespace

ValidationReport validate(const SystemParams& params, const HydrogenPolicy& policy, const WindModel& wind) {
    ValidationReport report;
    auto bad = [&](const std::string& msg) { report.violations.push_back(msg); };

    if (!(params.eff_electrolyzer > 0.0 && params.eff_electrolyzer <= 1.0))
        bad("eff_electrolyzer out of range");
    if (!(params.eff_fuelcell > 0.0 && params.eff_fuelcell <= 1.0))
        bad("eff_fuelcell out of range");
    if (params.horizon_days < 1) bad("horizon_days must be >= 1");
    if (params.ppa_interval < 1) bad("ppa_interval must be >= 1");
    if (params.ppa_target < 0) bad("ppa_target must be >= 0");
    if (params.cap_electrolyzer < 0) bad("cap_electrolyzer must be >= 0");
    if (params.cap_fuelcell < 0) bad("cap_fuelcell must be >= 0");
    if (params.cap_transmission < 0) bad("cap_transmission must be >= 0");
    if (params.cap_h2_sale < 0) bad("cap_h2_sale must be >= 0");
    if (params.storage_capacity < 0) bad("storage_capacity must be >= 0");
    if (params.unit_mwh <= 0) bad("unit_mwh must be > 0");
    if (!divides_unit(params.inventory_resolution))
        bad("inventory_resolution must be positive and divide one unit");
    if (params.ppa_target > params.cap_transmission * params.ppa_interval + 1e-9)
        bad("ppa_target exceeds deliverable capacity cap_transmission * ppa_interval");
    if (params.inventory_resolution > 0) {
        const double cells = params.storage_capacity / params.inventory_resolution;
        if (std::abs(cells - std::round(cells)) > 1e-9)
            bad("storage_capacity must be a multiple of inventory_resolution");
    }

    if (const auto* p = std::get_if<FreePeriodic>(&policy)) {
        if (p->n_h < 1) bad("free_periodic n_h must be >= 1");
    } else if (const auto* c = std::get_if<FixedContract>(&policy)) {
        if (c->n_h < 1) bad("fixed_contract n_h must be >= 1");
        if (c->quantity < 0) bad("fixed_contract quantity must be >= 0");
    }

    const auto& t = wind.turbine;
    if (!(t.cut_in > 0)) bad("cut_in must be > 0");
    if (!(t.cut_in < t.rated_speed)) bad("cut_in < rated required");
    if (!(t.rated_speed < t.cut_out)) bad("rated < cut_out required");
    if (!(t.rated_power_mw > 0)) bad("rated_power must be > 0");
    for (std::size_t m = 0; m < wind.monthly_weibull.size(); ++m) {
        const auto& w = wind.monthly_weibull[m];
        if (!(w.shape > 0) || !(w.scale > 0)) {
            bad("weibull shape/scale must be > 0 (month " + std::to_string(m + 1) + ")");
        }
    }
    if (wind.production_levels < 2) bad("production_levels must be >= 2");
    if (!(wind.reference_height > 0)) bad("reference_height must be > 0");
    if (!(wind.hub_height > 0)) bad("hub_height must be > 0");

    return report;
}

ValidationReport validate_price_process(const PriceProcessParams& p, const std::string& label) {
    ValidationReport report;
    if (!(std::abs(p.theta) < 1.0))
        report.violations.push_back(label + ": stationarity violated (|theta| must be < 1)");
    if (p.sigma < 0.0) report.violations.push_back(label + ": sigma must be >= 0");
    return report;
}

SystemParams effective_params(SystemParams params, const HydrogenPolicy& policy) {
    if (std::holds_alternative<NoStorage>(policy)) {
        params.cap_electrolyzer = 0.0;
        params.cap_fuelcell = 0.0;
    }
    return params;
}

} // namespace ghp
