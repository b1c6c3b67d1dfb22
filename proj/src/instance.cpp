#include "ghp/instance.hpp"

#include <cmath>

namespace ghp {

Instance build_instance(const RunConfig& cfg) {
    const ValidationReport report = validate_config(cfg);
    if (!report.ok()) throw ConfigError("invalid configuration: " + report.joined());

    Instance inst;
    inst.params = effective_params(cfg.system, cfg.policy);
    inst.policy = cfg.policy;
    inst.policy_label = policy_name(cfg.policy);
    inst.elec = discretize_ar1(cfg.elec_price, cfg.grids.elec_levels, cfg.grids.span_std);
    inst.hyd = discretize_ar1(cfg.hyd_price, cfg.grids.hyd_levels, cfg.grids.span_std);
    inst.prod = production_distribution(cfg.wind, inst.params);

    inst.grid.resolution = inst.params.inventory_resolution;
    inst.grid.points = static_cast<int>(std::lround(inst.params.storage_capacity / inst.grid.resolution)) + 1;

    inst.init_pe = cfg.initial.elec_price ? inst.elec.nearest(*cfg.initial.elec_price)
                                          : inst.elec.nearest(cfg.elec_price.stationary_mean());
    inst.init_ph = cfg.initial.hyd_price ? inst.hyd.nearest(*cfg.initial.hyd_price)
                                         : inst.hyd.nearest(cfg.hyd_price.stationary_mean());
    inst.init_inventory = cfg.initial.inventory;
    inst.init_v = cfg.initial.ppa_due ? *cfg.initial.ppa_due : cfg.system.ppa_target;
    inst.hash = config_hash(cfg);
    return inst;
}

} // namespace ghp
