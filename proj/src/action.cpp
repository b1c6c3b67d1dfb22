#include "ghp/action.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ghp {

namespace {

constexpr double kEps = 1e-9;

int floor_int(double x) { return static_cast<int>(std::floor(x + kEps)); }

struct MarketFlows {
    double raw_in = 0.0;  // production/purchases headed for conversion
    double x_out = 0.0;
};

MarketFlows market_flows(const State& s, const Decision& x) {
    MarketFlows f;
    const double y = s.y;
    if (x.buy > 0.0) {
        f.raw_in = x.buy + std::max(0.0, y - x.ppa);
        f.x_out = std::max(0.0, x.ppa - y);
    } else {
        f.raw_in = std::max(0.0, y - x.sell - x.ppa);
        f.x_out = std::max(0.0, x.sell + x.ppa - y);
    }
    return f;
}

} // namespace

double snap_down(double x, double resolution) {
    return std::floor(x / resolution + 1e-9) * resolution;
}

DerivedFlows derive_flows(const State& s, const Decision& x, const SystemParams& p) {
    if (x.sell > 0.0 && x.buy > 0.0)
        throw std::invalid_argument("derive_flows: sell and buy are mutually exclusive");
    const MarketFlows mf = market_flows(s, x);
    const double alpha = p.round_trip();
    const double headroom = std::max(0.0, p.storage_capacity - s.inventory + mf.x_out + x.h2);
    DerivedFlows f;
    f.x_in = std::min({alpha * mf.raw_in, p.cap_electrolyzer, headroom});
    f.x_out = mf.x_out;
    f.curtailed = std::max(0.0, mf.raw_in - f.x_in / alpha);
    f.loss_mwh = f.x_in * (1.0 - alpha) / alpha * p.unit_mwh;
    return f;
}

double forced_h2(const State& s, const Decision& market_part, const SystemParams& p, const FixedContract& c) {
    if (s.t % c.n_h != 0) return 0.0;
    // First pass without the gas-sale headroom term; the final inflow with
    // the sale included can only be larger, so this quantity stays covered.
    const MarketFlows mf = market_flows(s, market_part);
    const double alpha = p.round_trip();
    const double headroom = std::max(0.0, p.storage_capacity - s.inventory + mf.x_out);
    const double x_in0 = std::min({alpha * mf.raw_in, p.cap_electrolyzer, headroom});
    const double avail = s.inventory + x_in0 - mf.x_out;
    return std::min({c.quantity, p.cap_h2_sale, std::max(0.0, avail)});
}

bool is_feasible(const State& s, const Decision& x, const SystemParams& p, const HydrogenPolicy& policy) {
    if (x.sell < -kEps || x.buy < -kEps || x.ppa < -kEps || x.h2 < -kEps) return false;
    if (x.sell > kEps && x.buy > kEps) return false;
    if (x.ppa > s.ppa_due + kEps) return false;
    if (x.sell + x.ppa > p.cap_transmission + kEps) return false;
    if (x.buy > kEps) {
        if (!policy_allows_buy(policy)) return false;
        const double cap = std::min((p.storage_capacity - s.inventory) / p.round_trip(), p.cap_transmission);
        if (x.buy > cap + kEps) return false;
    }
    const DerivedFlows f = derive_flows(s, x, p);
    if (f.x_out > p.cap_fuelcell + kEps) return false;
    if (f.x_out > s.inventory + f.x_in + kEps) return false;
    if (x.h2 > p.cap_h2_sale + kEps) return false;
    if (x.h2 > s.inventory + f.x_in - f.x_out + kEps) return false;
    switch (sale_mode_at(policy, s.t)) {
    case SaleMode::Zero:
        if (x.h2 > kEps) return false;
        break;
    case SaleMode::Fixed:
        if (std::abs(x.h2 - forced_h2(s, x, p, std::get<FixedContract>(policy))) > 1e-6) return false;
        break;
    case SaleMode::Free:
        break;
    }
    const double end_inventory = s.inventory + f.x_in - f.x_out - x.h2;
    return end_inventory >= -kEps && end_inventory <= p.storage_capacity + kEps;
}

void for_each_feasible(const State& s, const SystemParams& p, const HydrogenPolicy& policy,
                       const std::function<void(const Decision&, const DerivedFlows&)>& fn) {
    const double alpha = p.round_trip();
    const SaleMode mode = sale_mode_at(policy, s.t);
    const int kc = floor_int(p.cap_transmission);
    const int ppa_max = std::min(s.ppa_due, kc);
    const int kh = floor_int(p.cap_h2_sale);

    auto emit = [&](Decision d) {
        const MarketFlows mf = market_flows(s, d);
        const double m = std::min(alpha * mf.raw_in, p.cap_electrolyzer);
        if (mf.x_out > p.cap_fuelcell + kEps) return false;     // fuel-cell cap
        if (mf.x_out > s.inventory + m + kEps) return false;    // nothing left to withdraw
        switch (mode) {
        case SaleMode::Zero: {
            d.h2 = 0.0;
            fn(d, derive_flows(s, d, p));
            break;
        }
        case SaleMode::Fixed: {
            d.h2 = forced_h2(s, d, p, std::get<FixedContract>(policy));
            fn(d, derive_flows(s, d, p));
            break;
        }
        case SaleMode::Free: {
            // Tank content net of flows caps the sale; the headroom coupling
            // (inflow growing with the sale when the tank is full) keeps the
            // feasible set contiguous in h2.
            const double avail = s.inventory + m - mf.x_out;
            const int h_max = std::min(kh, floor_int(avail));
            for (int h = 0; h <= h_max; ++h) {
                d.h2 = h;
                fn(d, derive_flows(s, d, p));
            }
            break;
        }
        }
        return true;
    };

    for (int ppa = 0; ppa <= ppa_max; ++ppa) {
        for (int sell = 0; sell + ppa <= kc; ++sell) {
            if (!emit(Decision{static_cast<double>(sell), 0.0, static_cast<double>(ppa), 0.0})) break;
        }
        if (policy_allows_buy(policy)) {
            const int buy_max =
                std::min(kc, floor_int((p.storage_capacity - s.inventory) / alpha));
            for (int buy = 1; buy <= buy_max; ++buy) {
                emit(Decision{0.0, static_cast<double>(buy), static_cast<double>(ppa), 0.0});
            }
        }
    }
}

std::vector<Decision> enumerate_actions(const State& s, const SystemParams& p, const HydrogenPolicy& policy) {
    std::vector<Decision> out;
    for_each_feasible(s, p, policy, [&](const Decision& d, const DerivedFlows&) { out.push_back(d); });
    return out;
}

RewardBreakdown reward_unchecked(const State& s, const Decision& x, const SystemParams& p,
                                 const HydrogenPolicy& policy, const PriceLattice& elec, const PriceLattice& hyd) {
    const double u = p.unit_mwh;
    const double pe = elec.levels[s.pe_idx];
    RewardBreakdown r;
    r.market_sell = pe * x.sell * u;
    r.market_buy = -(pe + p.buy_premium) * x.buy * u;
    r.ppa = p.ppa_price * x.ppa * u;
    if (ppa_deadline(s.t, p))
        r.ppa -= p.shortage_penalty * std::max(0.0, s.ppa_due - x.ppa) * u;
    switch (sale_mode_at(policy, s.t)) {
    case SaleMode::Free:
        // Conversion losses are booked at electrolysis, so a stored unit
        // sold as gas still carries 1/eff_fuelcell times its electricity
        // equivalent; market sales are paid for that full gas content.
        r.hydrogen = hyd.levels[s.ph_idx] * x.h2 * u / p.eff_fuelcell;
        break;
    case SaleMode::Zero:
        r.hydrogen = 0.0;
        break;
    case SaleMode::Fixed: {
        // Contract prices are per physical MWh of gas, like market sales;
        // the shortfall penalty mirrors the PPA penalty per unit-MWh.
        const auto& c = std::get<FixedContract>(policy);
        r.hydrogen = c.fixed_price * x.h2 * u / p.eff_fuelcell -
                     p.shortage_penalty * std::max(0.0, c.quantity - x.h2) * u;
        break;
    }
    }
    r.total = r.market_sell + r.market_buy + r.ppa + r.hydrogen;
    return r;
}

RewardBreakdown reward(const State& s, const Decision& x, const SystemParams& p, const HydrogenPolicy& policy,
                       const PriceLattice& elec, const PriceLattice& hyd) {
    if (!is_feasible(s, x, p, policy))
        throw std::invalid_argument("reward: infeasible decision");
    return reward_unchecked(s, x, p, policy, elec, hyd);
}

PostDecisionState transition_deterministic(const State& s, const Decision& x, const SystemParams& p) {
    const DerivedFlows f = derive_flows(s, x, p);
    PostDecisionState post;
    post.t = s.t;
    post.pe_idx = s.pe_idx;
    post.ph_idx = s.ph_idx;
    const double raw = s.inventory + f.x_in - f.x_out - x.h2;
    post.inventory = std::clamp(snap_down(std::max(0.0, raw), p.inventory_resolution), 0.0, p.storage_capacity);
    post.ppa_due = ppa_deadline(s.t, p) ? p.ppa_target
                                        : s.ppa_due - static_cast<int>(std::lround(x.ppa));
    return post;
}

} // namespace ghp
