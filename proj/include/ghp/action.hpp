#pragma once

#include <functional>
#include <vector>

#include "ghp/model.hpp"
#include "ghp/stochastic.hpp"

namespace ghp {

/// Per-period reward in EUR, split the way the profit decomposition
/// reports it. `ppa` carries the PPA shortfall penalty, `hydrogen` the
/// fixed-contract shortfall penalty. total is the exact component sum.
struct RewardBreakdown {
    double market_sell = 0.0;
    double market_buy = 0.0; // negative contribution
    double ppa = 0.0;
    double hydrogen = 0.0;
    double total = 0.0;
};

/// Storage flows induced by a decision. Selling branch: leftover
/// production is converted; withdrawals cover sales beyond production.
/// Buying branch: purchases and unneeded production are converted;
/// withdrawals cover only the PPA. Conversion applies the round-trip
/// factor on the way in; the inflow is capped by the electrolyzer and by
/// tank headroom (counting same-period gas sales), the excess curtailed.
/// Throws std::invalid_argument when sell and buy are both positive.
DerivedFlows derive_flows(const State& s, const Decision& x, const SystemParams& p);

/// Gas quantity forced by a fixed contract due at s.t: min(quantity,
/// sale cap, tank content after flows). Zero off due periods.
double forced_h2(const State& s, const Decision& market_part, const SystemParams& p, const FixedContract& c);

/// Full feasibility check (constraints, capacity bounds, policy gating).
bool is_feasible(const State& s, const Decision& x, const SystemParams& p, const HydrogenPolicy& policy);

/// Visits every feasible integer-unit decision together with its flows.
/// Order: ppa ascending; within it the sell branch (sell ascending, buy=0)
/// then the buy branch (buy ascending); hydrogen quantity innermost
/// ascending.
void for_each_feasible(const State& s, const SystemParams& p, const HydrogenPolicy& policy,
                       const std::function<void(const Decision&, const DerivedFlows&)>& fn);

std::vector<Decision> enumerate_actions(const State& s, const SystemParams& p, const HydrogenPolicy& policy);

/// Direct reward of a feasible decision. Throws std::invalid_argument if
/// the decision is infeasible in s.
RewardBreakdown reward(const State& s, const Decision& x, const SystemParams& p, const HydrogenPolicy& policy,
                       const PriceLattice& elec, const PriceLattice& hyd);

/// Reward without the feasibility gate, for hot paths that enumerate
/// feasible decisions themselves.
RewardBreakdown reward_unchecked(const State& s, const Decision& x, const SystemParams& p,
                                 const HydrogenPolicy& policy, const PriceLattice& elec, const PriceLattice& hyd);

/// Deterministic part of the transition: inventory snapped down to the
/// grid, obligation decremented or reset on deadlines, prices and t
/// carried through.
PostDecisionState transition_deterministic(const State& s, const Decision& x, const SystemParams& p);

/// True when period t (1-based) is a PPA deadline.
inline bool ppa_deadline(int t, const SystemParams& p) { return t % p.ppa_interval == 0; }

/// Largest grid value not exceeding x (conservative inventory snap).
double snap_down(double x, double resolution);

} // namespace ghp
