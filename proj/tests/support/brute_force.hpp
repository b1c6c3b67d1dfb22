#pragma once

#include <array>
#include <limits>
#include <map>
#include <utility>

#include "ghp/action.hpp"
#include "ghp/instance.hpp"

namespace ghp::test {

/// Exhaustive expectimax over exogenous outcomes and enumerated decisions.
/// Independent of the solver: no staged maximization, no interpolation;
/// states transition through transition_deterministic and stay on the grid
/// because oracle instances keep all flows grid-exact.
class BruteForce {
public:
    explicit BruteForce(const Instance& inst) : inst_(inst) {}

    /// Expected optimal reward-to-go from the post-decision state after
    /// period t (periods t+1..T remain).
    double value(int t, int pe, int ph, double inv, int v) {
        if (t >= inst_.params.horizon_days) return 0.0;
        const Key key{t, pe, ph, inst_.grid.index_of(inv), v};
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        const int tau = t + 1;
        double total = 0.0;
        for (int pe2 = 0; pe2 < inst_.elec.size(); ++pe2) {
            const double w_pe = inst_.elec.prob(pe, pe2);
            if (w_pe == 0.0) continue;
            double acc_pe = 0.0;
            for (int ph2 = 0; ph2 < inst_.hyd.size(); ++ph2) {
                const double w_ph = inst_.hyd.prob(ph, ph2);
                if (w_ph == 0.0) continue;
                double acc_ph = 0.0;
                for (int y = 0; y < inst_.prod.levels; ++y) {
                    const double w_y = inst_.prod.at(tau, y);
                    if (w_y == 0.0) continue;
                    const State s{tau, pe2, ph2, y, inv, v};
                    acc_ph += w_y * best(s).second;
                }
                acc_pe += w_ph * acc_ph;
            }
            total += w_pe * acc_pe;
        }
        memo_.emplace(key, total);
        return total;
    }

    /// Optimal (decision, value) at a pre-decision state; ties broken by
    /// (h2, sell, ppa, buy) ascending, like greedy_action.
    std::pair<Decision, double> best(const State& s) {
        double best_value = -std::numeric_limits<double>::infinity();
        Decision best_decision;
        bool have = false;
        auto tuple_of = [](const Decision& d) { return std::array<double, 4>{d.h2, d.sell, d.ppa, d.buy}; };
        for_each_feasible(s, inst_.params, inst_.policy, [&](const Decision& d, const DerivedFlows&) {
            const RewardBreakdown r =
                reward_unchecked(s, d, inst_.params, inst_.policy, inst_.elec, inst_.hyd);
            const PostDecisionState post = transition_deterministic(s, d, inst_.params);
            const double val = r.total + value(post.t, post.pe_idx, post.ph_idx, post.inventory, post.ppa_due);
            if (!have || val > best_value ||
                (val == best_value && tuple_of(d) < tuple_of(best_decision))) {
                best_value = val;
                best_decision = d;
                have = true;
            }
        });
        return {best_decision, best_value};
    }

private:
    struct Key {
        int t, pe, ph, inv_idx, v;
        auto operator<=>(const Key&) const = default;
    };
    const Instance& inst_;
    std::map<Key, double> memo_;
};

} // namespace ghp::test
