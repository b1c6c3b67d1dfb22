#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ghp/action.hpp"
#include "ghp/instance.hpp"

namespace ghp {

/// Post-decision value function. Slice t holds the expected optimal
/// reward-to-go after the period-t decision (slice 0 is the start of the
/// horizon, slice T is identically zero), indexed by
/// [t][pe][ph][v][inventory-grid-point].
class ValueTable {
public:
    ValueTable() = default;
    ValueTable(int horizon_days, int elec_levels, int hyd_levels, int v_levels, int inv_points,
               std::uint64_t config_hash);

    double at(int t, int pe, int ph, int v, int i) const { return data_[index(t, pe, ph, v, i)]; }
    double& at(int t, int pe, int ph, int v, int i) { return data_[index(t, pe, ph, v, i)]; }

    /// Continuation value at an arbitrary inventory level: linear
    /// interpolation between the surrounding grid points.
    double interp(int t, int pe, int ph, int v, double inventory, double resolution) const;

    const double* slice(int t) const { return data_.data() + static_cast<std::size_t>(t) * slice_size_; }
    double* slice(int t) { return data_.data() + static_cast<std::size_t>(t) * slice_size_; }

    int horizon() const { return horizon_; }
    int elec_levels() const { return elec_levels_; }
    int hyd_levels() const { return hyd_levels_; }
    int v_levels() const { return v_levels_; }
    int inv_points() const { return inv_points_; }
    std::uint64_t config_hash() const { return config_hash_; }
    std::size_t cells() const { return data_.size(); }
    const std::vector<double>& raw() const { return data_; }

    /// Binary serialization with a header (magic, version, config hash,
    /// dimensions). Loading a file whose hash disagrees with the caller's
    /// expectation is the caller's problem; see load().
    void save(const std::string& path) const;
    static ValueTable load(const std::string& path);

    std::size_t index(int t, int pe, int ph, int v, int i) const {
        return (((static_cast<std::size_t>(t) * elec_levels_ + pe) * hyd_levels_ + ph) * v_levels_ + v) *
                   inv_points_ +
               i;
    }

private:
    int horizon_ = 0;
    int elec_levels_ = 0;
    int hyd_levels_ = 0;
    int v_levels_ = 0;
    int inv_points_ = 0;
    std::size_t slice_size_ = 0;
    std::uint64_t config_hash_ = 0;
    std::vector<double> data_;
};

/// Refuses to allocate tables above this many bytes; overridable through
/// the GHP_MAX_TABLE_BYTES environment variable.
inline constexpr std::uint64_t kDefaultMaxTableBytes = 3ULL << 30;

/// Exact backward dynamic programming over the post-decision lattice.
/// Deterministic for fixed inputs, independent of the worker count.
/// force_generic bypasses the offset-scan fast path (testing hook; the
/// dispatch is otherwise automatic on grid alignment).
ValueTable backward_induction(const Instance& inst, int workers = 1, bool force_generic = false);

struct GreedyResult {
    Decision decision;
    DerivedFlows flows;
    RewardBreakdown reward;
    double value = 0.0; // immediate reward + interpolated continuation
};

/// Argmax of immediate reward plus interpolated continuation over the
/// feasible set; ties broken lexicographically by (h2, sell, ppa, buy)
/// ascending. Throws std::runtime_error when the table's config hash does
/// not match the instance.
GreedyResult greedy_action(const ValueTable& table, const State& s, const Instance& inst);

} // namespace ghp
