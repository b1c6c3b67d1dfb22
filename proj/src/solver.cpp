#include "ghp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "ghp/parallel.hpp"

namespace ghp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kEps = 1e-9;

bool grid_aligned(double quantity, double resolution) {
    const double steps = quantity / resolution;
    return std::abs(steps - std::round(steps)) < 1e-9;
}

int ceil_div(int a, int b) { return (a + b - 1) / b; }

} // namespace

ValueTable::ValueTable(int horizon_days, int elec_levels, int hyd_levels, int v_levels, int inv_points,
                       std::uint64_t config_hash)
    : horizon_(horizon_days),
      elec_levels_(elec_levels),
      hyd_levels_(hyd_levels),
      v_levels_(v_levels),
      inv_points_(inv_points),
      slice_size_(static_cast<std::size_t>(elec_levels) * hyd_levels * v_levels * inv_points),
      config_hash_(config_hash),
      data_(static_cast<std::size_t>(horizon_days + 1) * slice_size_, 0.0) {}

double ValueTable::interp(int t, int pe, int ph, int v, double inventory, double resolution) const {
    double pos = inventory / resolution;
    if (pos < 0.0) pos = 0.0;
    const double top = static_cast<double>(inv_points_ - 1);
    if (pos > top) pos = top;
    int lo = static_cast<int>(std::floor(pos + 1e-9));
    if (lo > inv_points_ - 1) lo = inv_points_ - 1;
    const double frac = pos - lo;
    const double v_lo = at(t, pe, ph, v, lo);
    if (frac < 1e-9 || lo == inv_points_ - 1) return v_lo;
    return v_lo + frac * (at(t, pe, ph, v, lo + 1) - v_lo);
}

namespace {
constexpr char kTableMagic[8] = {'G', 'H', 'P', 'V', 'T', 'B', 'L', '1'};
}

void ValueTable::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write value table: " + path);
    out.write(kTableMagic, sizeof(kTableMagic));
    const std::uint32_t version = 1;
    auto put = [&](const void* ptr, std::size_t n) { out.write(static_cast<const char*>(ptr), n); };
    put(&version, sizeof(version));
    put(&config_hash_, sizeof(config_hash_));
    const std::int32_t dims[5] = {horizon_, elec_levels_, hyd_levels_, v_levels_, inv_points_};
    put(dims, sizeof(dims));
    put(data_.data(), data_.size() * sizeof(double));
    if (!out) throw std::runtime_error("failed while writing value table: " + path);
}

ValueTable ValueTable::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open value table: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kTableMagic, sizeof(magic)) != 0)
        throw std::runtime_error("not a value-table file: " + path);
    std::uint32_t version = 0;
    in.read(reinterpret_cast<char*>(&version), sizeof(version));
    if (version != 1) throw std::runtime_error("unsupported value-table version in " + path);
    std::uint64_t hash = 0;
    in.read(reinterpret_cast<char*>(&hash), sizeof(hash));
    std::int32_t dims[5];
    in.read(reinterpret_cast<char*>(dims), sizeof(dims));
    if (!in) throw std::runtime_error("truncated value table: " + path);
    ValueTable table(dims[0], dims[1], dims[2], dims[3], dims[4], hash);
    in.read(reinterpret_cast<char*>(table.data_.data()),
            static_cast<std::streamsize>(table.data_.size() * sizeof(double)));
    if (!in) throw std::runtime_error("truncated value table: " + path);
    return table;
}

namespace {

/// One backup step's shared inputs.
struct BackupContext {
    const Instance* inst;
    int tau;            // deciding period, 1-based
    bool deadline;
    SaleMode mode;
    double fixed_price = 0.0;
    double fixed_quantity = 0.0;
    const double* v_next; // slice tau of the table
    double* wy;           // slice-sized accumulator: E_y max(...) per (peN, phN, v, i)
    int kh_int;           // integer gas-sale cap for free sales
};

/// Backup over one (next-period electricity, next-period hydrogen) price
/// pair using constant-offset scans along the inventory axis. Exact when
/// every flow lands on the grid (checked by the caller).
class FastBackup {
public:
    FastBackup(const BackupContext& ctx, int pe_next, int ph_next)
        : ctx_(ctx),
          inst_(*ctx.inst),
          p_(inst_.params),
          ni_(inst_.grid.points),
          nv_(p_.ppa_target + 1),
          res_(inst_.grid.resolution),
          spu_(inst_.grid.steps_per_unit()),
          pe_(pe_next),
          ph_(ph_next),
          pe_price_(inst_.elec.levels[pe_next]),
          alpha_(p_.round_trip()),
          unit_(p_.unit_mwh) {
        // Market gas sales are paid on the full gas content of a stored unit
        // (losses were booked at electrolysis); contract sales use the
        // quoted price as-is.
        ph_unit_price_ =
            ctx.mode == SaleMode::Free ? inst_.hyd.levels[ph_next] * unit_ / p_.eff_fuelcell : 0.0;
        c_rows_.resize(nv_);
        for (int v = 0; v < nv_; ++v) {
            const std::size_t off =
                ((static_cast<std::size_t>(pe_) * inst_.hyd.size() + ph_) * nv_ + v) * ni_;
            c_rows_[v] = ctx.v_next + off;
        }
        build_sale_rows();
        w_.assign(static_cast<std::size_t>(nv_) * ni_, kNegInf);
    }

    /// max over feasible decisions of reward + continuation for every
    /// (v, inventory) cell at production level y.
    void run_production_level(int y) {
        std::fill(w_.begin(), w_.end(), kNegInf);
        const int kc = static_cast<int>(std::floor(p_.cap_transmission + kEps));
        const bool allow_buy = policy_allows_buy(inst_.policy);
        const int alpha_steps = static_cast<int>(std::lround(alpha_ * spu_));

        for (int v = 0; v < nv_; ++v) {
            double* w_row = w_.data() + static_cast<std::size_t>(v) * ni_;
            const int ppa_max = std::min(v, kc);
            for (int ppa = 0; ppa <= ppa_max; ++ppa) {
                const int vstar = ctx_.deadline ? p_.ppa_target : v - ppa;
                double base_ppa = p_.ppa_price * unit_ * ppa;
                if (ctx_.deadline) base_ppa -= p_.shortage_penalty * unit_ * (v - ppa);

                // Sell branch (covers the no-trade case at sell = 0).
                for (int sell = 0; sell + ppa <= kc; ++sell) {
                    const int sp = sell + ppa;
                    const double x_out = std::max(0, sp - y);
                    if (x_out > p_.cap_fuelcell + kEps) break;
                    const double m = std::min(alpha_ * std::max(0, y - sp), p_.cap_electrolyzer);
                    scan(w_row, vstar, m, x_out, pe_price_ * unit_ * sell + base_ppa, ni_ - 1);
                }
                if (!allow_buy) continue;
                const double x_out_buy = std::max(0, ppa - y);
                if (x_out_buy > p_.cap_fuelcell + kEps) continue;
                const double raw_base = std::max(0, y - ppa);
                for (int buy = 1; buy <= kc; ++buy) {
                    const int i_hi = ni_ - 1 - buy * alpha_steps; // buy <= (Q - I)/alpha
                    if (i_hi < 0) break;
                    const double m = std::min(alpha_ * (buy + raw_base), p_.cap_electrolyzer);
                    scan(w_row, vstar, m, x_out_buy,
                         -(pe_price_ + p_.buy_premium) * unit_ * buy + base_ppa, i_hi);
                }
            }
        }
    }

    /// wy += prob * W for this task's block.
    void accumulate(double prob, double* wy_block) const {
        const std::size_t n = w_.size();
        for (std::size_t k = 0; k < n; ++k) wy_block[k] += prob * w_[k];
    }

private:
    // Value of the optimal gas sale as a function of pre-sale tank content
    // (one row per post-decision obligation level).
    void build_sale_rows() {
        if (ctx_.mode == SaleMode::Zero) {
            g_rows_ = c_rows_;
            return;
        }
        g_store_.resize(static_cast<std::size_t>(nv_) * ni_);
        g_rows_.resize(nv_);
        for (int v = 0; v < nv_; ++v) {
            const double* c = c_rows_[v];
            double* g = g_store_.data() + static_cast<std::size_t>(v) * ni_;
            g_rows_[v] = g;
            if (ctx_.mode == SaleMode::Free) {
                for (int i = 0; i < ni_; ++i) {
                    const int h_max = std::min(ctx_.kh_int, i / spu_);
                    double best = c[i];
                    for (int h = 1; h <= h_max; ++h) {
                        const double cand = ph_unit_price_ * h + c[i - h * spu_];
                        if (cand > best) best = cand;
                    }
                    g[i] = best;
                }
            } else { // Fixed contract due this period
                for (int i = 0; i < ni_; ++i) {
                    const double avail = i * res_;
                    const double h2 = std::min({ctx_.fixed_quantity, p_.cap_h2_sale, avail});
                    const double shortfall = std::max(0.0, ctx_.fixed_quantity - h2);
                    const int idx = i - static_cast<int>(std::lround(h2 / res_));
                    g[i] = ctx_.fixed_price * unit_ / p_.eff_fuelcell * h2 -
                           p_.shortage_penalty * unit_ * shortfall + c[idx];
                }
            }
        }
    }

    static double max_of(double a, double b) { return a > b ? a : b; }

    /// For each start inventory i, the candidate value of this market combo:
    /// base_reward plus the optimal-gas-sale row evaluated at the post-flow
    /// content. Net inflow shifts the lookup by a constant offset; tank
    /// overflow (content past capacity before the same-period sale) gets the
    /// scalar tail treatment.
    void scan(double* w_row, int vstar, double m, double x_out, double base_reward, int i_hi) {
        const int off = static_cast<int>(std::lround((m - x_out) / res_));
        const int i_min = std::max(0, -off);
        const double* g = g_rows_[vstar];
        const double* c = c_rows_[vstar];
        const int hi_unc = std::min(i_hi, ni_ - 1 - off);
        for (int i = i_min; i <= hi_unc; ++i)
            w_row[i] = max_of(w_row[i], base_reward + g[i + off]);

        // Overflow tail: pre-sale content would exceed the tank, so inflow is
        // capped at capacity unless the same-period sale makes room.
        const int tail_lo = std::max(i_min, ni_ - off);
        if (tail_lo > i_hi) return;
        const double c_full = c[ni_ - 1];
        switch (ctx_.mode) {
        case SaleMode::Zero:
            for (int i = tail_lo; i <= i_hi; ++i)
                w_row[i] = max_of(w_row[i], base_reward + c_full);
            break;
        case SaleMode::Free:
            for (int i = tail_lo; i <= i_hi; ++i) {
                const int ipre_steps = i + off; // content if nothing spilled
                const int thr_steps = ipre_steps - (ni_ - 1);
                const int h_lo = ceil_div(thr_steps, spu_);
                // Sales below the threshold leave the tank full.
                const int h_small = std::min(ctx_.kh_int, h_lo - 1);
                double best = base_reward + c_full +
                              (ph_unit_price_ > 0.0 ? ph_unit_price_ * h_small : 0.0);
                // Larger sales make room for the whole inflow.
                const int h_hi = std::min(ctx_.kh_int, ipre_steps / spu_);
                for (int h = h_lo; h <= h_hi; ++h) {
                    const double cand = base_reward + ph_unit_price_ * h + c[ipre_steps - h * spu_];
                    if (cand > best) best = cand;
                }
                w_row[i] = max_of(w_row[i], best);
            }
            break;
        case SaleMode::Fixed:
            for (int i = tail_lo; i <= i_hi; ++i) {
                // Pre-sale content caps at capacity, so the forced quantity is
                // min(contract, sale cap, capacity); the sale then lets part of
                // the remaining surplus in.
                const double cap = (ni_ - 1) * res_;
                const double h2 = std::min({ctx_.fixed_quantity, p_.cap_h2_sale, cap});
                const double shortfall = std::max(0.0, ctx_.fixed_quantity - h2);
                const double base_inv = i * res_ - x_out;
                const double x_in = std::min(m, cap - base_inv + h2);
                const double end_inv = base_inv + x_in - h2;
                const int idx = static_cast<int>(std::lround(end_inv / res_));
                const double cand = base_reward + ctx_.fixed_price * unit_ / p_.eff_fuelcell * h2 -
                                    p_.shortage_penalty * unit_ * shortfall + c[idx];
                w_row[i] = max_of(w_row[i], cand);
            }
            break;
        }
    }

    const BackupContext& ctx_;
    const Instance& inst_;
    const SystemParams& p_;
    int ni_, nv_;
    double res_;
    int spu_;
    int pe_, ph_;
    double pe_price_;
    double alpha_;
    double unit_;
    double ph_unit_price_;
    std::vector<const double*> c_rows_;
    std::vector<const double*> g_rows_;
    std::vector<double> g_store_;
    std::vector<double> w_;
};

} // namespace

ValueTable backward_induction(const Instance& inst, int workers, bool force_generic) {
    const SystemParams& p = inst.params;
    const int T = p.horizon_days;
    const int Le = inst.elec.size();
    const int Lh = inst.hyd.size();
    const int Nv = p.ppa_target + 1;
    const int Ni = inst.grid.points;

    const std::uint64_t cells = static_cast<std::uint64_t>(T + 1) * Le * Lh * Nv * Ni;
    const std::uint64_t bytes = cells * sizeof(double);
    std::uint64_t limit = kDefaultMaxTableBytes;
    if (const char* env = std::getenv("GHP_MAX_TABLE_BYTES")) {
        const std::uint64_t parsed = std::strtoull(env, nullptr, 10);
        if (parsed > 0) limit = parsed;
    }
    if (bytes > limit)
        throw std::runtime_error("value table needs " + std::to_string(cells) + " cells = " +
                                 std::to_string(bytes) + " bytes, above the limit of " +
                                 std::to_string(limit) + " (set GHP_MAX_TABLE_BYTES to raise)");

    ValueTable table(T, Le, Lh, Nv, Ni, inst.hash);

    // The offset-scan backup requires every flow to land on the inventory
    // grid; otherwise fall back to per-cell enumeration with interpolated
    // continuations.
    const double res = inst.grid.resolution;
    bool fast = grid_aligned(p.round_trip(), res) && grid_aligned(p.cap_electrolyzer, res);
    if (const auto* c = std::get_if<FixedContract>(&inst.policy))
        fast = fast && grid_aligned(c->quantity, res) && grid_aligned(p.cap_h2_sale, res);
    if (force_generic) fast = false;

    const std::size_t slice_size = static_cast<std::size_t>(Le) * Lh * Nv * Ni;
    std::vector<double> wy(slice_size);
    std::vector<double> tmp(slice_size);

    BackupContext ctx;
    ctx.inst = &inst;
    ctx.wy = wy.data();
    ctx.kh_int = static_cast<int>(std::floor(p.cap_h2_sale + kEps));

    for (int t = T - 1; t >= 0; --t) {
        ctx.tau = t + 1;
        ctx.deadline = ppa_deadline(ctx.tau, p);
        ctx.mode = sale_mode_at(inst.policy, ctx.tau);
        if (ctx.mode == SaleMode::Fixed) {
            const auto& c = std::get<FixedContract>(inst.policy);
            ctx.fixed_price = c.fixed_price;
            ctx.fixed_quantity = c.quantity;
        }
        ctx.v_next = table.slice(t + 1);
        std::fill(wy.begin(), wy.end(), 0.0);

        const auto prod_row = inst.prod.day_row(ctx.tau);
        const std::size_t tasks = static_cast<std::size_t>(Le) * Lh;

        if (fast) {
            parallel_for(tasks, workers, [&](std::size_t lo, std::size_t hi) {
                for (std::size_t task = lo; task < hi; ++task) {
                    const int pe_next = static_cast<int>(task) / Lh;
                    const int ph_next = static_cast<int>(task) % Lh;
                    FastBackup backup(ctx, pe_next, ph_next);
                    double* wy_block = ctx.wy + task * Nv * Ni;
                    for (int y = 0; y < inst.prod.levels; ++y) {
                        if (prod_row[y] <= 0.0) continue;
                        backup.run_production_level(y);
                        backup.accumulate(prod_row[y], wy_block);
                    }
                }
            });
        } else {
            parallel_for(tasks, workers, [&](std::size_t lo, std::size_t hi) {
                for (std::size_t task = lo; task < hi; ++task) {
                    const int pe_next = static_cast<int>(task) / Lh;
                    const int ph_next = static_cast<int>(task) % Lh;
                    double* wy_block = ctx.wy + task * Nv * Ni;
                    for (int y = 0; y < inst.prod.levels; ++y) {
                        const double prob = prod_row[y];
                        if (prob <= 0.0) continue;
                        for (int v = 0; v < Nv; ++v) {
                            for (int i = 0; i < Ni; ++i) {
                                State s{ctx.tau, pe_next, ph_next, y, inst.grid.value(i), v};
                                double best = kNegInf;
                                for_each_feasible(s, p, inst.policy, [&](const Decision& d, const DerivedFlows& f) {
                                    const RewardBreakdown r =
                                        reward_unchecked(s, d, p, inst.policy, inst.elec, inst.hyd);
                                    const int vstar = ctx.deadline
                                                          ? p.ppa_target
                                                          : v - static_cast<int>(std::lround(d.ppa));
                                    const double end_inv = s.inventory + f.x_in - f.x_out - d.h2;
                                    const double cont =
                                        table.interp(t + 1, pe_next, ph_next, vstar, end_inv, res);
                                    best = std::max(best, r.total + cont);
                                });
                                wy_block[static_cast<std::size_t>(v) * Ni + i] += prob * best;
                            }
                        }
                    }
                }
            });
        }

        // Expectation over next-period prices: contract the hydrogen axis,
        // then the electricity axis.
        std::fill(tmp.begin(), tmp.end(), 0.0);
        const std::size_t block = static_cast<std::size_t>(Nv) * Ni;
        for (int pe_next = 0; pe_next < Le; ++pe_next) {
            for (int ph = 0; ph < Lh; ++ph) {
                double* out = tmp.data() + (static_cast<std::size_t>(pe_next) * Lh + ph) * block;
                for (int ph_next = 0; ph_next < Lh; ++ph_next) {
                    const double w = inst.hyd.prob(ph, ph_next);
                    if (w == 0.0) continue;
                    const double* src = wy.data() + (static_cast<std::size_t>(pe_next) * Lh + ph_next) * block;
                    for (std::size_t k = 0; k < block; ++k) out[k] += w * src[k];
                }
            }
        }
        double* v_t = table.slice(t);
        std::fill(v_t, v_t + slice_size, 0.0);
        for (int pe = 0; pe < Le; ++pe) {
            for (int pe_next = 0; pe_next < Le; ++pe_next) {
                const double w = inst.elec.prob(pe, pe_next);
                if (w == 0.0) continue;
                const double* src = tmp.data() + static_cast<std::size_t>(pe_next) * Lh * block;
                double* out = v_t + static_cast<std::size_t>(pe) * Lh * block;
                for (std::size_t k = 0; k < static_cast<std::size_t>(Lh) * block; ++k) out[k] += w * src[k];
            }
        }
    }
    return table;
}

GreedyResult greedy_action(const ValueTable& table, const State& s, const Instance& inst) {
    if (table.config_hash() != inst.hash)
        throw std::runtime_error("value table does not match the configuration (hash mismatch)");
    const SystemParams& p = inst.params;
    const bool deadline = ppa_deadline(s.t, p);
    GreedyResult best;
    best.value = kNegInf;
    bool have = false;
    auto tuple_of = [](const Decision& d) {
        return std::array<double, 4>{d.h2, d.sell, d.ppa, d.buy};
    };
    for_each_feasible(s, p, inst.policy, [&](const Decision& d, const DerivedFlows& f) {
        const RewardBreakdown r = reward_unchecked(s, d, p, inst.policy, inst.elec, inst.hyd);
        const int vstar = deadline ? p.ppa_target : s.ppa_due - static_cast<int>(std::lround(d.ppa));
        const double end_inv = s.inventory + f.x_in - f.x_out - d.h2;
        const double cont = table.interp(s.t, s.pe_idx, s.ph_idx, vstar, end_inv, inst.grid.resolution);
        const double value = r.total + cont;
        const bool better = !have || value > best.value ||
                            (value == best.value && tuple_of(d) < tuple_of(best.decision));
        if (better) {
            best.decision = d;
            best.flows = f;
            best.reward = r;
            best.value = value;
            have = true;
        }
    });
    if (!have) throw std::runtime_error("greedy_action: no feasible decision (invalid state)");
    return best;
}

} // namespace ghp
