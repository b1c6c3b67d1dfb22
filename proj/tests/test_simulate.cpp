#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ghp/report_io.hpp"
#include "ghp/simulate.hpp"
#include "support/helpers.hpp"

using namespace ghp;

namespace {

/// Small but non-trivial fixture: weekly PPA, seeded three-level production.
Instance quick_instance(HydrogenPolicy policy, int horizon = 14) {
    RunConfig cfg = ghp::test::small_config();
    cfg.system.horizon_days = horizon;
    cfg.system.ppa_interval = 7;
    cfg.system.ppa_target = 1;
    cfg.system.cap_transmission = 3;
    cfg.system.cap_electrolyzer = 3;
    cfg.system.cap_fuelcell = 3;
    cfg.system.cap_h2_sale = 3;
    cfg.system.storage_capacity = 4.0;
    cfg.grids.elec_levels = 3;
    cfg.grids.hyd_levels = 3;
    cfg.policy = policy;
    Instance inst = build_instance(cfg);
    ghp::test::set_production(inst, {0.3, 0.4, 0.3});
    return inst;
}

} // namespace

TEST_CASE("idle plant with zero penalty earns exactly zero") {
    RunConfig cfg = ghp::test::small_config();
    cfg.system.horizon_days = 10;
    cfg.system.ppa_interval = 5;
    cfg.system.shortage_penalty = 0.0;
    cfg.policy = NoStorage{};
    Instance inst = build_instance(cfg);
    ghp::test::set_production(inst, {1.0}); // no production ever
    const ValueTable table = backward_induction(inst);
    SimOptions opts;
    opts.replications = 20;
    const KpiReport kpi = simulate(inst, table, opts);
    CHECK(kpi.profit.mean == 0.0);
    CHECK(kpi.energy_lost_mwh == 0.0);
    CHECK(kpi.curtailed_mwh == 0.0);
    CHECK(kpi.h2_sold_mwh == 0.0);
}

TEST_CASE("simulated mean converges to the table value") {
    Instance inst = quick_instance(FreeEveryPeriod{}, 21);
    const ValueTable table = backward_induction(inst);
    SimOptions opts;
    opts.replications = 10'000;
    opts.seed = 99;
    const KpiReport kpi = simulate(inst, table, opts);
    CHECK(std::abs(kpi.profit.mean - kpi.value_at_start) <= kpi.profit.ci95_half);
}

TEST_CASE("same seed reproduces the report bit for bit") {
    Instance inst = quick_instance(FreePeriodic{7});
    const ValueTable table = backward_induction(inst);
    SimOptions opts;
    opts.replications = 200;
    opts.seed = 1234;
    const KpiReport a = simulate(inst, table, opts);
    const KpiReport b = simulate(inst, table, opts);
    CHECK(kpi_to_json(a) == kpi_to_json(b));
    CHECK(a.profit.mean == b.profit.mean);
    CHECK(a.heatmap.prob == b.heatmap.prob);

    SimOptions two = opts;
    two.workers = 2; // worker split must not change anything
    const KpiReport c = simulate(inst, table, two);
    CHECK(kpi_to_json(a) == kpi_to_json(c));
    CHECK(a.heatmap.prob == c.heatmap.prob);

    SimOptions other = opts;
    other.seed = 4321;
    const KpiReport d = simulate(inst, table, other);
    CHECK(a.profit.mean != d.profit.mean);
}

TEST_CASE("profit decomposition sums to the total") {
    Instance inst = quick_instance(FreeEveryPeriod{});
    const ValueTable table = backward_induction(inst);
    SimOptions opts;
    opts.replications = 500;
    opts.seed = 7;
    const KpiReport kpi = simulate(inst, table, opts);
    CHECK(kpi.profit.mean ==
          doctest::Approx(kpi.profit_hydrogen.mean + kpi.profit_ppa.mean + kpi.profit_market.mean)
              .epsilon(1e-9));
    CHECK(kpi.p_h2_sale >= 0.0);
    CHECK(kpi.p_h2_sale <= 1.0);
    CHECK(kpi.p_sell <= 1.0);
    CHECK(kpi.p_buy <= 1.0);
    CHECK(kpi.p_ppa_delivery <= 1.0);
}

TEST_CASE("energy loss accounting") {
    SystemParams p;
    p.unit_mwh = 5.7;

    SUBCASE("lossless system books nothing") {
        Trace trace(3);
        for (auto& rec : trace) rec.flows.loss_mwh = 0.0; // alpha = 1 per period
        CHECK(energy_loss_accounting(trace, p) == 0.0);
    }
    SUBCASE("single stored unit at alpha 0.5") {
        Trace trace(1);
        trace[0].flows.x_in = 1.0;
        trace[0].flows.loss_mwh = 1.0 * (1.0 - 0.5) / 0.5 * 5.7;
        CHECK(energy_loss_accounting(trace, p) == doctest::Approx(5.7));
    }
    SUBCASE("no-storage trace books nothing") {
        Instance inst = quick_instance(NoStorage{});
        const ValueTable table = backward_induction(inst);
        SimOptions opts;
        opts.replications = 50;
        opts.trace_reps = 50;
        std::vector<Trace> traces;
        const KpiReport kpi = simulate(inst, table, opts, &traces);
        CHECK(kpi.energy_lost_mwh == 0.0);
        for (const auto& trace : traces) CHECK(energy_loss_accounting(trace, inst.params) == 0.0);
    }
}

TEST_CASE("heatmap from a deterministic single trace is a point mass") {
    Instance inst = quick_instance(FreeEveryPeriod{});
    const ValueTable table = backward_induction(inst);
    SimOptions opts;
    opts.replications = 1;
    opts.trace_reps = 1;
    opts.seed = 3;
    std::vector<Trace> traces;
    const KpiReport kpi = simulate(inst, table, opts, &traces);
    REQUIRE(traces.size() == 1);
    const HeatmapData h = inventory_heatmap(traces, inst.grid, inst.params.horizon_days);
    for (int t = 0; t < h.periods; ++t) {
        double sum = 0.0;
        int occupied = 0;
        for (int i = 0; i < inst.grid.points; ++i) {
            const double pr = h.prob[static_cast<std::size_t>(t) * inst.grid.points + i];
            sum += pr;
            if (pr > 0) ++occupied;
        }
        CHECK(sum == doctest::Approx(1.0));
        CHECK(occupied == 1);
        CHECK(kpi.heatmap.prob[static_cast<std::size_t>(t) * inst.grid.points +
                               inst.grid.index_of(traces[0][t].inventory_end)] == doctest::Approx(1.0));
    }
    // first-period distribution sits at the post-decision inventory of the
    // first greedy action
    CHECK(h.mean_inventory[0] == doctest::Approx(traces[0][0].inventory_end));
}

TEST_CASE("periodic sale policies cap the sale-day frequency") {
    Instance inst = quick_instance(FreePeriodic{7}, 28);
    const ValueTable table = backward_induction(inst);
    SimOptions opts;
    opts.replications = 300;
    opts.seed = 11;
    const KpiReport kpi = simulate(inst, table, opts);
    CHECK(kpi.p_h2_sale <= 1.0 / 7.0 + 1e-9);
}

TEST_CASE("fixed contracts rarely fall short when achievable") {
    RunConfig cfg = ghp::test::small_config();
    cfg.system.horizon_days = 28;
    cfg.system.ppa_interval = 7;
    cfg.system.ppa_target = 1;
    cfg.system.cap_transmission = 3;
    cfg.system.cap_electrolyzer = 3;
    cfg.system.cap_fuelcell = 3;
    cfg.system.cap_h2_sale = 3;
    cfg.system.storage_capacity = 6.0;
    cfg.grids.elec_levels = 3;
    cfg.grids.hyd_levels = 1;
    cfg.policy = FixedContract{7, 35.0, 2.0};
    Instance inst = build_instance(cfg);
    ghp::test::set_production(inst, {0.2, 0.5, 0.3});
    const ValueTable table = backward_induction(inst);
    SimOptions opts;
    opts.replications = 500;
    opts.seed = 21;
    opts.trace_reps = 500;
    std::vector<Trace> traces;
    simulate(inst, table, opts, &traces);
    std::int64_t due = 0, shortfalls = 0;
    for (const auto& trace : traces) {
        for (const auto& rec : trace) {
            if (rec.t % 7 == 0) {
                ++due;
                if (rec.decision.h2 < 2.0 - 1e-9) ++shortfalls;
            }
        }
    }
    CHECK(due == 500 * 4);
    CHECK(static_cast<double>(shortfalls) / due < 0.01);
}

TEST_CASE("confidence width shrinks like one over root replications") {
    Instance inst = quick_instance(FreeEveryPeriod{});
    const ValueTable table = backward_induction(inst);
    SimOptions small_opts;
    small_opts.replications = 500;
    small_opts.seed = 31;
    SimOptions big_opts;
    big_opts.replications = 2000;
    big_opts.seed = 31;
    const KpiReport small_kpi = simulate(inst, table, small_opts);
    const KpiReport big_kpi = simulate(inst, table, big_opts);
    const double ratio = small_kpi.profit.ci95_half / big_kpi.profit.ci95_half;
    CHECK(ratio > 1.6);
    CHECK(ratio < 2.6);
}

TEST_CASE("chained years reset the obligation and carry inventory") {
    Instance inst = quick_instance(FreeEveryPeriod{});
    const ValueTable table = backward_induction(inst);
    SimOptions opts;
    opts.replications = 4;
    opts.years = 3;
    opts.trace_reps = 4;
    opts.seed = 17;
    std::vector<Trace> traces;
    const KpiReport kpi = simulate(inst, table, opts, &traces);
    CHECK(kpi.years == 3);
    const int T = inst.params.horizon_days;
    for (const auto& trace : traces) {
        REQUIRE(static_cast<int>(trace.size()) == 3 * T);
        CHECK(trace[T].ppa_due == inst.params.ppa_target);
        CHECK(trace[T].inventory_start == doctest::Approx(trace[T - 1].inventory_end));
        CHECK(trace[2 * T].ppa_due == inst.params.ppa_target);
    }
}

TEST_CASE("simulation rejects invalid options and mismatched tables") {
    Instance inst = quick_instance(FreeEveryPeriod{});
    const ValueTable table = backward_induction(inst);
    SimOptions opts;
    opts.replications = 0;
    CHECK_THROWS_AS(simulate(inst, table, opts), std::invalid_argument);
    opts.replications = 1;
    Instance other = inst;
    other.hash ^= 1;
    CHECK_THROWS_AS(simulate(other, table, opts), std::runtime_error);
}
