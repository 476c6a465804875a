#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ecoplus/experiments.hpp"

#include <cmath>
#include <sstream>

using namespace ecoplus;

TEST_CASE("unimodality classifier") {
    CHECK(is_unimodal({5.0, 3.0, 1.0, 2.0, 4.0}));
    CHECK(is_unimodal({5.0, 4.0, 3.0}));
    CHECK(is_unimodal({1.0, 2.0, 3.0}));
    CHECK(is_unimodal({1.0, 1.0, 1.0}));
    CHECK_FALSE(is_unimodal({3.0, 1.0, 2.0, 1.5, 3.0}));
    CHECK(is_unimodal({3.0, 1.0, 2.0, 2.0 - 5e-7, 3.0})); // dip below noise
}

TEST_CASE("comfort family tightens the limits") {
    const Config cfg = Config::defaults();
    const ScenarioSpec spec = make_scenario(cfg, ModelKind::Kmmk, ScenarioFamily::Comfort, 8.0, 18.0, nullptr);
    CHECK(spec.limits.j_max == doctest::Approx(kComfortJerkLimit));
    CHECK(spec.limits.j_min == doctest::Approx(-kComfortJerkLimit));
    REQUIRE(spec.limits.a_max.has_value());
    CHECK(*spec.limits.a_max == doctest::Approx(kComfortAccelLimit));
}

TEST_CASE("leading profile hits the scripted anchors") {
    const Config cfg = Config::defaults();
    const Trajectory leader = build_leading_profile(cfg, ModelKind::Cpem);
    const double dt = cfg.experiment.dt;
    auto at = [&](double t) { return leader.v[static_cast<int>(std::lround(t / dt))]; };
    CHECK(at(0.0) == doctest::Approx(6.0));
    CHECK(at(10.5) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(at(10.6) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(at(11.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(at(21.0) == doctest::Approx(8.0).epsilon(1e-7));
    CHECK(at(10.4) > 0.0);
    // Stop is reached exactly at 10.5, not earlier.
    const int i_stop = static_cast<int>(std::lround(10.5 / dt));
    CHECK(leader.v[i_stop - 1] > 0.0);
    // Braking respects the control floor.
    for (int i = 0; i < leader.horizon; ++i) CHECK(leader.u[i] >= cfg.limits.u_min - 1e-9);
    // Position is nondecreasing.
    for (int i = 0; i < leader.horizon; ++i) CHECK(leader.x[i + 1] >= leader.x[i]);
}

TEST_CASE("leader slice shifts by the entry delay and extrapolates") {
    const Config cfg = Config::defaults();
    const Trajectory leader = build_leading_profile(cfg, ModelKind::Cpem);
    const int h = 300;
    const SafetySpec spec = slice_leader(leader, cfg.safety, h, cfg.experiment.dt);
    const int shift = static_cast<int>(std::lround(cfg.safety.entry_delay / cfg.experiment.dt));
    CHECK(spec.leader_x[0] == doctest::Approx(leader.x[shift]));
    CHECK(spec.leader_v[0] == doctest::Approx(leader.v[shift]));
    // Beyond the built profile the leader keeps its final speed.
    const SafetySpec long_slice = slice_leader(leader, cfg.safety, leader.horizon + 50, cfg.experiment.dt);
    const int last = leader.horizon;
    CHECK(long_slice.leader_v.back() == doctest::Approx(leader.v[last]));
    CHECK(long_slice.leader_x.back() > leader.x[last]);
}

TEST_CASE("coarse single-vehicle sweep: dominance, audit, feasibility edge") {
    Config cfg = Config::defaults();
    ExperimentConfig exp;
    exp.family = ScenarioFamily::Single;
    exp.model = ModelKind::Cpem;
    exp.strategies = {StrategyKind::EcoPlus, StrategyKind::VelocityMin};
    exp.tm_step = 1.0; // coarse grid keeps this test fast
    exp.tm_max = 30.0;
    const TradeoffCurve curve = tradeoff_sweep(cfg, exp, 8.0);
    REQUIRE(!curve.records.empty());
    CHECK(curve.feasibility_monotone);

    const auto eco = curve.series(StrategyKind::EcoPlus);
    const auto vm = curve.series(StrategyKind::VelocityMin);
    REQUIRE(eco.size() >= 15);
    REQUIRE(eco.size() == vm.size());
    for (std::size_t i = 0; i < eco.size(); ++i) {
        CHECK(eco[i]->grid_index == vm[i]->grid_index);
        CHECK(eco[i]->consumption <= vm[i]->consumption + 1e-9);
        CHECK(eco[i]->valid);
        CHECK(vm[i]->valid);
        CHECK(eco[i]->max_residual <= 1e-6);
    }

    // The point below the detected minimum feasible time is infeasible.
    const double tm_min = eco.front()->tm;
    const ResistanceCoefficients coeffs = model_coefficients(cfg, ModelKind::Cpem);
    const PwaSegments pwa = build_pwa(coeffs, cfg.limits.v_max, cfg.pwa.segments);
    const ScenarioSpec below =
        make_scenario(cfg, ModelKind::Cpem, ScenarioFamily::Single, 8.0, tm_min - exp.tm_step, nullptr);
    CHECK_FALSE(check_feasible(build_problem(below, StrategyKind::VelocityMin, pwa)));
}

TEST_CASE("sweep csv carries the record schema") {
    Config cfg = Config::defaults();
    ExperimentConfig exp;
    exp.strategies = {StrategyKind::EcoPlus};
    exp.tm_step = 2.0;
    exp.tm_max = 20.0;
    const TradeoffCurve curve = tradeoff_sweep(cfg, exp, 8.0);
    std::ostringstream os;
    write_sweep_csv(os, curve);
    const std::string text = os.str();
    CHECK(text.rfind("tm,strategy,model,consumption,objective,status,solve_ms", 0) == 0);
    CHECK(text.find("ecoplus") != std::string::npos);
    CHECK(text.find("cpem") != std::string::npos);
}

TEST_CASE("run_scenario aggregates comparisons and audits") {
    Config cfg = Config::defaults();
    ExperimentConfig exp;
    exp.strategies = {StrategyKind::EcoPlus, StrategyKind::VelocityMin};
    exp.vd_list = {8.0};
    exp.tm_step = 1.0;
    exp.tm_max = 25.0;
    const ScenarioReport report = run_scenario(cfg, exp);
    REQUIRE(report.by_vd.size() == 1);
    REQUIRE(report.by_vd[0].comparisons.size() == 1);
    const PairComparison& cmp = report.by_vd[0].comparisons[0];
    CHECK(cmp.points > 0);
    CHECK(cmp.dominance_violations == 0);
    CHECK(cmp.avg_rel_diff_pct >= 0.0);
    CHECK(report.audit_failures == 0);
    CHECK(report.worst_residual <= 1e-6);
    std::ostringstream os;
    write_summary(os, report);
    CHECK(os.str().find("avg relative difference") != std::string::npos);
}

TEST_CASE("vm takes the sweep consumption identical to itself") {
    // Degenerate self-comparison sanity: identical strategies differ by 0%.
    Config cfg = Config::defaults();
    ExperimentConfig exp;
    exp.strategies = {StrategyKind::VelocityMin, StrategyKind::VelocityMin};
    exp.tm_step = 2.5;
    exp.tm_max = 20.0;
    const ScenarioReport report = run_scenario(cfg, exp);
    REQUIRE(!report.by_vd.empty());
    REQUIRE(!report.by_vd[0].comparisons.empty());
    CHECK(report.by_vd[0].comparisons[0].avg_rel_diff_pct == doctest::Approx(0.0).epsilon(1e-12));
}
