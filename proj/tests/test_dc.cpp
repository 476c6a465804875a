#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ecoplus/dc.hpp"
#include "ecoplus/dynamics.hpp"

#include <cmath>

using namespace ecoplus;

namespace {

ScenarioSpec kmmk_scenario(double vd, double tm) {
    ScenarioSpec spec;
    spec.boundary.v0 = 8.0;
    spec.boundary.vd = vd;
    spec.boundary.tm = tm;
    spec.coeffs = derive_resistance_coefficients(KmmkParams{}, RoadSpec{});
    return spec;
}

} // namespace

TEST_CASE("a quadratic target is recovered exactly") {
    const auto rate = [](double v, double a) { return a * a + v; };
    DcOptions opts;
    const QuadraticSurrogate s = fit_surrogate(rate, [](double, double) { return true; }, opts);
    CHECK(s.qaa == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(s.qvv == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(s.qav == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(s.la == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(s.lv == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(s.k == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(s.fit_rms <= 1e-10);
    // Convex target: the concave part of the split is empty.
    for (double entry : s.hess_minus) CHECK(std::abs(entry) <= 1e-12);
}

TEST_CASE("hessian split reconstructs the fitted hessian") {
    const auto rate = [](double v, double a) { return 0.3 * a * a - 0.2 * v * v + 0.9 * a * v + a; };
    DcOptions opts;
    const QuadraticSurrogate s = fit_surrogate(rate, [](double, double) { return true; }, opts);
    const double hvv = 2.0 * s.qvv, hva = s.qav, haa = 2.0 * s.qaa;
    CHECK(std::abs((s.hess_plus[0] - s.hess_minus[0]) - hvv) <= 1e-12);
    CHECK(std::abs((s.hess_plus[1] - s.hess_minus[1]) - hva) <= 1e-12);
    CHECK(std::abs((s.hess_plus[2] - s.hess_minus[2]) - haa) <= 1e-12);
    // Both parts are PSD: nonnegative diagonals and determinants.
    for (const auto& part : {s.hess_plus, s.hess_minus}) {
        CHECK(part[0] >= -1e-12);
        CHECK(part[2] >= -1e-12);
        CHECK(part[0] * part[2] - part[1] * part[1] >= -1e-10);
    }
}

TEST_CASE("degenerate grids are rejected") {
    DcOptions opts;
    opts.grid_v = 5;
    CHECK_THROWS_AS(fit_surrogate([](double, double) { return 0.0; },
                                  [](double, double) { return true; }, opts),
                    std::invalid_argument);
    DcOptions empty;
    CHECK_THROWS_AS(fit_surrogate([](double, double) { return 0.0; },
                                  [](double, double) { return false; }, empty),
                    std::invalid_argument);
}

TEST_CASE("fuel-model fit reports residuals and matches the model sign where it is positive") {
    const KmmkParams params;
    const ResistanceCoefficients coeffs = derive_resistance_coefficients(params, RoadSpec{});
    DcOptions opts;
    const RateFn rate = make_kmmk_rate(params, coeffs, 0.0);
    const IncludeFn mask = positive_control_mask(coeffs, params.u_max);
    const QuadraticSurrogate s = fit_surrogate(rate, mask, opts);
    CHECK(s.fit_points >= 100);
    CHECK(s.fit_rms > 0.0);
    int matches = 0, total = 0;
    for (int iv = 0; iv < opts.grid_v; ++iv)
        for (int ia = 0; ia < opts.grid_a; ++ia) {
            const double v = opts.v_min + (opts.v_max - opts.v_min) * iv / (opts.grid_v - 1);
            const double a = opts.a_min + (opts.a_max - opts.a_min) * ia / (opts.grid_a - 1);
            if (!mask(v, a)) continue;
            ++total;
            if ((s.eval(v, a) > 0.0) == (rate(v, a) > 0.0)) ++matches;
        }
    CHECK(total == s.fit_points);
    CHECK(static_cast<double>(matches) / total >= 0.95);
}

TEST_CASE("ccp on a purely convex surrogate reduces to one quadratic solve") {
    const ScenarioSpec spec = kmmk_scenario(8.0, 14.0);
    const PwaSegments pwa = build_pwa(spec.coeffs, spec.limits.v_max, 5);
    QuadraticSurrogate s;
    s.qaa = 1.0;
    s.qvv = 0.1;
    s.lv = 0.01;
    s.hess_plus = {0.2, 0.0, 2.0};
    s.hess_minus = {0.0, 0.0, 0.0};
    DcOptions opts;
    DcTrace trace;
    const SolutionBundle bundle = dc_solve(spec, s, opts, pwa, {}, &trace);
    REQUIRE(bundle.status == SolveStatus::Optimal);
    CHECK(trace.converged);
    // Initial point plus the single decisive solve (a second iterate may
    // confirm the fixed point but cannot improve it).
    REQUIRE(trace.objectives.size() >= 2);
    const double after_one = trace.objectives[1];
    CHECK(trace.objectives.back() == doctest::Approx(after_one).epsilon(1e-7));

    // The fixed point equals a direct solve of the same convex objective.
    ConvexProgram direct = build_problem(spec, StrategyKind::DcSurrogate, pwa, &s);
    apply_ccp_linearization(direct, s, bundle.trajectory, spec.dt);
    SolveResult res = solve(direct);
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(res.objective == doctest::Approx(bundle.objective).epsilon(1e-6));
}

TEST_CASE("indicated-rate fit over the full box keeps braking states sane") {
    // The planning pipeline fits the fuel surrogate against the indicated
    // rate (zero outside the positive-control window) over the whole
    // operating box, so the quadratic cannot promise negative fuel for hard
    // braking.
    const KmmkParams params;
    const ResistanceCoefficients coeffs = derive_resistance_coefficients(params, RoadSpec{});
    DcOptions opts;
    const RateFn rate = make_kmmk_rate(params, coeffs, 0.0);
    const QuadraticSurrogate s = fit_surrogate(rate, [](double, double) { return true; }, opts);
    double worst = 0.0;
    for (int iv = 0; iv <= 50; ++iv)
        for (int ia = 0; ia <= 50; ++ia) {
            const double v = 15.0 * iv / 50.0;
            const double a = -3.5 + 6.0 * ia / 50.0;
            if (a + coeffs.eval(v) <= 0.0) worst = std::min(worst, s.eval(v, a));
        }
    CHECK(worst > -0.5); // no deep phantom credit in the zero-fuel region
    const IncludeFn window = positive_control_mask(coeffs, params.u_max);
    int match = 0, total = 0;
    for (int iv = 0; iv < 200; ++iv)
        for (int ia = 0; ia < 200; ++ia) {
            const double v = 15.0 * iv / 199.0;
            const double a = -3.5 + 6.0 * ia / 199.0;
            if (!window(v, a)) continue;
            ++total;
            if ((s.eval(v, a) > 0.0) == (rate(v, a) > 0.0)) ++match;
        }
    CHECK(static_cast<double>(match) / total >= 0.95);
}

TEST_CASE("ccp surrogate objective is monotone and the result is feasible") {
    const KmmkParams params;
    const ScenarioSpec spec = kmmk_scenario(8.0, 18.0);
    const PwaSegments pwa = build_pwa(spec.coeffs, spec.limits.v_max, 5);
    DcOptions opts;
    opts.v_max = spec.limits.v_max;
    opts.a_min = spec.limits.u_min;
    opts.a_max = spec.limits.u_max;
    const QuadraticSurrogate s = fit_surrogate(make_kmmk_rate(params, spec.coeffs, 0.0),
                                               [](double, double) { return true; }, opts);
    DcTrace trace;
    const SolutionBundle bundle = dc_solve(spec, s, opts, pwa, {}, &trace);
    REQUIRE(bundle.status == SolveStatus::Optimal);
    REQUIRE(trace.objectives.size() >= 2);
    for (std::size_t i = 1; i < trace.objectives.size(); ++i)
        CHECK(trace.objectives[i] <=
              trace.objectives[i - 1] + 1e-6 * (1.0 + std::abs(trace.objectives[i - 1])));
    const ValidationReport audit = validate_trajectory(bundle.trajectory, spec.boundary, spec.road,
                                                       spec.limits, spec.coeffs, nullptr, 1e-6);
    CHECK(audit.pass);
}
