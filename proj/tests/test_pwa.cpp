#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ecoplus/dynamics.hpp"
#include "ecoplus/pwa.hpp"

#include <cmath>

using namespace ecoplus;

namespace {

ResistanceCoefficients cpem_flat() { return derive_resistance_coefficients(CpemParams{}, RoadSpec{}); }
ResistanceCoefficients kmmk_flat() { return derive_resistance_coefficients(KmmkParams{}, RoadSpec{}); }

double brute_force_max_error(const PwaSegments& seg, const ResistanceCoefficients& coeffs, int samples) {
    double worst = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double v = seg.v_max * i / samples;
        worst = std::max(worst, pwa_eval(seg, v) - coeffs.eval(v));
    }
    return worst;
}

} // namespace

TEST_CASE("secants of v^2 on [0,2] with two segments") {
    const ResistanceCoefficients square{0.0, 0.0, 1.0};
    const PwaSegments seg = build_pwa(square, 2.0, 2);
    CHECK(seg.b1[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(seg.b2[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(seg.b1[1] == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(seg.b2[1] == doctest::Approx(-2.0).epsilon(1e-15));
    // Pointwise max between the knots over-estimates the quadratic.
    CHECK(pwa_eval(seg, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(pwa_eval(seg, 0.5) >= 0.25);
    CHECK(pwa_eval(seg, 2.0) == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("single-segment secant of v^2 on [0,2] peaks at the midpoint") {
    const ResistanceCoefficients square{0.0, 0.0, 1.0};
    const PwaSegments seg = build_pwa(square, 2.0, 1);
    // Dense-grid brute force: max of 2v - v^2 is 1 at v = 1.
    double worst = 0.0, at = 0.0;
    for (int i = 0; i <= 200000; ++i) {
        const double v = 2.0 * i / 200000.0;
        const double err = pwa_eval(seg, v) - v * v;
        if (err > worst) {
            worst = err;
            at = v;
        }
    }
    CHECK(worst == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(at == doctest::Approx(1.0).epsilon(1e-4));
    const PwaErrorReport rep = approximation_error_report(seg, square, 100001);
    CHECK(rep.max_abs_error == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("an affine resistive term is reproduced exactly") {
    const ResistanceCoefficients affine{0.1, 0.01, 1e-15};
    const PwaSegments seg = build_pwa(affine, 15.0, 4);
    const PwaErrorReport rep = approximation_error_report(seg, affine, 5001);
    CHECK(rep.max_abs_error <= 1e-12);
}

TEST_CASE("knot values interpolate the quadratic exactly") {
    const PwaSegments seg = build_pwa(cpem_flat(), 15.0, 5);
    const ResistanceCoefficients coeffs = cpem_flat();
    for (int k = 0; k <= 5; ++k) {
        const double v = 3.0 * k;
        CHECK(std::abs(pwa_eval(seg, v) - coeffs.eval(v)) <= 1e-12);
    }
}

TEST_CASE("fine approximation drives the relative error below 1e-4") {
    const ResistanceCoefficients coeffs = cpem_flat();
    const PwaSegments seg = build_pwa(coeffs, 15.0, 500);
    const PwaErrorReport rep = approximation_error_report(seg, coeffs, 20001);
    CHECK(rep.max_relative_error < 1e-4);
}

TEST_CASE("segment count below one is rejected") {
    CHECK_THROWS_AS(build_pwa(cpem_flat(), 15.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(build_pwa(ResistanceCoefficients{0.1, 0.0, 0.0}, 15.0, 5), std::invalid_argument);
    const PwaSegments seg = build_pwa(cpem_flat(), 15.0, 5);
    CHECK_THROWS_AS(pwa_eval(seg, -0.5), std::invalid_argument);
    CHECK_THROWS_AS(pwa_eval(seg, 15.5), std::invalid_argument);
}

TEST_CASE("pwa invariants hold on dense grids for both models") {
    for (const ResistanceCoefficients& coeffs : {cpem_flat(), kmmk_flat()}) {
        for (int k : {1, 2, 5, 16, 50}) {
            const PwaSegments seg = build_pwa(coeffs, 15.0, k);
            // Over-approximation everywhere.
            for (int i = 0; i <= 10000; ++i) {
                const double v = 15.0 * i / 10000.0;
                CHECK(pwa_eval(seg, v) - coeffs.eval(v) >= -1e-12);
            }
            // Exactness at the knots.
            for (int j = 0; j <= k; ++j) {
                const double v = seg.dv * j;
                CHECK(std::abs(pwa_eval(seg, std::min(v, seg.v_max)) - coeffs.eval(v)) <= 1e-12);
            }
            // Continuity across shared knots.
            for (int j = 1; j < k; ++j) {
                const double v = seg.dv * j;
                const double left = seg.b1[j - 1] * v + seg.b2[j - 1];
                const double right = seg.b1[j] * v + seg.b2[j];
                CHECK(std::abs(left - right) <= 1e-12);
            }
            // Slopes of secants of a strictly convex quadratic increase.
            for (int j = 1; j < k; ++j) CHECK(seg.b1[j] > seg.b1[j - 1]);
            // Refinement is monotone.
            const PwaSegments finer = build_pwa(coeffs, 15.0, 2 * k);
            CHECK(brute_force_max_error(finer, coeffs, 4000) <=
                  brute_force_max_error(seg, coeffs, 4000) + 1e-15);
        }
    }
}
