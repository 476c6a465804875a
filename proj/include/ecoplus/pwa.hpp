#ifndef ECOPLUS_PWA_HPP
#define ECOPLUS_PWA_HPP

#include "ecoplus/types.hpp"

namespace ecoplus {

/// K-segment secant over-approximation of the convex resistive term
/// a_r(v) on [0, v_max]. Segment k covers [(k-1) dv, k dv] with the affine
/// function b1[k] v + b2[k]; the pointwise max of all segments equals the
/// piecewise-linear interpolant through the K+1 knots, so it never
/// under-estimates a_r.
struct PwaSegments {
    int segments = 0;            ///< K
    double dv = 0.0;             ///< knot spacing v_max / K
    double v_max = 0.0;
    std::vector<double> b1;      ///< slopes [1/s]
    std::vector<double> b2;      ///< intercepts [m/s^2]
};

/// Per-sample record of the approximation error pwa_eval(v) - a_r(v).
struct PwaErrorSample {
    double v = 0.0;
    double error = 0.0;
    double relative = 0.0;
};

struct PwaErrorReport {
    double max_abs_error = 0.0;
    double max_relative_error = 0.0;
    std::vector<PwaErrorSample> samples;
};

/// Builds the secant coefficients through adjacent knot evaluations of a_r.
PwaSegments build_pwa(const ResistanceCoefficients& coeffs, double v_max, int segments);

/// max_k (b1[k] v + b2[k]); v must lie in [0, v_max].
double pwa_eval(const PwaSegments& seg, double v);

/// Samples the over-approximation gap on a uniform grid.
PwaErrorReport approximation_error_report(const PwaSegments& seg, const ResistanceCoefficients& coeffs,
                                          int samples);

} // namespace ecoplus

#endif // ECOPLUS_PWA_HPP
