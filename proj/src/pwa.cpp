#include "ecoplus/pwa.hpp"

#include <algorithm>
#include <cmath>

namespace ecoplus {

PwaSegments build_pwa(const ResistanceCoefficients& coeffs, double v_max, int segments) {
    if (segments < 1) throw std::invalid_argument("pwa segment count must be at least 1");
    if (!(v_max > 0.0)) throw std::invalid_argument("pwa domain upper limit must be positive");
    if (!(coeffs.d3 > 0.0)) throw std::invalid_argument("pwa requires d3 > 0");
    PwaSegments seg;
    seg.segments = segments;
    seg.v_max = v_max;
    seg.dv = v_max / segments;
    seg.b1.resize(segments);
    seg.b2.resize(segments);
    for (int k = 1; k <= segments; ++k) {
        const double v_lo = (k - 1) * seg.dv;
        const double v_hi = k * seg.dv;
        const double slope = (coeffs.eval(v_hi) - coeffs.eval(v_lo)) / seg.dv;
        seg.b1[k - 1] = slope;
        seg.b2[k - 1] = coeffs.eval(v_lo) - slope * v_lo;
    }
    return seg;
}

double pwa_eval(const PwaSegments& seg, double v) {
    if (v < 0.0 || v > seg.v_max * (1.0 + 1e-12) + 1e-12)
        throw std::invalid_argument("pwa_eval: velocity outside [0, v_max]");
    // Secant slopes of a convex quadratic increase with k, so the pointwise
    // max over segments is attained by the segment containing v.
    const int k = std::clamp(static_cast<int>(v / seg.dv), 0, seg.segments - 1);
    return seg.b1[k] * v + seg.b2[k];
}

PwaErrorReport approximation_error_report(const PwaSegments& seg, const ResistanceCoefficients& coeffs,
                                          int samples) {
    if (samples < 2) throw std::invalid_argument("error report needs at least 2 samples");
    PwaErrorReport rep;
    rep.samples.reserve(samples);
    for (int i = 0; i < samples; ++i) {
        const double v = seg.v_max * i / (samples - 1);
        const double truth = coeffs.eval(v);
        const double err = pwa_eval(seg, v) - truth;
        PwaErrorSample s;
        s.v = v;
        s.error = err;
        s.relative = truth != 0.0 ? std::abs(err / truth) : std::abs(err);
        rep.samples.push_back(s);
        rep.max_abs_error = std::max(rep.max_abs_error, std::abs(err));
        rep.max_relative_error = std::max(rep.max_relative_error, s.relative);
    }
    return rep;
}

} // namespace ecoplus
