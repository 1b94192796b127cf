#pragma once

#include <cmath>
#include <sstream>

#include "cirbridge/error.hpp"
#include "cirbridge/rng.hpp"

namespace cirb {

/// Inverse Gaussian law with density sqrt(v / (2 pi x^3)) exp(-v (x - u)^2 / (2 u^2 x)),
/// mean u and variance u^3 / v.
struct IgParams {
    double mean;  // u
    double shape; // v
};

/// Draw from IG(mean, mean / ratio), parameterized by ratio = mean / shape so
/// that shape may overflow without harm. ratio == 0 is the point mass at mean.
///
/// Transformation method with one chi-square(1) and one uniform draw: the
/// smaller root x of the quadratic is returned with probability mean / (mean + x),
/// otherwise mean^2 / x.
inline double sample_ig_ratio(double mean, double ratio, PathRng &rng) {
    const double y = [&] {
        const double n = rng.gaussian();
        return n * n;
    }();
    if (ratio == 0.0 || y == 0.0) {
        rng.uniform(); // keep the draw count per call fixed
        return mean;
    }
    const double w = 0.5 * ratio * y;
    // mean * (1 + w - sqrt(w (w + 2))), written without cancellation
    const double spread = 1.0 + w + std::sqrt(w * (w + 2.0));
    const double x = mean / spread;
    const double u = rng.uniform();
    if (u * (mean + x) <= mean) return x;
    return mean * spread; // mean^2 / x
}

inline double sample_ig(const IgParams &p, PathRng &rng) {
    if (!(p.mean > 0.0) || !(p.shape > 0.0)) {
        std::ostringstream os;
        os << "inverse Gaussian needs positive mean and shape, got (" << p.mean << ", "
           << p.shape << ")";
        throw DomainError(os.str());
    }
    return sample_ig_ratio(p.mean, p.mean / p.shape, rng);
}

} // namespace cirb
