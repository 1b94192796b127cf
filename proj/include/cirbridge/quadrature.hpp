#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <type_traits>

#include "cirbridge/error.hpp"

namespace cirb {

struct SimpsonOptions {
    double abs_tol = 1e-12;
    /// Tightens the tolerance to rel_tol * |coarse estimate| for small integrals.
    double rel_tol = 1e-12;
    int max_depth = 40;
    /// Panels are always split this many times before the error test applies.
    int min_depth = 4;
};

namespace detail {

template <typename Scalar, typename F> struct SimpsonState {
    F &f;
    int max_depth;
    int min_depth;
    bool failed = false;

    Scalar recurse(Scalar lo, Scalar hi, Scalar f_lo, Scalar f_mid, Scalar f_hi, Scalar whole,
                   Scalar tol, int depth) {
        const Scalar mid = (lo + hi) / 2;
        const Scalar lm = (lo + mid) / 2;
        const Scalar mh = (mid + hi) / 2;
        const Scalar f_lm = f(lm);
        const Scalar f_mh = f(mh);
        const Scalar left = (mid - lo) / 6 * (f_lo + 4 * f_lm + f_mid);
        const Scalar right = (hi - mid) / 6 * (f_mid + 4 * f_mh + f_hi);
        const Scalar both = left + right;
        const Scalar delta = both - whole;
        const Scalar roundoff =
            64 * std::numeric_limits<Scalar>::epsilon() * (std::abs(left) + std::abs(right));
        if (depth >= min_depth && (std::abs(delta) <= 15 * tol || std::abs(delta) <= roundoff))
            return both + delta / 15;
        if (depth >= max_depth) {
            failed = true;
            return both + delta / 15;
        }
        return recurse(lo, mid, f_lo, f_lm, f_mid, left, tol / 2, depth + 1) +
               recurse(mid, hi, f_mid, f_mh, f_hi, right, tol / 2, depth + 1);
    }
};

} // namespace detail

/// Adaptive Simpson quadrature of f over [lo, hi] with Richardson correction.
/// Throws NumericError when some panel still misses its tolerance at max depth.
template <typename Scalar, typename F>
Scalar integrate_simpson(F &&f, Scalar lo, Scalar hi, const SimpsonOptions &opts = {}) {
    if (hi == lo) return Scalar(0);
    if (hi < lo) return -integrate_simpson(f, hi, lo, opts);
    const Scalar f_lo = f(lo);
    const Scalar f_hi = f(hi);
    const Scalar f_mid = f((lo + hi) / 2);
    const Scalar whole = (hi - lo) / 6 * (f_lo + 4 * f_mid + f_hi);
    Scalar tol = Scalar(opts.abs_tol);
    if (whole != Scalar(0)) tol = std::min(tol, Scalar(opts.rel_tol) * std::abs(whole));
    detail::SimpsonState<Scalar, std::remove_reference_t<F>> state{f, opts.max_depth, opts.min_depth};
    const Scalar result = state.recurse(lo, hi, f_lo, f_mid, f_hi, whole, tol, 0);
    if (state.failed || !std::isfinite(static_cast<double>(result))) {
        std::ostringstream os;
        os << "adaptive Simpson failed to converge on [" << lo << ", " << hi
           << "] (last estimate " << result << ")";
        throw NumericError(os.str());
    }
    return result;
}

} // namespace cirb
