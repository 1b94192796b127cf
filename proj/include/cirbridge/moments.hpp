// Time-dependent mean, variance and moment-generating function of the bridge.
//
// The mean and variance solve the linear moment ODEs
//     m'(t) = a - h(t) m(t),                 m(0) = 0
//     v'(t) = sigma^2 h(t) m(t) - 2 h(t) v(t),  v(0) = 0
// and have closed forms for both rate families. The quadrature routines
// integrate the variation-of-constants representation directly and serve as
// independent checks of the closed forms.
#pragma once

#include <Eigen/Core>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "cirbridge/bridge.hpp"
#include "cirbridge/error.hpp"
#include "cirbridge/expm1_ratios.hpp"
#include "cirbridge/quadrature.hpp"

namespace cirb {

namespace detail {

template <typename Scalar> void check_unit_closed(Scalar t) {
    if (!(t >= Scalar(0) && t <= Scalar(1))) {
        std::ostringstream os;
        os << "time must lie in [0, 1], got " << t;
        throw DomainError(os.str());
    }
}

/// Mean of the bridge with a = 1.
template <typename Scalar> Scalar unit_mean(const HModel<Scalar> &h, Scalar t) {
    using std::abs;
    using std::log1p;
    using std::pow;
    if (t <= Scalar(0) || t >= Scalar(1)) return Scalar(0);
    const Scalar q = Scalar(1) - t;
    const Scalar L = -log1p(-t); // log(1 / (1 - t))
    if (h.family() == HFamily::Model1) {
        const Scalar r = h.shape();
        const Scalar z = (Scalar(1) - r) * L;
        // (q^r - q) / (1 - r) = q L phi1((1 - r) L); the r -> 1 limit is q L
        if (abs(z) < Scalar(50)) return q * L * phi1(z);
        return (pow(q, r) - q) / (Scalar(1) - r);
    }
    const Scalar eps = h.shape();
    return q / (t + eps) * ((Scalar(1) + eps) * L - t);
}

template <typename Scalar> Scalar model2_variance_bracket(Scalar t, Scalar eps) {
    using std::log1p;
    // (2 + eps - t) log(1/(1-t)) - (2 + eps) t, cancellation-free for small t
    if (t < Scalar(0.25)) {
        Scalar sum = Scalar(0);
        Scalar tk = t;
        for (int k = 2; k < 200; ++k) {
            tk *= t;
            const Scalar term =
                tk * (Scalar(k - 2) + eps * Scalar(k - 1)) / (Scalar(k) * Scalar(k - 1));
            sum += term;
            if (term <= std::numeric_limits<Scalar>::epsilon() * Scalar(1e-3) * sum) break;
        }
        return sum;
    }
    return (Scalar(2) + eps - t) * (-log1p(-t)) - (Scalar(2) + eps) * t;
}

} // namespace detail

/// Closed-form mean at time t in [0, 1]; exactly 0 at both endpoints.
template <typename Scalar> Scalar mean_closed(const BridgeParams<Scalar> &p, Scalar t) {
    detail::check_unit_closed(t);
    if (p.a == Scalar(0)) return Scalar(0);
    return p.a * detail::unit_mean(p.h, t);
}

/// Mean by quadrature of a * exp(-int_s^t h) over [0, t].
template <typename Scalar>
Scalar mean_quadrature(const BridgeParams<Scalar> &p, Scalar t, const SimpsonOptions &opts = {}) {
    detail::check_unit_closed(t);
    if (p.a == Scalar(0) || t <= Scalar(0) || t >= Scalar(1)) return Scalar(0);
    auto integrand = [&](Scalar s) {
        using std::exp;
        return exp(-h_primitive_diff(p.h, s, t));
    };
    return p.a * integrate_simpson(integrand, Scalar(0), t, opts);
}

/// Variance by quadrature of sigma^2 h(s) E[X_s] exp(-2 int_s^t h) over [0, t].
template <typename Scalar>
Scalar variance_quadrature(const BridgeParams<Scalar> &p, Scalar t,
                           const SimpsonOptions &opts = {}) {
    detail::check_unit_closed(t);
    if (p.a == Scalar(0) || p.sigma == Scalar(0) || t <= Scalar(0) || t >= Scalar(1))
        return Scalar(0);
    auto integrand = [&](Scalar s) {
        using std::exp;
        return h_eval(p.h, s) * detail::unit_mean(p.h, s) *
               exp(Scalar(-2) * h_primitive_diff(p.h, s, t));
    };
    return p.a * p.sigma * p.sigma * integrate_simpson(integrand, Scalar(0), t, opts);
}

namespace detail {

/// Model-1 variance with a = sigma = 1: r q^(r, 2r, 1), the second divided
/// difference of x -> q^x over the nodes r, 2r, 1. No shape is singular.
template <typename Scalar> Scalar model1_unit_variance(Scalar r, Scalar t) {
    using std::abs;
    using std::exp;
    using std::log1p;
    using std::pow;
    const Scalar L = -log1p(-t);
    // base node from the closest pair keeps the two offsets well separated
    Scalar x[3] = {r, Scalar(2) * r, Scalar(1)};
    const Scalar d01 = abs(x[0] - x[1]), d02 = abs(x[0] - x[2]), d12 = abs(x[1] - x[2]);
    if (d02 <= d01 && d02 <= d12)
        std::swap(x[1], x[2]);
    else if (d12 < d01 && d12 < d02)
        std::swap(x[0], x[2]);
    const Scalar a = -L * (x[1] - x[0]), b = -L * (x[2] - x[0]);
    if (std::max(a, b) < Scalar(600)) return r * exp(-L * x[0]) * L * L * exp_divdiff2(a, b);
    // far from r = 1/2 and r = 1 the textbook form is well conditioned
    const Scalar q = Scalar(1) - t;
    const Scalar qr = pow(q, r), q2r = qr * qr;
    return r / (Scalar(1) - r) * ((qr - q2r) / r - (q2r - q) / (Scalar(1) - Scalar(2) * r));
}

} // namespace detail

/// Closed-form variance at time t in [0, 1]; exactly 0 at both endpoints.
template <typename Scalar> Scalar variance_closed(const BridgeParams<Scalar> &p, Scalar t) {
    detail::check_unit_closed(t);
    if (p.a == Scalar(0) || p.sigma == Scalar(0) || t <= Scalar(0) || t >= Scalar(1))
        return Scalar(0);
    const Scalar scale = p.a * p.sigma * p.sigma;
    if (p.h.family() == HFamily::Model1) return scale * detail::model1_unit_variance(p.h.shape(), t);
    const Scalar q = Scalar(1) - t;
    const Scalar eps = p.h.shape();
    const Scalar te = t + eps;
    return scale * (Scalar(1) + eps) * q / (te * te) * detail::model2_variance_bracket(t, eps);
}

template <typename Scalar> struct MomentCurve {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    Vector s;
    Vector mean;
    Vector variance;
    /// NaN where the mean is numerically zero (endpoints in particular).
    Vector cv;

    Vector std_dev() const { return variance.cwiseMax(Scalar(0)).cwiseSqrt(); }
};

/// Mean, variance and CV on the uniform grid s_k = k / n_points, k = 0..n_points.
template <typename Scalar>
MomentCurve<Scalar> moment_curve(const BridgeParams<Scalar> &p, int n_points) {
    if (n_points <= 0) throw DomainError("moment curve needs a positive number of points");
    MomentCurve<Scalar> out;
    const Eigen::Index n = n_points + 1;
    out.s.resize(n);
    out.mean.resize(n);
    out.variance.resize(n);
    out.cv.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Scalar s = k == n_points ? Scalar(1) : Scalar(k) / Scalar(n_points);
        out.s(k) = s;
        out.mean(k) = mean_closed(p, s);
        out.variance(k) = variance_closed(p, s);
        using std::sqrt;
        out.cv(k) = out.mean(k) > Scalar(1e-300) ? sqrt(out.variance(k)) / out.mean(k)
                                                 : std::numeric_limits<Scalar>::quiet_NaN();
    }
    return out;
}

/// E[exp(lambda X_{1 - mu}) | X_t = x].
template <typename Scalar> struct MgfQuery {
    Scalar lambda;
    Scalar mu;
    Scalar t = Scalar(0);
    Scalar x = Scalar(0);
};

/// Exponents of the affine representation exp(slope * x + offset).
template <typename Scalar> struct MgfExponents {
    Scalar slope;
    Scalar offset;
};

template <typename Scalar>
MgfExponents<Scalar> mgf_exponents(const BridgeParams<Scalar> &p, const MgfQuery<Scalar> &q,
                                   const SimpsonOptions &opts = {}) {
    const Scalar ls2 = q.lambda * p.sigma * p.sigma;
    if (!(ls2 < Scalar(1))) {
        std::ostringstream os;
        os << "moment-generating function requires lambda * sigma^2 < 1, got "
           << q.lambda << " * " << p.sigma << "^2 = " << ls2;
        throw NumericError(os.str());
    }
    if (!(q.mu > Scalar(0) && q.mu < Scalar(1)))
        throw DomainError("mgf lag mu must lie in (0, 1)");
    const Scalar horizon = Scalar(1) - q.mu;
    if (!(q.t >= Scalar(0) && q.t < horizon))
        throw DomainError("mgf conditioning time t must lie in [0, 1 - mu)");
    if (!(q.x >= Scalar(0))) throw DomainError("mgf conditioning state x must be nonnegative");

    using std::exp;
    // Riccati solution of -phi' = -h phi + (sigma^2 h / 2) phi^2, phi(1 - mu) = lambda:
    // phi = lambda / ((1 - k) e^{int_u^{1-mu} h} + k) with k = lambda sigma^2 / 2
    const Scalar k = ls2 / Scalar(2);
    auto denominator = [&](Scalar u) {
        return (Scalar(1) - k) * exp(h_primitive_diff(p.h, u, horizon)) + k;
    };
    const Scalar d_t = denominator(q.t);
    if (!(d_t > Scalar(0)) || !(denominator(horizon) > Scalar(0))) {
        std::ostringstream os;
        os << "mgf Riccati solution is not positive on [t, 1 - mu] (denominator " << d_t << ")";
        throw NumericError(os.str());
    }
    const Scalar slope = q.lambda / d_t;
    Scalar offset = Scalar(0);
    if (p.a != Scalar(0) && q.lambda != Scalar(0)) {
        // integrate slope(u) / lambda so the absolute error scales with lambda
        auto integrand = [&](Scalar u) { return Scalar(1) / denominator(u); };
        offset = p.a * q.lambda * integrate_simpson(integrand, q.t, horizon, opts);
    }
    return {slope, offset};
}

template <typename Scalar>
Scalar mgf(const BridgeParams<Scalar> &p, const MgfQuery<Scalar> &q,
           const SimpsonOptions &opts = {}) {
    using std::exp;
    const auto e = mgf_exponents(p, q, opts);
    return exp(e.slope * q.x + e.offset);
}

} // namespace cirb
