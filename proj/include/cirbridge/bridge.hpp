// Domain types of the square-root bridge on the normalized unit interval.
//
// The bridge solves
//     dX_s = (a - h(s) X_s) ds + sigma sqrt(h(s) X_s) dW_s,   X_0 = X_1 = 0,
// where the rate h blows up at s = 1 and forces the terminal pin. Two rate
// families are supported:
//     model 1:  h(s) = c / (1 - s)
//     model 2:  h(s) = 1 / (s + eps) + 1 / (1 - s)
#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>

#include "cirbridge/error.hpp"

namespace cirb {

enum class HFamily { Model1 = 1, Model2 = 2 };

inline int model_id(HFamily f) { return static_cast<int>(f); }

inline HFamily family_from_id(int id) {
    if (id == 1) return HFamily::Model1;
    if (id == 2) return HFamily::Model2;
    throw DomainError("model id must be 1 or 2, got " + std::to_string(id));
}

/// Rate function h of one of the two built-in families. Immutable.
template <typename Scalar> class HModel {
public:
    static HModel model1(Scalar c) { return HModel(HFamily::Model1, c); }
    static HModel model2(Scalar eps) { return HModel(HFamily::Model2, eps); }
    static HModel make(HFamily f, Scalar shape) { return HModel(f, shape); }

    HFamily family() const { return family_; }
    /// c for model 1, eps for model 2.
    Scalar shape() const { return shape_; }

    /// Model 2 with eps >= 1 lies outside the range the high-volatility
    /// closed form assumes; it is accepted but callers may want to warn.
    bool flagged() const { return family_ == HFamily::Model2 && shape_ >= Scalar(1); }

private:
    HModel(HFamily f, Scalar shape) : family_(f), shape_(shape) {
        if (!(shape > Scalar(0)) || !std::isfinite(static_cast<double>(shape))) {
            std::ostringstream os;
            os << (f == HFamily::Model1 ? "c" : "eps") << " must be a positive finite number, got "
               << shape;
            throw DomainError(os.str());
        }
    }

    HFamily family_;
    Scalar shape_;
};

using HModeld = HModel<double>;

namespace detail {
template <typename Scalar> void check_unit_open(Scalar s, const char *what) {
    if (!(s >= Scalar(0) && s < Scalar(1))) {
        std::ostringstream os;
        os << what << " must lie in [0, 1), got " << s;
        throw DomainError(os.str());
    }
}
} // namespace detail

/// h(s) for s in [0, 1). Evaluation at s = 1 is rejected, never +inf.
template <typename Scalar> Scalar h_eval(const HModel<Scalar> &m, Scalar s) {
    detail::check_unit_open(s, "s");
    if (m.family() == HFamily::Model1) return m.shape() / (Scalar(1) - s);
    return Scalar(1) / (s + m.shape()) + Scalar(1) / (Scalar(1) - s);
}

/// H(s2) - H(s1) = integral of h over [s1, s2], 0 <= s1 <= s2 < 1.
template <typename Scalar>
Scalar h_primitive_diff(const HModel<Scalar> &m, Scalar s1, Scalar s2) {
    detail::check_unit_open(s1, "s1");
    detail::check_unit_open(s2, "s2");
    if (s1 > s2) {
        std::ostringstream os;
        os << "h_primitive_diff requires s1 <= s2, got s1=" << s1 << " s2=" << s2;
        throw DomainError(os.str());
    }
    using std::log1p;
    // log((1 - s1) / (1 - s2)) without forming the ratio
    const Scalar tail = log1p(-s1) - log1p(-s2);
    if (m.family() == HFamily::Model1) return m.shape() * tail;
    const Scalar eps = m.shape();
    return log1p((s2 - s1) / (s1 + eps)) + tail;
}

template <typename Scalar> struct HMinimum {
    Scalar s_star;
    Scalar value;
};

/// Minimum of h over [0, 1) and where it is attained.
template <typename Scalar> HMinimum<Scalar> h_min(const HModel<Scalar> &m) {
    if (m.family() == HFamily::Model1) return {Scalar(0), m.shape()};
    const Scalar eps = m.shape();
    if (eps < Scalar(1)) return {(Scalar(1) - eps) / Scalar(2), Scalar(4) / (Scalar(1) + eps)};
    // h is increasing on [0, 1) once eps >= 1
    return {Scalar(0), h_eval(m, Scalar(0))};
}

/// Witnesses (h_bar, omega) for h_bar / (1 - s) <= h(s) <= h_bar / (1 - s) + omega
/// on [0, 1). Sufficient for the terminal pin; informational only.
template <typename Scalar> struct PinningBound {
    Scalar h_bar;
    Scalar omega;
};

template <typename Scalar> PinningBound<Scalar> terminal_pinning_bound(const HModel<Scalar> &m) {
    if (m.family() == HFamily::Model1) return {m.shape(), Scalar(0)};
    return {Scalar(1), Scalar(1) / m.shape()};
}

/// Nondimensional bridge parameters on [0, 1].
template <typename Scalar> struct BridgeParams {
    Scalar a;
    Scalar sigma;
    HModel<Scalar> h;

    BridgeParams(Scalar a_, Scalar sigma_, HModel<Scalar> h_) : a(a_), sigma(sigma_), h(h_) {
        validate();
    }

    void validate() const {
        if (!(a >= Scalar(0)) || !std::isfinite(static_cast<double>(a)))
            throw DomainError("source a must be a finite nonnegative number");
        if (!(sigma >= Scalar(0)) || !std::isfinite(static_cast<double>(sigma)))
            throw DomainError("volatility sigma must be a finite nonnegative number");
    }
};

using BridgeParamsd = BridgeParams<double>;

/// Diffusion dominates the source everywhere: a < sigma^2 / 2 * min h.
template <typename Scalar> bool is_high_volatility(const BridgeParams<Scalar> &p) {
    return p.a < p.sigma * p.sigma / Scalar(2) * h_min(p.h).value;
}

/// Classical square-root process dC = (a - r C) dt + sigma sqrt(C) dB, C_0 = x0.
template <typename Scalar> struct CirParams {
    Scalar a;
    Scalar r;
    Scalar sigma;
    Scalar x0;

    void validate() const {
        auto ok = [](Scalar v) { return v >= Scalar(0) && std::isfinite(static_cast<double>(v)); };
        if (!ok(a) || !ok(r) || !ok(sigma) || !ok(x0))
            throw DomainError("CIR parameters a, r, sigma, x0 must be finite and nonnegative");
    }
};

using CirParamsd = CirParams<double>;

/// Uniform grid t_i = i * horizon / N, i = 0..N.
class TimeGrid {
public:
    explicit TimeGrid(std::int64_t n_steps, double horizon = 1.0)
        : n_steps_(n_steps), horizon_(horizon) {
        if (n_steps <= 0) throw DomainError("number of time steps must be positive");
        if (!(horizon > 0.0) || !std::isfinite(horizon))
            throw DomainError("time horizon must be positive and finite");
        dt_ = horizon / static_cast<double>(n_steps);
    }

    std::int64_t n_steps() const { return n_steps_; }
    std::int64_t n_points() const { return n_steps_ + 1; }
    double dt() const { return dt_; }
    double horizon() const { return horizon_; }

    /// Correctly rounded i * horizon / N; exact at both ends.
    double time(std::int64_t i) const {
        return static_cast<double>(i) * horizon_ / static_cast<double>(n_steps_);
    }

private:
    std::int64_t n_steps_;
    double horizon_;
    double dt_;
};

} // namespace cirb
