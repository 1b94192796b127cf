// One step of the integrated-variance implicit (iVi) scheme for square-root
// processes with time-dependent coefficients:
//
//   X_{i+1} = X_i + a_i dt + b_i U_i + c_i Z_i,
//   U_i ~ IG(mean = alpha_i, shape = (alpha_i / eta_i)^2),  Z_i = (U_i - alpha_i) / eta_i,
//   alpha_i = X_i (e^{b_i dt} - 1) / b_i + a_i / b_i ((e^{b_i dt} - 1) / b_i - dt),
//   eta_i   = c_i (e^{b_i dt} - 1) / b_i.
//
// Substituting Z_i, the update collapses to kappa_a + kappa_u U_i with
//   kappa_a = a dt phi3(b dt) / phi1(b dt) >= 0,  kappa_u = 1 / (dt phi1(-b dt)) > 0,
// which is the same number computed without cancellation; nonnegativity of the
// next state is then structural.
#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>

#include "cirbridge/bridge.hpp"
#include "cirbridge/error.hpp"
#include "cirbridge/expm1_ratios.hpp"
#include "cirbridge/inverse_gaussian.hpp"
#include "cirbridge/rng.hpp"

namespace cirb {

struct StepCoefficients {
    double a;
    double b; // <= 0
    double c;
    double alpha;
    double eta;
    double dt;
};

/// Negative next states no larger than this in magnitude are clamped to 0 and counted.
inline constexpr double kNegativeDust = 1e-12;

struct StepDiagnostics {
    std::uint64_t dust_clamps = 0;
};

struct IviDraw {
    double next;
    double u;
    double z;
};

/// State-independent part of a step, precomputed once per time index.
class StepKernel {
public:
    StepKernel(double a, double b, double c, double dt) : a_(a), b_(b), c_(c), dt_(dt) {
        if (!(b <= 0.0)) throw DomainError("iVi step needs a nonpositive reversion coefficient b");
        if (!(dt > 0.0)) throw DomainError("iVi step needs a positive time increment");
        if (!(a >= 0.0) || !(c >= 0.0))
            throw DomainError("iVi step needs nonnegative source and diffusion coefficients");
        const double z = b * dt;
        const double p1 = phi1(z);
        e1_ = dt * p1;
        alpha_src_ = a * dt * dt * phi2(z);
        eta_ = c * e1_;
        kappa_a_ = a * dt * phi3(z) / p1;
        kappa_u_ = 1.0 / (dt * phi1(-z));
    }

    double alpha(double x) const { return x * e1_ + alpha_src_; }
    double eta() const { return eta_; }

    StepCoefficients coefficients(double x) const { return {a_, b_, c_, alpha(x), eta_, dt_}; }

    IviDraw draw(double x, PathRng &rng, StepDiagnostics &diag) const {
        const double al = alpha(x);
        if (!(al > 0.0)) return {x + a_ * dt_, 0.0, 0.0};
        double u = al;
        double zeta = 0.0;
        if (eta_ > 0.0) {
            u = sample_ig_ratio(al, eta_ * eta_ / al, rng);
            zeta = (u - al) / eta_;
        }
        return {guard(kappa_a_ + kappa_u_ * u, diag), u, zeta};
    }

    double advance(double x, PathRng &rng, StepDiagnostics &diag) const {
        const double al = alpha(x);
        if (!(al > 0.0)) return x + a_ * dt_;
        const double u = eta_ > 0.0 ? sample_ig_ratio(al, eta_ * eta_ / al, rng) : al;
        return guard(kappa_a_ + kappa_u_ * u, diag);
    }

private:
    static double guard(double next, StepDiagnostics &diag) {
        if (next >= 0.0) return next;
        if (next >= -kNegativeDust) {
            ++diag.dust_clamps;
            return 0.0;
        }
        std::ostringstream os;
        os << "iVi step produced a negative state " << next;
        throw NumericError(os.str());
    }

    double a_, b_, c_, dt_;
    double e1_ = 0.0;        // (e^{b dt} - 1) / b
    double alpha_src_ = 0.0; // source part of alpha
    double eta_ = 0.0;
    double kappa_a_ = 0.0;
    double kappa_u_ = 0.0;
};

/// Bridge coefficients on [t, t + dt], evaluated at the midpoint.
inline StepKernel bridge_step_kernel(const BridgeParamsd &p, double t, double dt) {
    if (!(dt > 0.0)) throw DomainError("time increment must be positive");
    if (!(t >= 0.0) || t + dt > 1.0 + 1e-12) {
        std::ostringstream os;
        os << "bridge step [" << t << ", " << t + dt << "] leaves the unit interval";
        throw DomainError(os.str());
    }
    const double h = h_eval(p.h, t + 0.5 * dt);
    return StepKernel(p.a, -h, p.sigma * std::sqrt(h), dt);
}

inline StepCoefficients step_coefficients(const BridgeParamsd &p, double x, double t, double dt) {
    if (!(x >= 0.0)) throw DomainError("state must be nonnegative");
    return bridge_step_kernel(p, t, dt).coefficients(x);
}

inline StepKernel cir_step_kernel(const CirParamsd &p, double dt) {
    return StepKernel(p.a, -p.r, p.sigma, dt);
}

/// One step evaluated literally from explicit coefficients: draws U and Z and
/// returns X + a dt + b U + c Z. The simulators use StepKernel::advance, which
/// returns the same value in cancellation-free form.
inline IviDraw ivi_draw(const StepCoefficients &k, double x, PathRng &rng,
                        StepDiagnostics &diag) {
    if (!(k.b <= 0.0) || !(k.alpha >= 0.0) || !(k.eta >= 0.0) || !(k.dt > 0.0))
        throw DomainError("invalid iVi step coefficients");
    if (!(k.alpha > 0.0)) return {x + k.a * k.dt, 0.0, 0.0};
    double u = k.alpha;
    double zeta = 0.0;
    if (k.eta > 0.0) {
        u = sample_ig_ratio(k.alpha, k.eta * k.eta / k.alpha, rng);
        zeta = (u - k.alpha) / k.eta;
    }
    double next = x + k.a * k.dt + k.b * u + k.c * zeta;
    if (next < 0.0) {
        if (next < -kNegativeDust) {
            std::ostringstream os;
            os << "iVi step produced a negative state " << next;
            throw NumericError(os.str());
        }
        ++diag.dust_clamps;
        next = 0.0;
    }
    return {next, u, zeta};
}

inline double ivi_step(const StepCoefficients &k, double x, PathRng &rng, StepDiagnostics &diag) {
    return ivi_draw(k, x, rng, diag).next;
}

} // namespace cirb
