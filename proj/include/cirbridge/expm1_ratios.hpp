// Divided differences of exp at 0, evaluated without cancellation:
//   phi1(z) = (e^z - 1) / z
//   phi2(z) = (e^z - 1 - z) / z^2
//   phi3(z) = (z e^z - e^z + 1) / z^2
// and the second divided difference exp[0, a, b].
// All three are positive for every real z and finite at z = 0.
#pragma once

#include <algorithm>
#include <cmath>

namespace cirb {

template <typename Scalar> Scalar phi1(Scalar z) {
    using std::abs;
    using std::expm1;
    if (abs(z) < Scalar(1e-8)) return Scalar(1) + z / Scalar(2);
    return expm1(z) / z;
}

template <typename Scalar> Scalar phi2(Scalar z) {
    using std::abs;
    using std::expm1;
    if (abs(z) < Scalar(0.5)) {
        // sum_{k>=0} z^k / (k + 2)!
        Scalar term = Scalar(0.5);
        Scalar sum = term;
        for (int k = 1; k < 20; ++k) {
            term *= z / Scalar(k + 2);
            sum += term;
        }
        return sum;
    }
    return (expm1(z) - z) / (z * z);
}

template <typename Scalar> Scalar phi3(Scalar z) {
    using std::abs;
    using std::exp;
    using std::expm1;
    if (abs(z) < Scalar(0.5)) {
        // sum_{n>=2} (n - 1) / n! z^(n-2)
        Scalar inv_fact = Scalar(0.5); // 1 / n!
        Scalar zpow = Scalar(1);
        Scalar sum = Scalar(0.5);
        for (int n = 3; n < 22; ++n) {
            inv_fact /= Scalar(n);
            zpow *= z;
            sum += Scalar(n - 1) * inv_fact * zpow;
        }
        return sum;
    }
    return (z * exp(z) - expm1(z)) / (z * z);
}

/// exp[0, a, b] = (phi1(b) - phi1(a)) / (b - a). Callers keep |b - a| >= max(|a|, |b|) / 2.
template <typename Scalar> Scalar exp_divdiff2(Scalar a, Scalar b) {
    using std::abs;
    if (std::max(abs(a), abs(b)) < Scalar(1)) {
        // sum_k h_k(a, b) / (k + 2)!, h_k the complete homogeneous polynomial
        Scalar h = Scalar(1), ak = Scalar(1), inv_fact = Scalar(0.5);
        Scalar sum = inv_fact;
        for (int k = 1; k < 30; ++k) {
            ak *= a;
            h = b * h + ak;
            inv_fact /= Scalar(k + 2);
            sum += h * inv_fact;
        }
        return sum;
    }
    return (phi1(b) - phi1(a)) / (b - a);
}

} // namespace cirb
