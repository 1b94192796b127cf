#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <array>
#include <numeric>
#include <vector>

namespace cirb {

template <typename Scalar> struct NelderMeadOptions {
    /// Stop once every vertex lies within this distance of the best one.
    Scalar diameter_tol = Scalar(1e-10);
    int max_evaluations = 20000;
    Scalar reflection = Scalar(1);
    Scalar expansion = Scalar(2);
    Scalar contraction = Scalar(0.5);
    Scalar shrink = Scalar(0.5);
};

template <typename Scalar, int Dim> struct NelderMeadResult {
    Eigen::Matrix<Scalar, Dim, 1> x;
    Scalar value;
    int evaluations = 0;
    bool converged = false;
    Scalar diameter;
};

/// Derivative-free minimization of f starting from the simplex
/// {x0, x0 + step_k e_k}. f takes an Eigen vector and returns a scalar.
template <typename Scalar, int Dim, typename F>
NelderMeadResult<Scalar, Dim> nelder_mead(F &&f, const Eigen::Matrix<Scalar, Dim, 1> &x0,
                                          const Eigen::Matrix<Scalar, Dim, 1> &step,
                                          const NelderMeadOptions<Scalar> &opts = {}) {
    using Vec = Eigen::Matrix<Scalar, Dim, 1>;
    const Eigen::Index n = x0.size();
    std::vector<Vec> pts(static_cast<std::size_t>(n + 1), x0);
    std::vector<Scalar> vals(static_cast<std::size_t>(n + 1));
    for (Eigen::Index k = 0; k < n; ++k) pts[static_cast<std::size_t>(k + 1)](k) += step(k);

    int evals = 0;
    auto eval = [&](const Vec &x) {
        ++evals;
        return f(x);
    };
    for (std::size_t k = 0; k < pts.size(); ++k) vals[k] = eval(pts[k]);

    std::vector<std::size_t> order(pts.size());
    auto sort_vertices = [&] {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t l, std::size_t r) { return vals[l] < vals[r]; });
        std::vector<Vec> p2;
        std::vector<Scalar> v2;
        p2.reserve(pts.size());
        v2.reserve(pts.size());
        for (auto i : order) {
            p2.push_back(pts[i]);
            v2.push_back(vals[i]);
        }
        pts.swap(p2);
        vals.swap(v2);
    };
    auto diameter = [&] {
        Scalar d = Scalar(0);
        for (std::size_t k = 1; k < pts.size(); ++k) d = std::max(d, (pts[k] - pts[0]).norm());
        return d;
    };

    NelderMeadResult<Scalar, Dim> res;
    const std::size_t worst = pts.size() - 1;
    while (true) {
        sort_vertices();
        const Scalar diam = diameter();
        if (diam < opts.diameter_tol) {
            res.converged = true;
            break;
        }
        if (evals >= opts.max_evaluations) break;

        Vec centroid = Vec::Zero(n);
        for (std::size_t k = 0; k < worst; ++k) centroid += pts[k];
        centroid /= Scalar(worst);

        const Vec xr = centroid + opts.reflection * (centroid - pts[worst]);
        const Scalar fr = eval(xr);
        if (fr < vals[0]) {
            const Vec xe = centroid + opts.expansion * (xr - centroid);
            const Scalar fe = eval(xe);
            if (fe < fr) {
                pts[worst] = xe;
                vals[worst] = fe;
            } else {
                pts[worst] = xr;
                vals[worst] = fr;
            }
            continue;
        }
        if (fr < vals[worst - 1]) {
            pts[worst] = xr;
            vals[worst] = fr;
            continue;
        }
        // contraction, outside if the reflected point beat the worst vertex
        const bool outside = fr < vals[worst];
        const Vec xc = outside ? Vec(centroid + opts.contraction * (xr - centroid))
                               : Vec(centroid + opts.contraction * (pts[worst] - centroid));
        const Scalar fc = eval(xc);
        if (fc < (outside ? fr : vals[worst])) {
            pts[worst] = xc;
            vals[worst] = fc;
            continue;
        }
        for (std::size_t k = 1; k < pts.size(); ++k) {
            pts[k] = pts[0] + opts.shrink * (pts[k] - pts[0]);
            vals[k] = eval(pts[k]);
        }
    }
    res.x = pts[0];
    res.value = vals[0];
    res.evaluations = evals;
    res.diameter = diameter();
    return res;
}

} // namespace cirb
