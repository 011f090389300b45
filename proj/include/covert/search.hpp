#pragma once

#include <cmath>
#include <utility>

namespace covert {

/// Root of f(x) = target on [lo, hi] for nondecreasing f with
/// f(lo) <= target <= f(hi). Interval shrinks until hi - lo <= rel_tol * hi.
template <class F>
double bisect_nondecreasing(F&& f, double lo, double hi, double target, double rel_tol,
                            int max_iter = 200) {
    for (int i = 0; i < max_iter && hi - lo > rel_tol * std::max(hi, 1e-300); ++i) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

template <class T>
struct SearchPoint {
    double x;
    T value;
};

/// Golden-section maximization of f on [lo, hi]; converges to the bracketed
/// local maximum once |hi - lo| <= abs_tol.
template <class F>
SearchPoint<double> golden_section_maximize(F&& f, double lo, double hi, double abs_tol,
                                            int max_iter = 400) {
    constexpr double inv_phi = 0.6180339887498949;  // (sqrt(5) - 1) / 2
    double c = hi - (hi - lo) * inv_phi;
    double d = lo + (hi - lo) * inv_phi;
    double fc = f(c);
    double fd = f(d);
    for (int i = 0; i < max_iter && hi - lo > abs_tol; ++i) {
        if (fc > fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - (hi - lo) * inv_phi;
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + (hi - lo) * inv_phi;
            fd = f(d);
        }
    }
    const double x = 0.5 * (lo + hi);
    return {x, f(x)};
}

}  // namespace covert
