#pragma once
#include <cmath>
#include <utility>

#include "olg/errors.hpp"

namespace olg {

struct BisectOptions {
    double tolerance = 1e-12;  // absolute width of the final bracket
    int max_iterations = 200;
};

// Bisection on [lo, hi] for continuous f with f(lo), f(hi) of opposite sign.
template <class F>
double bisect(F&& f, double lo, double hi, BisectOptions opt = {}) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw bracket_error("bisect: endpoints do not straddle a root", flo, fhi);
    for (int i = 0; i < opt.max_iterations && hi - lo > opt.tolerance; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = f(mid);
        if (fmid == 0.0) return mid;
        if ((fmid > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Grows hi geometrically until pred(hi) holds, starting from `start`.
template <class P>
double expand_upper(P&& pred, double start = 1.0, int max_doublings = 2048) {
    double hi = start;
    for (int i = 0; i < max_doublings; ++i) {
        if (pred(hi)) return hi;
        hi *= 2.0;
        if (!std::isfinite(hi))
            throw inversion_error("expand_upper: no finite upper bracket found");
    }
    throw inversion_error("expand_upper: bracket expansion exhausted");
}

}  // namespace olg
