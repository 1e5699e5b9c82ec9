#pragma once

#include <cmath>
#include <utility>

#include "toptwo/errors.hpp"

namespace toptwo {

struct RootOptions {
    double ftol = 1e-10;    // accept when |f(x)| < ftol
    double xtol = 1e-14;    // or when the bracket is this tight (relative)
    int max_iter = 200;
};

// Brent's method on a sign-changing bracket [a,b]. Combines inverse quadratic
// interpolation and secant steps with a bisection fallback.
template <class F>
double brent_root(F&& f, double a, double b, double fa, double fb,
                  const RootOptions& opts = {}) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0))
        throw no_root_error("brent_root: endpoints do not bracket a root");

    double c = a, fc = fa;
    double d = b - a, e = d;
    for (int iter = 0; iter < opts.max_iter; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a; fc = fa;
            d = e = b - a;
        }
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol = 2.0 * opts.xtol * std::fabs(b) + 0.5 * opts.xtol;
        const double m = 0.5 * (c - b);
        if (std::fabs(fb) < opts.ftol || std::fabs(m) <= tol) return b;

        if (std::fabs(e) >= tol && std::fabs(fa) > std::fabs(fb)) {
            const double s = fb / fa;
            double p, q;
            if (a == c) { // secant
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else { // inverse quadratic
                const double qq = fa / fc, r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q; else p = -p;
            if (2.0 * p < std::fmin(3.0 * m * q - std::fabs(tol * q), std::fabs(e * q))) {
                e = d; d = p / q;
            } else {
                d = m; e = m;
            }
        } else {
            d = m; e = m;
        }
        a = b; fa = fb;
        b += (std::fabs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
        fb = f(b);
        if (fb == 0.0) return b;
    }
    return b;
}

// Expand [lo,hi] geometrically until f changes sign, then run Brent.
// f must be (weakly) decreasing for the expansion logic to terminate.
template <class F>
double bracketed_root_decreasing(F&& f, double lo, double hi,
                                 double lo_min, double hi_max,
                                 const RootOptions& opts = {}) {
    double flo = f(lo);
    double fhi = f(hi);
    while (flo < 0.0) {
        if (lo <= lo_min)
            throw no_root_error("root bracketing: no sign change above lower limit");
        hi = lo; fhi = flo;
        lo = std::fmax(lo_min, lo * 0.125);
        flo = f(lo);
    }
    while (fhi > 0.0) {
        if (hi >= hi_max)
            throw no_root_error("root bracketing: no sign change below upper limit");
        lo = hi; flo = fhi;
        hi = std::fmin(hi_max, hi * 8.0);
        fhi = f(hi);
    }
    return brent_root(f, lo, hi, flo, fhi, opts);
}

} // namespace toptwo
