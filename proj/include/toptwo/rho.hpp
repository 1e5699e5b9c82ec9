#pragma once

#include <cmath>
#include <functional>
#include <utility>

#include "toptwo/errors.hpp"

namespace toptwo {

// Dependence function rho: [0,1] -> [0,1] of the Frechet-Welsch family.
// Valid functions are concave, non-increasing, and satisfy the envelope
// rho(0)*(1-eta) <= rho(eta) <= 1-eta.
class RhoFunction {
  public:
    enum class Kind { independence, linear, power, kink, custom };

    // rho(eta) = 1 - eta (the iid limit).
    static RhoFunction independence() { return RhoFunction(Kind::independence, 1.0, 1.0); }

    // rho(eta) = c * (1 - eta), c in [0,1]. c = 0 is perfect monotone dependence.
    static RhoFunction linear(double c) {
        if (!(c >= 0.0 && c <= 1.0))
            throw domain_error("RhoFunction::linear: c must lie in [0,1]");
        return RhoFunction(Kind::linear, c, c);
    }

    // rho(eta) = (1 - eta^c) / c, c > 1.
    static RhoFunction power(double c) {
        if (!(c > 1.0)) throw domain_error("RhoFunction::power: c must exceed 1");
        return RhoFunction(Kind::power, c, 1.0 / c);
    }

    // rho(eta) = min(c, 1 - eta), c in [0,1). Appears in the ARMAX(1) model.
    static RhoFunction kink(double c) {
        if (!(c >= 0.0 && c < 1.0))
            throw domain_error("RhoFunction::kink: c must lie in [0,1)");
        return RhoFunction(Kind::kink, c, c);
    }

    // Arbitrary callable; validity is checked on a 1001-point grid since it
    // cannot be verified analytically.
    static RhoFunction custom(std::function<double(double)> fn) {
        if (!fn) throw domain_error("RhoFunction::custom: empty callable");
        validate_on_grid(fn);
        const double rho0 = fn(0.0);
        RhoFunction r(Kind::custom, 0.0, rho0);
        r.fn_ = std::move(fn);
        return r;
    }

    double operator()(double eta) const {
        switch (kind_) {
            case Kind::independence: return 1.0 - eta;
            case Kind::linear: return c_ * (1.0 - eta);
            case Kind::power: return (1.0 - std::pow(eta, c_)) / c_;
            case Kind::kink: return std::fmin(c_, 1.0 - eta);
            case Kind::custom: return fn_(eta);
        }
        return 0.0; // unreachable
    }

    double rho0() const { return rho0_; }
    Kind kind() const { return kind_; }

  private:
    RhoFunction(Kind kind, double c, double rho0) : kind_(kind), c_(c), rho0_(rho0) {}

    static void validate_on_grid(const std::function<double(double)>& fn) {
        constexpr int n = 1000; // 1001 grid points on [0,1]
        constexpr double slack = 1e-9;
        const double rho0 = fn(0.0);
        if (!(rho0 >= -slack && rho0 <= 1.0 + slack))
            throw domain_error("RhoFunction::custom: rho(0) outside [0,1]");
        double prev = rho0, prev2 = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double eta = static_cast<double>(i) / n;
            const double v = fn(eta);
            if (!(v >= rho0 * (1.0 - eta) - slack && v <= 1.0 - eta + slack))
                throw domain_error("RhoFunction::custom: envelope bound violated");
            if (i >= 1 && v > prev + slack)
                throw domain_error("RhoFunction::custom: not non-increasing");
            if (i >= 2 && v - 2.0 * prev + prev2 > slack)
                throw domain_error("RhoFunction::custom: not concave");
            prev2 = prev;
            prev = v;
        }
    }

    Kind kind_;
    double c_;
    double rho0_;
    std::function<double(double)> fn_;
};

} // namespace toptwo
