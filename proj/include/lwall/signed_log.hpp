#pragma once

#include <cmath>
#include <limits>

namespace lwall {

/// A real number stored as sign and log-magnitude. Zero is {0, -inf}.
struct SignedLog {
    int sign = 0;
    double log_abs = -std::numeric_limits<double>::infinity();

    static SignedLog zero() { return {}; }

    static SignedLog from_log(double log_abs, int sign = 1) {
        if (sign == 0 || log_abs == -std::numeric_limits<double>::infinity())
            return zero();
        return {sign > 0 ? 1 : -1, log_abs};
    }

    static SignedLog from_real(double v) {
        if (v == 0.0) return zero();
        return {v > 0 ? 1 : -1, std::log(std::fabs(v))};
    }

    /// exp of the log-magnitude; underflows quietly to 0.
    double to_real() const {
        if (sign == 0) return 0.0;
        return sign * std::exp(log_abs);
    }

    bool is_zero() const { return sign == 0; }

    /// True when to_real() would lose the value to binary64 underflow.
    bool underflows() const {
        return sign != 0 && log_abs < std::log(std::numeric_limits<double>::denorm_min());
    }

    friend SignedLog operator*(SignedLog l, SignedLog r) {
        if (l.sign == 0 || r.sign == 0) return zero();
        return {l.sign * r.sign, l.log_abs + r.log_abs};
    }

    friend SignedLog operator/(SignedLog l, SignedLog r) {
        if (l.sign == 0) return zero();
        return {l.sign * r.sign, l.log_abs - r.log_abs};
    }
};

}  // namespace lwall
