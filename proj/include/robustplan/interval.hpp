#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "robustplan/errors.hpp"

namespace robustplan {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/**
 * @brief Closed real interval [lo, hi].
 *
 * Degenerate (zero-width) intervals are first-class: every operator is exact
 * on them. Endpoints must be finite and ordered; violations throw
 * ParameterError at construction, so a constructed Interval is always valid.
 */
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;

    Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
        if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) {
            throw ParameterError("invalid interval [" + std::to_string(lo_) +
                                 ", " + std::to_string(hi_) + "]");
        }
    }

    /// Degenerate interval [x, x].
    static Interval point(double x) { return Interval(x, x); }

    double width() const noexcept { return hi - lo; }
    double mid() const noexcept { return 0.5 * (lo + hi); }
    bool contains(double x) const noexcept { return lo <= x && x <= hi; }
    bool contains(const Interval& other) const noexcept {
        return lo <= other.lo && other.hi <= hi;
    }

    friend bool operator==(const Interval& a, const Interval& b) noexcept {
        return a.lo == b.lo && a.hi == b.hi;
    }
};

using IntervalVector = std::vector<Interval>;

/// Product evaluation mode, see imul().
enum class MulMode {
    /// Exact hull of the four endpoint products (sound and tight).
    Default,
    /// Positive/negative-part decomposition with n(x) = max(-x, 0); sound but
    /// conservative on mixed-sign inputs, kept for comparison tests.
    Fidelity,
};

/// Interval sum [a.lo + b.lo, a.hi + b.hi].
inline Interval iadd(const Interval& a, const Interval& b) {
    return Interval(a.lo + b.lo, a.hi + b.hi);
}

/// Interval difference [a.lo - b.hi, a.hi - b.lo].
inline Interval isub(const Interval& a, const Interval& b) {
    return Interval(a.lo - b.hi, a.hi - b.lo);
}

/// Interval product; contains {x*y : x in a, y in b} in either mode.
inline Interval imul(const Interval& a, const Interval& b,
                     MulMode mode = MulMode::Default) {
    if (mode == MulMode::Fidelity) {
        const auto p = [](double x) { return std::max(x, 0.0); };
        const auto n = [](double x) { return std::max(-x, 0.0); };
        const double lo = p(a.lo) * p(b.lo) - p(a.hi) * n(b.lo) -
                          n(a.lo) * p(b.hi) + n(a.hi) * n(b.hi);
        const double hi = p(a.hi) * p(b.hi) - p(a.lo) * n(b.hi) -
                          n(a.hi) * p(b.lo) + n(a.lo) * n(b.lo);
        return Interval(lo, hi);
    }
    const double p1 = a.lo * b.lo;
    const double p2 = a.lo * b.hi;
    const double p3 = a.hi * b.lo;
    const double p4 = a.hi * b.hi;
    return Interval(std::min(std::min(p1, p2), std::min(p3, p4)),
                    std::max(std::max(p1, p2), std::max(p3, p4)));
}

/// Reciprocal of a strictly positive interval: [1/z.hi, 1/z.lo].
inline Interval iinv(const Interval& z) {
    if (z.lo <= 0.0) {
        throw DomainError("iinv requires a strictly positive interval, got lo=" +
                          std::to_string(z.lo));
    }
    return Interval(1.0 / z.hi, 1.0 / z.lo);
}

/// Tight range of cos over z; correct for any width and placement.
inline Interval icos(const Interval& z) {
    constexpr double kTwoPi = 2.0 * kPi;
    if (z.width() >= kTwoPi) return Interval(-1.0, 1.0);
    const double cl = std::cos(z.lo);
    const double ch = std::cos(z.hi);
    double lo = std::min(cl, ch);
    double hi = std::max(cl, ch);
    // cos attains +1 at multiples of 2*pi and -1 at pi plus multiples of 2*pi;
    // a critical point lies in z iff the scaled interval straddles an integer.
    if (std::ceil(z.lo / kTwoPi) <= std::floor(z.hi / kTwoPi)) hi = 1.0;
    if (std::ceil((z.lo - kPi) / kTwoPi) <= std::floor((z.hi - kPi) / kTwoPi)) {
        lo = -1.0;
    }
    return Interval(lo, hi);
}

/// Tight range of sin over z; correct for any width and placement.
inline Interval isin(const Interval& z) {
    constexpr double kTwoPi = 2.0 * kPi;
    constexpr double kHalfPi = 0.5 * kPi;
    if (z.width() >= kTwoPi) return Interval(-1.0, 1.0);
    const double sl = std::sin(z.lo);
    const double sh = std::sin(z.hi);
    double lo = std::min(sl, sh);
    double hi = std::max(sl, sh);
    if (std::ceil((z.lo - kHalfPi) / kTwoPi) <=
        std::floor((z.hi - kHalfPi) / kTwoPi)) {
        hi = 1.0;
    }
    if (std::ceil((z.lo + kHalfPi) / kTwoPi) <=
        std::floor((z.hi + kHalfPi) / kTwoPi)) {
        lo = -1.0;
    }
    return Interval(lo, hi);
}

/// Endpoint image [f(z.lo), f(z.hi)] of a function the caller asserts is
/// monotone increasing on z.
template <typename F>
Interval iapply_monotone(F&& f, const Interval& z) {
    return Interval(f(z.lo), f(z.hi));
}

/// Exact image of n(x) = min(x, 0) over z (n is monotone increasing).
inline Interval negative_part(const Interval& z) {
    return Interval(std::min(z.lo, 0.0), std::min(z.hi, 0.0));
}

/// Affine endpoint maps: z + c and c * z.
inline Interval operator+(const Interval& z, double c) {
    return Interval(z.lo + c, z.hi + c);
}
inline Interval operator+(double c, const Interval& z) { return z + c; }

inline Interval operator*(double c, const Interval& z) {
    return c >= 0.0 ? Interval(c * z.lo, c * z.hi) : Interval(c * z.hi, c * z.lo);
}
inline Interval operator*(const Interval& z, double c) { return c * z; }

inline Interval operator-(const Interval& z) { return -1.0 * z; }

/// Smallest interval containing both a and b.
inline Interval hull(const Interval& a, const Interval& b) {
    return Interval(std::min(a.lo, b.lo), std::max(a.hi, b.hi));
}

/// Interval dot product: sum of component-wise products.
inline Interval idot(const IntervalVector& a, const IntervalVector& b,
                     MulMode mode = MulMode::Default) {
    if (a.size() != b.size()) {
        throw ParameterError("idot: dimension mismatch");
    }
    Interval acc = Interval::point(0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc = iadd(acc, imul(a[i], b[i], mode));
    }
    return acc;
}

}  // namespace robustplan
