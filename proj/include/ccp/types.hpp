#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ccp {

using Vector = std::vector<double>;
using ConstVecView = std::span<const double>;
using VecView = std::span<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline double dot(ConstVecView a, ConstVecView b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double squared_distance(ConstVecView a, ConstVecView b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline bool all_finite(ConstVecView v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

/// Componentwise bounds on the decision variable; +-inf marks an absent bound.
struct BoxConstraints {
    Vector lower;
    Vector upper;

    static BoxConstraints unbounded(std::size_t d) {
        return {Vector(d, -kInf), Vector(d, kInf)};
    }

    static BoxConstraints nonnegative(std::size_t d) {
        return {Vector(d, 0.0), Vector(d, kInf)};
    }

    std::size_t dim() const { return lower.size(); }

    void validate() const {
        if (lower.size() != upper.size())
            throw std::invalid_argument("box bounds have mismatched dimensions");
        for (std::size_t k = 0; k < lower.size(); ++k)
            if (!(lower[k] <= upper[k]))
                throw std::invalid_argument("box lower bound exceeds upper bound at component " +
                                            std::to_string(k));
    }

    double clamp(std::size_t k, double v) const {
        return std::min(std::max(v, lower[k]), upper[k]);
    }

    void project(VecView x) const {
        for (std::size_t k = 0; k < x.size(); ++k) x[k] = clamp(k, x[k]);
    }

    bool contains(ConstVecView x, double tol = 0.0) const {
        for (std::size_t k = 0; k < x.size(); ++k)
            if (x[k] < lower[k] - tol || x[k] > upper[k] + tol) return false;
        return true;
    }
};

}  // namespace ccp
