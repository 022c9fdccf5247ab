#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ccp/types.hpp"

namespace ccp {

/// Absolute tolerance used to detect ties (atoms) between sample values.
inline constexpr double kAtomTol = 1e-12;

/**
 * A finite sample of real values, each carrying probability 1/n.
 *
 * Values are kept sorted internally; pass `presorted = true` to skip the
 * sort when the caller already guarantees ascending order (hot loops).
 */
class Sample {
  public:
    explicit Sample(Vector values, bool presorted = false) : values_(std::move(values)) {
        if (values_.empty()) throw std::invalid_argument("sample must contain at least one value");
        if (!all_finite(values_)) throw std::invalid_argument("sample values must be finite");
        if (!presorted) std::sort(values_.begin(), values_.end());
    }

    std::size_t size() const { return values_.size(); }
    ConstVecView sorted() const { return values_; }
    double min() const { return values_.front(); }
    double max() const { return values_.back(); }

  private:
    Vector values_;
};

namespace detail {

inline void check_probability_level(double p) {
    if (!(p >= 0.0 && p < 1.0))
        throw std::invalid_argument("probability level must satisfy 0 <= p < 1");
}

/// 1-based rank of the empirical p-quantile: k = max(1, ceil(p*n)).
inline std::size_t quantile_rank(std::size_t n, double p) {
    const auto k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
    return std::max<std::size_t>(1, std::min(k, n));
}

/// Smallest sample value strictly above `v` (atom tolerance), if any.
inline bool next_distinct(ConstVecView sorted, double v, double& out) {
    auto it = std::upper_bound(sorted.begin(), sorted.end(), v + kAtomTol);
    if (it == sorted.end()) return false;
    out = *it;
    return true;
}

}  // namespace detail

/// Empirical cumulative distribution function: #{i : v_i <= t} / n.
inline double ecdf(const Sample& s, double t) {
    if (!std::isfinite(t)) throw std::invalid_argument("ecdf evaluation point must be finite");
    const auto sorted = s.sorted();
    const auto count = std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
    return static_cast<double>(count) / static_cast<double>(s.size());
}

/**
 * Empirical p-quantile, the generalized inverse inf{t : F(t) >= p}.
 *
 * Realized on the sample as the k-th smallest value, k = max(1, ceil(p*n));
 * in particular the minimum for p = 0.
 */
inline double quantile(const Sample& s, double p) {
    detail::check_probability_level(p);
    return s.sorted()[detail::quantile_rank(s.size(), p) - 1];
}

/**
 * Empirical p-superquantile (conditional value-at-risk),
 *
 *   (1/(1-p)) * Int_p^1 Q_{p'} dp',
 *
 * evaluated exactly from the piecewise-constant quantile function: the tail
 * average of the order statistics with a fractional weight on the atom that
 * straddles p.
 */
inline double superquantile(const Sample& s, double p) {
    detail::check_probability_level(p);
    const auto v = s.sorted();
    const auto n = static_cast<double>(s.size());
    const std::size_t k = detail::quantile_rank(s.size(), p);
    // Integral of Q over (p, 1]: partial atom at rank k, full atoms above.
    double integral = v[k - 1] * (static_cast<double>(k) / n - p);
    for (std::size_t i = k; i < s.size(); ++i) integral += v[i] / n;
    return integral / (1.0 - p);
}

/**
 * Objective of the one-dimensional superquantile problem,
 *
 *   eta + (1/(1-p)) * mean(max(v_i - eta, 0)),
 *
 * whose optimal value is superquantile(s, p) and whose solution set contains
 * quantile(s, p).
 */
inline double rockafellar_objective(const Sample& s, double p, double eta) {
    detail::check_probability_level(p);
    const auto v = s.sorted();
    double acc = 0.0;
    for (std::size_t i = v.size(); i-- > 0;) {
        if (v[i] <= eta) break;  // sorted: everything below contributes zero
        acc += v[i] - eta;
    }
    return eta + acc / ((1.0 - p) * static_cast<double>(v.size()));
}

/// Closed interval; `lo` may be -inf (the p = 0 solution set is a left ray).
struct Interval {
    double lo;
    double hi;

    bool contains(double t, double tol = 0.0) const { return t >= lo - tol && t <= hi + tol; }

    double distance(double t) const {
        if (t < lo) return lo - t;
        if (t > hi) return t - hi;
        return 0.0;
    }
};

/**
 * Full solution set of the superquantile problem min_eta rockafellar_objective.
 *
 * The set is [Q_p, q_p^+] with q_p^+ = inf{t : F(t) > p}: a nontrivial
 * interval exactly when F(Q_p) = p (which requires p in I_n and no tie at the
 * quantile), otherwise the singleton {Q_p}. For p = 0 the objective is flat on
 * the whole ray below the minimum, so lo = -inf.
 */
inline Interval argmin_interval(const Sample& s, double p) {
    detail::check_probability_level(p);
    const double q = quantile(s, p);
    if (p == 0.0) return {-kInf, q};
    if (std::abs(ecdf(s, q) - p) <= kAtomTol) {
        double succ;
        if (detail::next_distinct(s.sorted(), q, succ)) return {q, succ};
    }
    return {q, q};
}

}  // namespace ccp
