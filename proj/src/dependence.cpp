#include "vinecredit/dependence.hpp"

#include "vinecredit/error.hpp"
#include "vinecredit/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace vinecredit {

namespace {

// Counts pairs tied within runs of equal values in an already sorted sequence.
std::int64_t tied_pairs(const std::vector<double>& sorted) {
    std::int64_t total = 0;
    std::int64_t run = 1;
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i] == sorted[i - 1]) {
            ++run;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    return total + run * (run - 1) / 2;
}

// Stable merge sort that returns the number of inversions (swaps).
std::int64_t sort_count_swaps(std::vector<double>& a, std::vector<double>& buf, std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::int64_t swaps = sort_count_swaps(a, buf, lo, mid) + sort_count_swaps(a, buf, mid, hi);
    std::size_t i = lo;
    std::size_t j = mid;
    std::size_t k = lo;
    while (i < mid && j < hi) {
        if (a[j] < a[i]) {
            buf[k++] = a[j++];
            swaps += static_cast<std::int64_t>(mid - i);
        } else {
            buf[k++] = a[i++];
        }
    }
    while (i < mid) buf[k++] = a[i++];
    while (j < hi) buf[k++] = a[j++];
    std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
              a.begin() + static_cast<std::ptrdiff_t>(lo));
    return swaps;
}

}  // namespace

double empirical_kendall_tau(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ArgumentError("empirical_kendall_tau: length mismatch");
    const std::size_t n = x.size();
    if (n < 2) throw ArgumentError("empirical_kendall_tau: need at least 2 pairs");

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
        return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
    });

    std::vector<double> xs(n);
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = x[perm[i]];
        ys[i] = y[perm[i]];
    }

    const auto n0 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
    const std::int64_t n1 = tied_pairs(xs);

    // pairs tied in both coordinates
    std::int64_t n3 = 0;
    std::int64_t run = 1;
    for (std::size_t i = 1; i < n; ++i) {
        if (xs[i] == xs[i - 1] && ys[i] == ys[i - 1]) {
            ++run;
        } else {
            n3 += run * (run - 1) / 2;
            run = 1;
        }
    }
    n3 += run * (run - 1) / 2;

    std::vector<double> buf(n);
    const std::int64_t swaps = sort_count_swaps(ys, buf, 0, n);
    const std::int64_t n2 = tied_pairs(ys);

    const double numer = static_cast<double>(n0 - n1 - n2 + n3 - 2 * swaps);
    const double denom = std::sqrt(static_cast<double>(n0 - n1)) * std::sqrt(static_cast<double>(n0 - n2));
    if (denom == 0.0) return 0.0;
    return std::clamp(numer / denom, -1.0, 1.0);
}

double kendall_tau_null_sd(std::size_t n) {
    const double m = static_cast<double>(n);
    return std::sqrt(2.0 * (2.0 * m + 5.0) / (9.0 * m * (m - 1.0)));
}

IndepTestResult independence_test(std::span<const double> x, std::span<const double> y, double level) {
    if (x.size() < 10) throw ArgumentError("independence_test: need at least 10 pairs");
    if (!(level > 0.0 && level < 1.0)) throw ArgumentError("independence_test: level must lie in (0,1)");
    IndepTestResult r;
    r.tau_hat = empirical_kendall_tau(x, y);
    r.statistic = std::fabs(r.tau_hat) / kendall_tau_null_sd(x.size());
    r.p_value = std::clamp(2.0 * norm_cdf(-r.statistic), 0.0, 1.0);  // = 2(1 - Phi(T))
    r.reject = r.p_value < level;
    return r;
}

}  // namespace vinecredit
