#include "vinecredit/numeric.hpp"

#include "vinecredit/error.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace vinecredit {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
}  // namespace

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double norm_quantile(double p) {
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    if (p >= 1.0) return std::numeric_limits<double>::infinity();
    return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

double student_t_pdf(double x, double nu) {
    return boost::math::pdf(boost::math::students_t_distribution<double>(nu), x);
}

double student_t_cdf(double x, double nu) {
    return boost::math::cdf(boost::math::students_t_distribution<double>(nu), x);
}

double student_t_quantile(double p, double nu) {
    return boost::math::quantile(boost::math::students_t_distribution<double>(nu), p);
}

double find_root(const std::function<double(double)>& f, double lo, double hi, const RootOptions& opts) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (!(std::isfinite(flo) && std::isfinite(fhi)) || (flo > 0.0) == (fhi > 0.0)) {
        std::ostringstream msg;
        msg << "find_root: bracket [" << lo << ", " << hi << "] does not straddle a root (f(lo)=" << flo
            << ", f(hi)=" << fhi << ")";
        throw NumericError(msg.str());
    }
    std::uintmax_t iters = static_cast<std::uintmax_t>(opts.max_iter);
    const double tol = opts.abs_tol;
    auto stop = [tol](double a, double b) { return std::fabs(b - a) <= tol; };
    auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, stop, iters);
    if (iters >= static_cast<std::uintmax_t>(opts.max_iter) && !stop(a, b)) {
        std::ostringstream msg;
        msg << "find_root: no convergence after " << opts.max_iter << " iterations, bracket [" << a << ", "
            << b << "]";
        throw NumericError(msg.str());
    }
    // Pick the endpoint with the smaller residual rather than the midpoint.
    const double fa = f(a);
    const double fb = f(b);
    const double mid = 0.5 * (a + b);
    const double fm = f(mid);
    if (std::fabs(fm) <= std::fabs(fa) && std::fabs(fm) <= std::fabs(fb)) return mid;
    return std::fabs(fa) <= std::fabs(fb) ? a : b;
}

namespace {

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double to_box(double z, double lo, double hi) { return lo + (hi - lo) * logistic(z); }

double from_box(double x, double lo, double hi) {
    double t = (x - lo) / (hi - lo);
    t = std::clamp(t, 1e-9, 1.0 - 1e-9);
    return std::log(t / (1.0 - t));
}

}  // namespace

MaximizeResult maximize_bounded(const std::function<double(std::span<const double>)>& f,
                                std::vector<double> start, std::span<const double> lower,
                                std::span<const double> upper, const MaximizeOptions& opts) {
    const std::size_t k = start.size();
    if (k == 0 || lower.size() != k || upper.size() != k) {
        throw ArgumentError("maximize_bounded: dimension mismatch");
    }
    std::vector<double> x(k);
    auto eval = [&](const std::vector<double>& z) {
        for (std::size_t i = 0; i < k; ++i) x[i] = to_box(z[i], lower[i], upper[i]);
        const double v = f(x);
        return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
    };
    auto decode = [&](const std::vector<double>& z) {
        std::vector<double> out(k);
        for (std::size_t i = 0; i < k; ++i) out[i] = to_box(z[i], lower[i], upper[i]);
        return out;
    };

    std::vector<std::vector<double>> simplex(k + 1, std::vector<double>(k));
    for (std::size_t i = 0; i < k; ++i) simplex[0][i] = from_box(start[i], lower[i], upper[i]);
    for (std::size_t j = 1; j <= k; ++j) {
        simplex[j] = simplex[0];
        // step towards the interior so a start on the boundary still explores
        simplex[j][j - 1] += simplex[0][j - 1] > 0.0 ? -opts.initial_step : opts.initial_step;
    }
    std::vector<double> values(k + 1);
    for (std::size_t j = 0; j <= k; ++j) values[j] = eval(simplex[j]);

    std::vector<std::size_t> idx(k + 1);
    MaximizeResult result;
    int iter = 0;
    for (; iter < opts.max_iter; ++iter) {
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
        const std::size_t best = idx.front();
        const std::size_t worst = idx.back();
        const std::size_t second_worst = idx[k - 1];

        const auto xb = decode(simplex[best]);
        double pspread = 0.0;
        double fspread = 0.0;
        for (std::size_t j = 0; j <= k; ++j) {
            const auto xj = decode(simplex[j]);
            for (std::size_t i = 0; i < k; ++i) pspread = std::max(pspread, std::fabs(xj[i] - xb[i]));
            fspread = std::max(fspread, std::fabs(values[j] - values[best]));
        }
        if (std::isfinite(values[best]) && pspread < opts.param_tol && fspread < opts.value_tol) {
            result.converged = true;
            break;
        }

        std::vector<double> centroid(k, 0.0);
        for (std::size_t j = 0; j <= k; ++j) {
            if (j == worst) continue;
            for (std::size_t i = 0; i < k; ++i) centroid[i] += simplex[j][i] / static_cast<double>(k);
        }
        auto along = [&](double t) {
            std::vector<double> z(k);
            for (std::size_t i = 0; i < k; ++i) z[i] = centroid[i] + t * (simplex[worst][i] - centroid[i]);
            return z;
        };

        auto reflected = along(-1.0);
        const double fr = eval(reflected);
        if (fr > values[best]) {
            auto expanded = along(-2.0);
            const double fe = eval(expanded);
            if (fe > fr) {
                simplex[worst] = std::move(expanded);
                values[worst] = fe;
            } else {
                simplex[worst] = std::move(reflected);
                values[worst] = fr;
            }
            continue;
        }
        if (fr > values[second_worst]) {
            simplex[worst] = std::move(reflected);
            values[worst] = fr;
            continue;
        }
        const bool outside = fr > values[worst];
        auto contracted = along(outside ? -0.5 : 0.5);
        const double fc = eval(contracted);
        if (fc > std::max(fr, values[worst]) || (!outside && fc > values[worst])) {
            simplex[worst] = std::move(contracted);
            values[worst] = fc;
            continue;
        }
        // shrink towards the best vertex
        for (std::size_t j = 0; j <= k; ++j) {
            if (j == best) continue;
            for (std::size_t i = 0; i < k; ++i) simplex[j][i] = simplex[best][i] + 0.5 * (simplex[j][i] - simplex[best][i]);
            values[j] = eval(simplex[j]);
        }
    }
    const auto best_it = std::max_element(values.begin(), values.end());
    const std::size_t best = static_cast<std::size_t>(best_it - values.begin());
    result.x = decode(simplex[best]);
    result.value = values[best];
    result.iterations = iter;
    return result;
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    boost::math::quadrature::tanh_sinh<double> integrator;
    double error = 0.0;
    double l1 = 0.0;
    const double value = integrator.integrate(f, a, b, tol, &error, &l1);
    if (!std::isfinite(value)) throw NumericError("integrate: non-finite result");
    return value;
}

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw ArgumentError("quantile_sorted: empty input");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double mean(std::span<const double> x) {
    if (x.empty()) throw ArgumentError("mean: empty input");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    if (x.size() < 2) throw ArgumentError("variance: need at least two values");
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return ss / static_cast<double>(x.size() - 1);
}

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

}  // namespace vinecredit
