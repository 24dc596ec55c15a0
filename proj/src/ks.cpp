#include "vinecredit/ks.hpp"

#include "vinecredit/error.hpp"
#include "vinecredit/numeric.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace vinecredit {

std::string_view ks_model_name(KSModel m) {
    switch (m) {
        case KSModel::Normal: return "Normal";
        case KSModel::TruncNormalAt0: return "TruncNormalAt0";
        case KSModel::LogNormal: return "LogNormal";
        case KSModel::Gamma: return "Gamma";
        case KSModel::Exponential: return "Exponential";
        case KSModel::Weibull: return "Weibull";
    }
    return "?";
}

namespace {

double mle_sd(std::span<const double> x, double m) {
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size()));
}

void check_support(std::span<const double> x, KSModel model) {
    const bool strict = model == KSModel::LogNormal || model == KSModel::Gamma || model == KSModel::Weibull;
    const bool nonneg = strict || model == KSModel::Exponential || model == KSModel::TruncNormalAt0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i])) throw ArgumentError("bootstrap_ks: non-finite value at index " + std::to_string(i));
        if (nonneg && (x[i] < 0.0 || (strict && x[i] == 0.0))) {
            throw ArgumentError("bootstrap_ks: " + std::string(ks_model_name(model)) +
                                " requires positive data; index " + std::to_string(i) + " is " +
                                std::to_string(x[i]));
        }
    }
}

FittedModel fit_trunc_normal(std::span<const double> x) {
    const double m = mean(x);
    const double s = mle_sd(x, m);
    auto ll = [&](std::span<const double> p) {
        const double mu = p[0];
        const double sigma = p[1];
        const double tail = norm_cdf(mu / sigma);
        if (!(tail > 0.0)) return -std::numeric_limits<double>::infinity();
        double acc = 0.0;
        for (double v : x) {
            const double z = (v - mu) / sigma;
            acc -= 0.5 * z * z;
        }
        return acc - static_cast<double>(x.size()) * (std::log(sigma) + std::log(tail));
    };
    const std::vector<double> lower{m - 20.0 * s, 0.05 * s};
    const std::vector<double> upper{m + 5.0 * s, 20.0 * s};
    const MaximizeResult r = maximize_bounded(ll, {m, s}, lower, upper);
    return {KSModel::TruncNormalAt0, r.x[0], r.x[1]};
}

FittedModel fit_gamma(std::span<const double> x) {
    const double m = mean(x);
    double mlog = 0.0;
    for (double v : x) mlog += std::log(v);
    mlog /= static_cast<double>(x.size());
    const double s = std::log(m) - mlog;
    if (!(s > 0.0)) throw ArgumentError("bootstrap_ks: Gamma fit needs non-constant data");
    double k = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
    for (int it = 0; it < 100; ++it) {
        const double f = std::log(k) - boost::math::digamma(k) - s;
        const double fp = 1.0 / k - boost::math::trigamma(k);
        const double next = std::max(k - f / fp, 0.5 * k);
        if (std::fabs(next - k) < 1e-12 * k) {
            k = next;
            break;
        }
        k = next;
    }
    return {KSModel::Gamma, k, m / k};
}

FittedModel fit_weibull(std::span<const double> x) {
    const double xmax = *std::max_element(x.begin(), x.end());
    std::vector<double> ly(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) ly[i] = std::log(x[i] / xmax);
    const double mly = mean(ly);
    auto g = [&](double k) {
        double num = 0.0;
        double den = 0.0;
        for (double l : ly) {
            const double w = std::exp(k * l);
            num += w * l;
            den += w;
        }
        return num / den - 1.0 / k - mly;
    };
    double lo = 0.05;
    double hi = 5.0;
    while (g(lo) > 0.0 && lo > 1e-6) lo *= 0.5;
    while (g(hi) < 0.0 && hi < 1e4) hi *= 2.0;
    const double k = find_root(g, lo, hi, RootOptions{1e-12, 300});
    double sw = 0.0;
    for (double l : ly) sw += std::exp(k * l);
    const double scale = xmax * std::pow(sw / static_cast<double>(x.size()), 1.0 / k);
    return {KSModel::Weibull, k, scale};
}

}  // namespace

FittedModel fit_ks_model(std::span<const double> data, KSModel model) {
    if (data.size() < 5) throw ArgumentError("bootstrap_ks: need at least 5 observations");
    check_support(data, model);
    const double m = mean(data);
    const double s = mle_sd(data, m);
    if (!(s > 0.0)) throw ArgumentError("bootstrap_ks: data have zero spread");
    switch (model) {
        case KSModel::Normal: return {model, m, s};
        case KSModel::TruncNormalAt0: return fit_trunc_normal(data);
        case KSModel::LogNormal: {
            std::vector<double> lx(data.size());
            std::transform(data.begin(), data.end(), lx.begin(), [](double v) { return std::log(v); });
            const double lm = mean(lx);
            return {model, lm, mle_sd(lx, lm)};
        }
        case KSModel::Gamma: return fit_gamma(data);
        case KSModel::Exponential: return {model, 1.0 / m, 0.0};
        case KSModel::Weibull: return fit_weibull(data);
    }
    throw ArgumentError("bootstrap_ks: unknown model");
}

double model_cdf(const FittedModel& f, double x) {
    switch (f.model) {
        case KSModel::Normal: return norm_cdf((x - f.p1) / f.p2);
        case KSModel::TruncNormalAt0:
            if (x <= 0.0) return 0.0;
            return 1.0 - norm_cdf(-(x - f.p1) / f.p2) / norm_cdf(f.p1 / f.p2);
        case KSModel::LogNormal: return x <= 0.0 ? 0.0 : norm_cdf((std::log(x) - f.p1) / f.p2);
        case KSModel::Gamma: return x <= 0.0 ? 0.0 : boost::math::gamma_p(f.p1, x / f.p2);
        case KSModel::Exponential: return x <= 0.0 ? 0.0 : -std::expm1(-f.p1 * x);
        case KSModel::Weibull: return x <= 0.0 ? 0.0 : -std::expm1(-std::pow(x / f.p2, f.p1));
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double sample_model(const FittedModel& f, RandomStream& rng) {
    switch (f.model) {
        case KSModel::Normal: return f.p1 + f.p2 * rng.normal();
        case KSModel::TruncNormalAt0: {
            // tail inversion: P(Z > t) / P(Z > -mu/sigma)
            const double z = -norm_quantile(rng.uniform() * norm_cdf(f.p1 / f.p2));
            return std::max(f.p1 + f.p2 * z, std::numeric_limits<double>::min());
        }
        case KSModel::LogNormal: return std::exp(f.p1 + f.p2 * rng.normal());
        case KSModel::Gamma: return rng.gamma(f.p1, f.p2);
        case KSModel::Exponential: return -std::log(rng.uniform()) / f.p1;
        case KSModel::Weibull: return f.p2 * std::pow(-std::log(rng.uniform()), 1.0 / f.p1);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double ks_statistic(std::span<const double> data, const std::function<double(double)>& cdf) {
    if (data.empty()) throw ArgumentError("ks_statistic: empty data");
    std::vector<double> x(data.begin(), data.end());
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double kolmogorov_pvalue(double d, std::size_t n) {
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

KSEntry bootstrap_ks(std::span<const double> data, KSModel model, int n_boot, std::uint64_t seed, double level) {
    if (n_boot < 100) throw ArgumentError("bootstrap_ks: n_boot must be at least 100");
    if (!(level > 0.0 && level < 1.0)) throw ArgumentError("bootstrap_ks: level must lie in (0,1)");
    const FittedModel full = fit_ks_model(data, model);
    const std::size_t n = data.size();
    std::vector<double> draw(n);
    std::vector<double> resample(n);

    auto refit_statistic = [&](std::span<const double> x) {
        const FittedModel f = fit_ks_model(x, model);
        return ks_statistic(x, [&](double v) { return model_cdf(f, v); });
    };

    std::vector<double> null_stats(static_cast<std::size_t>(n_boot));
    for (int b = 0; b < n_boot; ++b) {
        RandomStream rng(derive_seed(seed, 2 * static_cast<std::uint64_t>(b) + 1));
        for (auto& v : draw) v = sample_model(full, rng);
        for (auto& v : resample) v = draw[rng.index(n)];
        null_stats[static_cast<std::size_t>(b)] = refit_statistic(resample);
    }
    std::sort(null_stats.begin(), null_stats.end());

    double p_sum = 0.0;
    int kept = 0;
    for (int b = 0; b < n_boot; ++b) {
        RandomStream rng(derive_seed(seed, 2 * static_cast<std::uint64_t>(b)));
        for (auto& v : resample) v = data[rng.index(n)];
        const double d = refit_statistic(resample);
        const auto exceed = null_stats.end() - std::lower_bound(null_stats.begin(), null_stats.end(), d);
        const double p = (1.0 + static_cast<double>(exceed)) / (1.0 + n_boot);
        p_sum += p;
        if (p >= level) ++kept;
    }
    KSEntry out;
    out.name = std::string(ks_model_name(model));
    out.avg_p_value = p_sum / n_boot;
    out.pct_non_rejected = static_cast<double>(kept) / n_boot;
    return out;
}

}  // namespace vinecredit
