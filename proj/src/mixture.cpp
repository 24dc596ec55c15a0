#include "vinecredit/mixture.hpp"

#include "vinecredit/copula.hpp"
#include "vinecredit/error.hpp"
#include "vinecredit/numeric.hpp"
#include "vinecredit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace vinecredit {

double MixtureParams::sigma() const { return std::sqrt(sigma2); }

bool MixtureParams::identified() const { return mu1 < mu2 && eta1 > 0.0 && eta1 < 1.0 && sigma2 > 0.0; }

void MixturePriors::validate() const {
    const bool ok = alpha1 > 0.0 && alpha2 > 0.0 && B1 > 0.0 && B2 > 0.0 && nu > 0.0 && S > 0.0 &&
                    std::isfinite(b1) && std::isfinite(b2) && std::isfinite(B1) && std::isfinite(B2) &&
                    std::isfinite(S);
    if (!ok) throw ArgumentError("mixture priors: concentrations, variances, nu and S must be positive and finite");
}

namespace {

// Scale floor so constant series still yield proper priors.
double spread_floor(std::span<const double> data, double var) {
    const double m = mean(data);
    return std::max(var, 1e-12 * std::max(1.0, m * m));
}

}  // namespace

MixturePriors vague_priors(std::span<const double> data) {
    if (data.size() < 2) throw ArgumentError("vague_priors: need at least two observations");
    const double m = mean(data);
    const double var = spread_floor(data, variance(data));
    MixturePriors p;
    p.alpha1 = p.alpha2 = 1.0;
    p.b1 = p.b2 = m;
    p.B1 = p.B2 = 10.0 * var;
    p.nu = 2.0;
    p.S = var;
    return p;
}

void summarize(MixturePosterior& post) {
    const std::size_t m = post.draws.size();
    if (m == 0) throw ArgumentError("summarize: no posterior draws");
    std::vector<double> eta(m);
    std::vector<double> mu1(m);
    std::vector<double> mu2(m);
    std::vector<double> s2(m);
    for (std::size_t i = 0; i < m; ++i) {
        eta[i] = post.draws[i].eta1;
        mu1[i] = post.draws[i].mu1;
        mu2[i] = post.draws[i].mu2;
        s2[i] = post.draws[i].sigma2;
    }
    post.posterior_mean = {mean(eta), mean(mu1), mean(mu2), mean(s2)};
    auto interval = [](std::vector<double>& v) {
        std::sort(v.begin(), v.end());
        return CredibleInterval{quantile_sorted(v, 0.025), quantile_sorted(v, 0.975)};
    };
    post.eta1_ci = interval(eta);
    post.mu1_ci = interval(mu1);
    post.mu2_ci = interval(mu2);
    post.sigma2_ci = interval(s2);
}

namespace detail {

double draw_weight(double alpha1, double alpha2, std::size_t n1, std::size_t n2, RandomStream& rng) {
    const double g1 = rng.gamma(alpha1 + static_cast<double>(n1));
    const double g2 = rng.gamma(alpha2 + static_cast<double>(n2));
    return std::clamp(g1 / (g1 + g2), 1e-300, 1.0 - 1e-16);
}

double draw_component_mean(double b, double B, std::size_t np, double sum, double sigma2, RandomStream& rng) {
    const double prec = 1.0 / B + static_cast<double>(np) / sigma2;
    const double m = (b / B + sum / sigma2) / prec;
    return m + rng.normal() / std::sqrt(prec);
}

double draw_shared_variance(double nu, double S, std::size_t n, double ssr, RandomStream& rng) {
    const double shape = 0.5 * (nu + static_cast<double>(n));
    const double rate = 0.5 * (nu * S + ssr);
    return rate / rng.gamma(shape);
}

}  // namespace detail

MixturePosterior gibbs_fit_mixture(std::span<const double> data, const MixturePriors& priors, int iterations,
                                   int burnin, std::uint64_t seed) {
    const std::size_t n = data.size();
    if (n < 20) throw ArgumentError("gibbs_fit_mixture: need at least 20 observations, got " + std::to_string(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(data[i])) {
            throw ArgumentError("gibbs_fit_mixture: non-finite observation at index " + std::to_string(i));
        }
    }
    if (burnin < 0 || iterations <= burnin) {
        throw ArgumentError("gibbs_fit_mixture: require 0 <= burnin < iterations");
    }
    priors.validate();

    std::vector<double> sorted(data.begin(), data.end());
    std::sort(sorted.begin(), sorted.end());
    const double raw_var = variance(data);

    MixtureParams cur;
    cur.eta1 = 0.5;
    cur.mu1 = quantile_sorted(sorted, 0.25);
    cur.mu2 = quantile_sorted(sorted, 0.75);
    cur.sigma2 = spread_floor(data, raw_var);
    if (!(cur.mu1 < cur.mu2)) cur.mu2 = cur.mu1 + std::sqrt(cur.sigma2);

    RandomStream rng(seed);
    MixturePosterior post;
    post.burnin = static_cast<std::size_t>(burnin);
    post.draws.reserve(static_cast<std::size_t>(iterations - burnin));
    post.membership_prob1.assign(n, 0.0);
    std::vector<unsigned char> z(n);
    std::size_t empty_draws = 0;

    for (int it = 0; it < iterations; ++it) {
        const bool keep = it >= burnin;

        // (i) allocations given the current (identified) parameters
        const double inv2s2 = 0.5 / cur.sigma2;
        const double log_eta1 = std::log(cur.eta1);
        const double log_eta2 = std::log(cur.eta2());
        std::size_t n1 = 0;
        double sum1 = 0.0;
        double sum2 = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double d1 = data[t] - cur.mu1;
            const double d2 = data[t] - cur.mu2;
            const double l1 = log_eta1 - d1 * d1 * inv2s2;
            const double l2 = log_eta2 - d2 * d2 * inv2s2;
            const double p1 = 1.0 / (1.0 + std::exp(l2 - l1));
            if (keep) post.membership_prob1[t] += p1;
            z[t] = rng.uniform() < p1 ? 1 : 2;
            if (z[t] == 1) {
                ++n1;
                sum1 += data[t];
            } else {
                sum2 += data[t];
            }
        }
        const std::size_t n2 = n - n1;

        // (ii) mixing weights
        cur.eta1 = detail::draw_weight(priors.alpha1, priors.alpha2, n1, n2, rng);

        // (iii) component means at the shared variance
        cur.mu1 = detail::draw_component_mean(priors.b1, priors.B1, n1, sum1, cur.sigma2, rng);
        cur.mu2 = detail::draw_component_mean(priors.b2, priors.B2, n2, sum2, cur.sigma2, rng);

        // (iv) shared variance from pooled residuals
        double ssr = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double d = data[t] - (z[t] == 1 ? cur.mu1 : cur.mu2);
            ssr += d * d;
        }
        cur.sigma2 = detail::draw_shared_variance(priors.nu, priors.S, n, ssr, rng);

        // ascending-mean identification
        if (cur.mu1 > cur.mu2) {
            std::swap(cur.mu1, cur.mu2);
            cur.eta1 = 1.0 - cur.eta1;
        } else if (cur.mu1 == cur.mu2) {
            cur.mu2 = std::nextafter(cur.mu2, std::numeric_limits<double>::infinity());
        }

        if (keep) {
            post.draws.push_back(cur);
            if (n1 == 0 || n2 == 0) ++empty_draws;
        }
    }

    const double kept = static_cast<double>(post.draws.size());
    for (double& p : post.membership_prob1) p /= kept;
    post.empty_component_fraction = static_cast<double>(empty_draws) / kept;
    post.degenerate_warning = post.empty_component_fraction > 0.5 || raw_var == 0.0;
    summarize(post);
    return post;
}

double mixture_pdf(const MixtureParams& p, double x) {
    const double s = p.sigma();
    return (p.eta1 * norm_pdf((x - p.mu1) / s) + p.eta2() * norm_pdf((x - p.mu2) / s)) / s;
}

double mixture_cdf(const MixtureParams& p, double x) {
    const double s = p.sigma();
    return p.eta1 * norm_cdf((x - p.mu1) / s) + p.eta2() * norm_cdf((x - p.mu2) / s);
}

double mixture_quantile(const MixtureParams& p, double q) {
    if (!(q > 0.0 && q < 1.0)) throw ArgumentError("mixture_quantile: q must lie in (0,1)");
    if (!(p.sigma2 > 0.0)) throw ArgumentError("mixture_quantile: sigma2 must be positive");
    const double s = p.sigma();
    const double zq = norm_quantile(q);
    // F(min(mu) + s*z_q) <= q <= F(max(mu) + s*z_q)
    const double lo = std::min(p.mu1, p.mu2) + s * zq;
    const double hi = std::max(p.mu1, p.mu2) + s * zq;
    if (!(hi > lo)) return lo;
    auto f = [&](double x) { return mixture_cdf(p, x) - q; };
    const double flo = f(lo);
    const double fhi = f(hi);
    if (flo >= 0.0) return lo;
    if (fhi <= 0.0) return hi;
    // never ask for less than a few ulps of the location
    const double tol = std::max(1e-10 * s, 8.0 * std::numeric_limits<double>::epsilon() *
                                               std::max(std::fabs(lo), std::fabs(hi)));
    return find_root(f, lo, hi, RootOptions{tol, 300});
}

std::vector<double> pit_transform(std::span<const double> data, const MixtureParams& p) {
    std::vector<double> out(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) out[i] = clamp_unit(mixture_cdf(p, data[i]));
    return out;
}

void write_posterior_csv(std::ostream& out, const MixturePosterior& post) {
    out << "iter,eta1,mu1,mu2,sigma2\n";
    for (std::size_t i = 0; i < post.draws.size(); ++i) {
        const auto& d = post.draws[i];
        out << post.burnin + i + 1 << ',' << format_double(d.eta1) << ',' << format_double(d.mu1) << ','
            << format_double(d.mu2) << ',' << format_double(d.sigma2) << '\n';
    }
}

MixturePosterior read_posterior_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("posterior csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "iter,eta1,mu1,mu2,sigma2") throw IoError("posterior csv: unexpected header '" + line + "'");
    MixturePosterior post;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        std::istringstream ss(line);
        std::string cell;
        double values[5];
        for (int c = 0; c < 5; ++c) {
            if (!std::getline(ss, cell, ',')) {
                throw IoError("posterior csv: row " + std::to_string(row) + " has fewer than 5 columns");
            }
            try {
                std::size_t used = 0;
                values[c] = std::stod(cell, &used);
            } catch (const std::exception&) {
                throw IoError("posterior csv: row " + std::to_string(row) + " column " + std::to_string(c + 1) +
                              " is not numeric");
            }
        }
        if (post.draws.empty()) post.burnin = static_cast<std::size_t>(values[0]) - 1;
        post.draws.push_back({values[1], values[2], values[3], values[4]});
    }
    if (post.draws.empty()) throw IoError("posterior csv: no draws");
    summarize(post);
    return post;
}

}  // namespace vinecredit
