#pragma once

#include "vinecredit/rng.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace vinecredit {

/// Two-component location-shift Normal mixture:
/// F(x) = eta1 * Phi((x - mu1)/sigma) + (1 - eta1) * Phi((x - mu2)/sigma).
struct MixtureParams {
    double eta1 = 0.5;
    double mu1 = 0.0;
    double mu2 = 0.0;
    double sigma2 = 1.0;

    double eta2() const { return 1.0 - eta1; }
    double sigma() const;
    /// mu1 < mu2, eta1 in (0,1), sigma2 > 0.
    bool identified() const;
    friend bool operator==(const MixtureParams&, const MixtureParams&) = default;
};

struct MixturePriors {
    double alpha1 = 1.0;
    double alpha2 = 1.0;
    double b1 = 0.0;
    double b2 = 0.0;
    double B1 = 1.0;
    double B2 = 1.0;
    double nu = 2.0;
    double S = 1.0;

    void validate() const;
};

/// Weakly informative, scale-adaptive defaults: alpha = (1,1), b = sample mean,
/// B = 10 * sample variance, nu = 2, S = sample variance.
MixturePriors vague_priors(std::span<const double> data);

struct CredibleInterval {
    double lower = 0.0;
    double upper = 0.0;
    bool contains(double x) const { return x >= lower && x <= upper; }
};

struct MixturePosterior {
    std::vector<MixtureParams> draws;        // post burn-in
    std::vector<double> membership_prob1;    // posterior P(z_t = 1), per observation
    MixtureParams posterior_mean;
    CredibleInterval eta1_ci;
    CredibleInterval mu1_ci;
    CredibleInterval mu2_ci;
    CredibleInterval sigma2_ci;
    std::size_t burnin = 0;
    // a component was empty in more than half of the stored draws, or the data
    // carries no spread at all
    bool degenerate_warning = false;
    double empty_component_fraction = 0.0;
};

/// Summary statistics (mean, 95% central intervals) recomputed from draws.
void summarize(MixturePosterior& post);

namespace detail {
// Full-conditional draws of one Gibbs sweep.
// eta1 ~ Beta(alpha1 + n1, alpha2 + n2)
double draw_weight(double alpha1, double alpha2, std::size_t n1, std::size_t n2, RandomStream& rng);
// mu ~ Normal with precision 1/B + np/sigma2 and mean (b/B + sum/sigma2)/precision
double draw_component_mean(double b, double B, std::size_t np, double sum, double sigma2, RandomStream& rng);
// sigma2 ~ InvGamma((nu + n)/2, (nu*S + ssr)/2)
double draw_shared_variance(double nu, double S, std::size_t n, double ssr, RandomStream& rng);
}  // namespace detail

/// Data-augmentation Gibbs sampler; every stored draw has mu1 < mu2.
MixturePosterior gibbs_fit_mixture(std::span<const double> data, const MixturePriors& priors, int iterations,
                                   int burnin, std::uint64_t seed);

double mixture_pdf(const MixtureParams& p, double x);
double mixture_cdf(const MixtureParams& p, double x);
double mixture_quantile(const MixtureParams& p, double q);

/// u_i = mixture_cdf(x_i), clamped to [1e-10, 1 - 1e-10].
std::vector<double> pit_transform(std::span<const double> data, const MixtureParams& p);

/// CSV with header `iter,eta1,mu1,mu2,sigma2`, one row per stored draw.
void write_posterior_csv(std::ostream& out, const MixturePosterior& post);
/// Reads draws written by write_posterior_csv and recomputes the summary.
MixturePosterior read_posterior_csv(std::istream& in);

}  // namespace vinecredit
