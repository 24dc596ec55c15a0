#pragma once

#include "vinecredit/rng.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vinecredit {

enum class KSModel { Normal, TruncNormalAt0, LogNormal, Gamma, Exponential, Weibull };

inline constexpr std::array<KSModel, 6> kAllKSModels = {KSModel::Normal,      KSModel::TruncNormalAt0,
                                                        KSModel::LogNormal,   KSModel::Gamma,
                                                        KSModel::Exponential, KSModel::Weibull};

std::string_view ks_model_name(KSModel m);

/// Maximum-likelihood fit of one of the classical models.
///   Normal, TruncNormalAt0: (mu, sigma) of the parent Normal
///   LogNormal: (mu, sigma) of log x
///   Gamma: (shape, scale);  Exponential: (rate, unused);  Weibull: (shape, scale)
struct FittedModel {
    KSModel model = KSModel::Normal;
    double p1 = 0.0;
    double p2 = 0.0;
};

/// Throws ArgumentError when the data violate the model's support (negative
/// values for the positive models) or are too few / degenerate to fit.
FittedModel fit_ks_model(std::span<const double> data, KSModel model);
double model_cdf(const FittedModel& m, double x);
double sample_model(const FittedModel& m, RandomStream& rng);

/// One-sample Kolmogorov-Smirnov statistic sup |F_n - F|.
double ks_statistic(std::span<const double> data, const std::function<double(double)>& cdf);

/// Asymptotic Kolmogorov p-value with Stephens' small-sample correction.
double kolmogorov_pvalue(double d, std::size_t n);

struct KSEntry {
    std::string name;
    double avg_p_value = 0.0;
    double pct_non_rejected = 0.0;  // fraction of resamples with p >= level
};
using KSReport = std::vector<KSEntry>;

/// Bootstrap KS screening. Each of n_boot nonparametric resamples of the data is
/// refitted by maximum likelihood and its KS statistic is referred to a
/// parametric-bootstrap null: samples drawn from the model fitted to the full
/// data, passed through the same resampling and refitting. The null distribution
/// is built once from n_boot replicates.
KSEntry bootstrap_ks(std::span<const double> data, KSModel model, int n_boot, std::uint64_t seed,
                     double level = 0.05);

}  // namespace vinecredit
