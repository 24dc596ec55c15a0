#pragma once

#include <span>

namespace vinecredit {

/// Kendall's tau-b of paired samples, O(n log n) (Knight's merge-sort count).
/// Throws ArgumentError for n < 2 or mismatched lengths.
double empirical_kendall_tau(std::span<const double> x, std::span<const double> y);

/// Asymptotic standard deviation of tau-hat under independence,
/// sqrt(2(2n+5) / (9n(n-1))).
double kendall_tau_null_sd(std::size_t n);

struct IndepTestResult {
    double tau_hat = 0.0;
    double statistic = 0.0;
    double p_value = 1.0;
    bool reject = false;
};

inline constexpr double kDefaultIndepLevel = 0.05;

/// Genest-Favre asymptotic independence test based on Kendall's tau.
/// Requires n >= 10.
IndepTestResult independence_test(std::span<const double> x, std::span<const double> y,
                                  double level = kDefaultIndepLevel);

}  // namespace vinecredit
