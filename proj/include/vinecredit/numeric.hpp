#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <span>
#include <vector>

namespace vinecredit {

double norm_pdf(double x);
double norm_cdf(double x);
double norm_quantile(double p);

double student_t_pdf(double x, double nu);
double student_t_cdf(double x, double nu);
double student_t_quantile(double p, double nu);

// Root of a monotone-bracketed function on [lo, hi]. Throws NumericError when
// the bracket does not straddle zero or the iteration budget is exhausted.
struct RootOptions {
    double abs_tol = 1e-12;
    int max_iter = 200;
};
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 const RootOptions& opts = {});

// Bounded, derivative-free maximisation (Nelder-Mead on a logistic
// reparameterisation of the box).
struct MaximizeOptions {
    double param_tol = 1e-6;
    double value_tol = 1e-8;
    int max_iter = 500;
    double initial_step = 0.6;
};

struct MaximizeResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

MaximizeResult maximize_bounded(const std::function<double(std::span<const double>)>& f,
                                std::vector<double> start, std::span<const double> lower,
                                std::span<const double> upper, const MaximizeOptions& opts = {});

// Adaptive 1-D quadrature on a finite interval (tanh-sinh, tolerant of endpoint
// singularities).
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-10);

// Empirical quantile with linear interpolation (type 7); `sorted` must be ascending.
double quantile_sorted(std::span<const double> sorted, double q);

double mean(std::span<const double> x);
double variance(std::span<const double> x);  // unbiased

// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double x);

}  // namespace vinecredit
