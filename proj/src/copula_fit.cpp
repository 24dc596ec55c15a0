#include "vinecredit/copula_fit.hpp"

#include "vinecredit/numeric.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vinecredit {

double aic_of(int n_params, double loglik) { return 2.0 * n_params - 2.0 * loglik; }

CandidateSet default_candidates() {
    CandidateSet out;
    for (Family f : kAllFamilies) {
        if (f == Family::Independence) continue;
        for (Rotation r : kAllRotations) {
            if (rotation_allowed(f, r)) out.push_back({f, r});
        }
    }
    return out;
}

namespace {

bool is_negative_rotation(Rotation r) { return r == Rotation::Rot90 || r == Rotation::Rot270; }

struct SearchBox {
    std::array<double, 2> lower{};
    std::array<double, 2> upper{};
};

// Closed search box inside the admissible box. Frank is restricted to the
// side matching the sign of the empirical tau.
SearchBox search_box(Family f, double tau_hat) {
    const ParamBox b = param_box(f);
    auto inner = [](double lo, double hi, bool open_lo, bool open_hi) {
        const double eps = 1e-7 * std::max(1.0, hi - lo);
        return std::pair{open_lo ? lo + eps : lo, open_hi ? hi - eps : hi};
    };
    SearchBox s;
    auto [l1, u1] = inner(b.lower1, b.upper1, b.open_lower1, b.open_upper1);
    auto [l2, u2] = inner(b.lower2, b.upper2, b.open_lower2, b.open_upper2);
    if (f == Family::Frank) {
        l1 = tau_hat >= 0.0 ? 1e-4 : -35.0 + 1e-6;
        u1 = tau_hat >= 0.0 ? 35.0 - 1e-6 : -1e-4;
    }
    s.lower = {l1, l2};
    s.upper = {u1, u2};
    return s;
}

std::array<double, 2> default_start(FamilyRotation kind, double tau_hat) {
    const ParamBox b = param_box(kind.family);
    const double base_tau = is_negative_rotation(kind.rotation) ? -tau_hat : tau_hat;
    const double theta2 = family_param_count(kind.family) == 2 ? b.lower2 + 0.1 : 0.0;
    return {invert_tau_first_param(kind.family, base_tau, theta2), theta2};
}

// Second derivative matrix of the log-likelihood by central differences.
// Returns false when a step would leave the search box.
bool observed_information_se(const std::function<double(std::span<const double>)>& ll, std::span<const double> x,
                             const SearchBox& box, std::array<double, 2>& se) {
    const std::size_t k = x.size();
    std::array<double, 2> h{};
    for (std::size_t i = 0; i < k; ++i) {
        h[i] = 1e-4 * std::max(1.0, std::fabs(x[i]));
        if (x[i] - h[i] < box.lower[i] || x[i] + h[i] > box.upper[i]) return false;
    }
    std::vector<double> p(x.begin(), x.end());
    auto at = [&](double d0, double d1) {
        p[0] = x[0] + d0;
        if (k == 2) p[1] = x[1] + d1;
        return ll(p);
    };
    const double f0 = at(0.0, 0.0);
    std::array<std::array<double, 2>, 2> hess{};
    hess[0][0] = (at(h[0], 0.0) - 2.0 * f0 + at(-h[0], 0.0)) / (h[0] * h[0]);
    if (k == 2) {
        hess[1][1] = (at(0.0, h[1]) - 2.0 * f0 + at(0.0, -h[1])) / (h[1] * h[1]);
        hess[0][1] = hess[1][0] =
            (at(h[0], h[1]) - at(h[0], -h[1]) - at(-h[0], h[1]) + at(-h[0], -h[1])) / (4.0 * h[0] * h[1]);
    }
    if (k == 1) {
        if (!(hess[0][0] < 0.0)) return false;
        se[0] = std::sqrt(-1.0 / hess[0][0]);
        return true;
    }
    // covariance = inverse of the negative Hessian
    const double a = -hess[0][0];
    const double b = -hess[0][1];
    const double d = -hess[1][1];
    const double det = a * d - b * b;
    if (!(a > 0.0 && det > 0.0)) return false;
    se[0] = std::sqrt(d / det);
    se[1] = std::sqrt(a / det);
    return true;
}

// Profile likelihood for the t copula: bounded Brent search over the degrees of
// freedom, each step maximising over the correlation with the t quantiles of
// the data computed once.
MaximizeResult fit_student_t(std::span<const double> u, std::span<const double> v, const SearchBox& box) {
    std::vector<double> x(u.size());
    std::vector<double> y(v.size());
    MaximizeResult best_inner;
    int total_iterations = 0;
    bool all_converged = true;
    auto profile = [&](double nu) {
        for (std::size_t i = 0; i < u.size(); ++i) {
            x[i] = student_t_quantile(clamp_unit(u[i]), nu);
            y[i] = student_t_quantile(clamp_unit(v[i]), nu);
        }
        auto neg_ll = [&](double rho) {
            const double value = detail::student_t_loglik_from_quantiles(rho, nu, x, y);
            return std::isfinite(value) ? -value : std::numeric_limits<double>::infinity();
        };
        std::uintmax_t inner_iter = 200;
        const auto [rho, neg] = boost::math::tools::brent_find_minima(neg_ll, box.lower[0], box.upper[0], 40, inner_iter);
        MaximizeResult inner;
        inner.x = {rho};
        inner.value = -neg;
        inner.iterations = static_cast<int>(inner_iter);
        inner.converged = inner_iter < 200;
        total_iterations += inner.iterations;
        all_converged = all_converged && inner.converged;
        return inner;
    };
    std::uintmax_t max_iter = 100;
    // 24 bits: relative tolerance ~1e-7 on the degrees of freedom
    const auto [nu_hat, neg_ll] = boost::math::tools::brent_find_minima(
        [&](double nu) { return -profile(nu).value; }, box.lower[1], box.upper[1], 24, max_iter);
    best_inner = profile(nu_hat);
    MaximizeResult out;
    out.x = {best_inner.x[0], nu_hat};
    out.value = best_inner.value;
    out.iterations = total_iterations + static_cast<int>(max_iter);
    out.converged = all_converged && max_iter < 100 && std::isfinite(neg_ll);
    return out;
}

}  // namespace

namespace {

std::function<double(std::span<const double>)> loglik_of(FamilyRotation kind, std::span<const double> u,
                                                        std::span<const double> v) {
    const int k = family_param_count(kind.family);
    return [kind, k, u, v](std::span<const double> x) {
        PairCopula c{kind.family, kind.rotation, x[0], k == 2 ? x[1] : 0.0};
        if (!is_valid(c)) return -std::numeric_limits<double>::infinity();
        const double value = copula_loglik(c, u, v);
        return std::isfinite(value) ? value : -std::numeric_limits<double>::infinity();
    };
}

void attach_std_error(FitResult& r, std::span<const double> u, std::span<const double> v, double tau_hat) {
    if (r.at_boundary || r.n_params == 0) return;
    const FamilyRotation kind = r.copula.kind();
    const SearchBox box = search_box(kind.family, is_negative_rotation(kind.rotation) ? -tau_hat : tau_hat);
    std::vector<double> x{r.copula.theta1};
    if (r.n_params == 2) x.push_back(r.copula.theta2);
    observed_information_se(loglik_of(kind, u, v), x, box, r.std_error);
}

FitResult fit_core(FamilyRotation kind, std::span<const double> u, std::span<const double> v,
                   std::optional<std::array<double, 2>> start, double tau_hat, bool with_se) {
    FitResult result;
    result.small_sample = u.size() < 30;
    result.copula = PairCopula{kind.family, kind.rotation, 0.0, 0.0};
    const int k = family_param_count(kind.family);
    result.n_params = k;
    if (k == 0) {
        result.loglik = 0.0;
        result.aic = aic_of(0, 0.0);
        return result;
    }

    const SearchBox box = search_box(kind.family, is_negative_rotation(kind.rotation) ? -tau_hat : tau_hat);
    std::array<double, 2> x0 = start.value_or(default_start(kind, tau_hat));
    for (int i = 0; i < k; ++i) x0[i] = std::clamp(x0[i], box.lower[i], box.upper[i]);

    const auto ll = loglik_of(kind, u, v);

    const std::span<const double> lower(box.lower.data(), static_cast<std::size_t>(k));
    const std::span<const double> upper(box.upper.data(), static_cast<std::size_t>(k));
    const MaximizeResult opt =
        kind.family == Family::StudentT
            ? fit_student_t(u, v, box)
            : maximize_bounded(ll, std::vector<double>(x0.begin(), x0.begin() + k), lower, upper);

    result.copula.theta1 = opt.x[0];
    if (k == 2) result.copula.theta2 = opt.x[1];
    result.loglik = opt.value;
    result.aic = aic_of(k, result.loglik);
    result.iterations = opt.iterations;
    for (int i = 0; i < k; ++i) {
        const double tol = 1e-4 * (box.upper[i] - box.lower[i]);
        if (opt.x[i] - box.lower[i] < tol || box.upper[i] - opt.x[i] < tol) result.at_boundary = true;
    }
    if (with_se) attach_std_error(result, u, v, tau_hat);

    if (!opt.converged || !std::isfinite(result.loglik)) {
        std::ostringstream msg;
        msg << "fit_mle " << describe(result.copula) << ": optimiser did not converge after " << opt.iterations
            << " iterations (loglik " << result.loglik << ")";
        throw FitError(msg.str(), result);
    }
    return result;
}

void check_fit_inputs(FamilyRotation kind, std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw ArgumentError("fit_mle: size mismatch");
    if (u.size() < 2) throw ArgumentError("fit_mle: need at least 2 observations");
    if (!rotation_allowed(kind.family, kind.rotation)) {
        throw DomainError(std::string("fit_mle: rotation not allowed for ") + std::string(family_name(kind.family)));
    }
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!(u[i] > 0.0 && u[i] < 1.0 && v[i] > 0.0 && v[i] < 1.0)) {
            throw ArgumentError("fit_mle: pseudo-observations must lie in (0,1)");
        }
    }
}

}  // namespace

FitResult fit_mle(FamilyRotation kind, std::span<const double> u, std::span<const double> v,
                  std::optional<std::array<double, 2>> start) {
    check_fit_inputs(kind, u, v);
    const double tau_hat = empirical_kendall_tau(u, v);
    return fit_core(kind, u, v, start, tau_hat, true);
}

FitResult select_pair_copula(std::span<const double> u, std::span<const double> v, const CandidateSet& candidates,
                             double level) {
    if (candidates.empty()) throw ArgumentError("select_pair_copula: empty candidate set");
    const IndepTestResult test = independence_test(u, v, level);
    if (!test.reject) {
        FitResult r;
        r.small_sample = u.size() < 30;
        return r;
    }

    CandidateSet menu;
    for (const auto& c : candidates) {
        if (family_is_radially_symmetric(c.family)) {
            menu.push_back(c);
            continue;
        }
        const bool neg = is_negative_rotation(c.rotation);
        if ((test.tau_hat < 0.0) == neg) menu.push_back(c);
    }
    if (menu.empty()) menu = candidates;

    // catalog order for tie-breaking
    std::stable_sort(menu.begin(), menu.end(), [](const FamilyRotation& a, const FamilyRotation& b) {
        return std::pair{a.family, a.rotation} < std::pair{b.family, b.rotation};
    });

    std::optional<FitResult> best;
    std::ostringstream failures;
    for (const auto& kind : menu) {
        FitResult fit;
        try {
            check_fit_inputs(kind, u, v);
            fit = fit_core(kind, u, v, std::nullopt, test.tau_hat, false);
        } catch (const FitError& e) {
            // an unconverged optimiser still offers a valid likelihood lower bound
            fit = e.best();
            if (!std::isfinite(fit.loglik)) {
                failures << "\n  " << e.what();
                continue;
            }
        } catch (const NumericError& e) {
            failures << "\n  " << e.what();
            continue;
        }
        if (!best || fit.aic < best->aic || (fit.aic == best->aic && fit.n_params < best->n_params)) {
            best = fit;
        }
    }
    if (!best) throw NumericError("select_pair_copula: every candidate fit failed:" + failures.str());
    attach_std_error(*best, u, v, test.tau_hat);
    return *best;
}

}  // namespace vinecredit
