#pragma once

#include "vinecredit/copula.hpp"
#include "vinecredit/dependence.hpp"
#include "vinecredit/error.hpp"

#include <array>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace vinecredit {

struct FitResult {
    PairCopula copula;
    double loglik = 0.0;
    int n_params = 0;
    double aic = 0.0;  // 2 * n_params - 2 * loglik
    // Observed-information standard errors; NaN when the Hessian is not usable
    // (e.g. parameter on the box boundary).
    std::array<double, 2> std_error{std::numeric_limits<double>::quiet_NaN(),
                                    std::numeric_limits<double>::quiet_NaN()};
    bool at_boundary = false;
    bool small_sample = false;  // fewer than 30 observations
    int iterations = 0;
};

double aic_of(int n_params, double loglik);

/// Thrown when the optimiser exhausts its budget; carries the best iterate.
class FitError : public NumericError {
public:
    FitError(const std::string& what, FitResult best) : NumericError(what), best_(std::move(best)) {}
    const FitResult& best() const { return best_; }

private:
    FitResult best_;
};

using CandidateSet = std::vector<FamilyRotation>;

/// Every parametric family/rotation pair of the catalog, in catalog order.
CandidateSet default_candidates();

/// Maximum-likelihood fit of one family/rotation to pseudo-observations.
/// The optional start gives (theta1, theta2); by default theta1 comes from
/// inverting the empirical Kendall's tau and theta2 sits just above its lower
/// box edge.
FitResult fit_mle(FamilyRotation kind, std::span<const double> u, std::span<const double> v,
                  std::optional<std::array<double, 2>> start = std::nullopt);

/// Genest-Favre gate followed by AIC selection among the candidates.
/// Rotations whose tau sign contradicts the data are skipped (unless that
/// would leave nothing to fit). Ties go to fewer parameters, then catalog order.
FitResult select_pair_copula(std::span<const double> u, std::span<const double> v, const CandidateSet& candidates,
                             double level = kDefaultIndepLevel);

}  // namespace vinecredit
