#include "fixtures.hpp"
#include "oracles.hpp"

#include "vinecredit/copula.hpp"
#include "vinecredit/copula_fit.hpp"
#include "vinecredit/dependence.hpp"
#include "vinecredit/error.hpp"
#include "vinecredit/numeric.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace vinecredit;

namespace {

std::pair<std::vector<double>, std::vector<double>> split(const std::vector<std::pair<double, double>>& pairs) {
    std::vector<double> u, v;
    for (auto [a, b] : pairs) {
        u.push_back(a);
        v.push_back(b);
    }
    return {u, v};
}

std::pair<std::vector<double>, std::vector<double>> draw(const PairCopula& c, std::size_t n, std::uint64_t seed) {
    return split(sample_pair(c, n, seed));
}

}  // namespace

TEST(CopulaDensity, IndependenceIsOne) {
    EXPECT_DOUBLE_EQ(copula_density(PairCopula::independence(), 0.3, 0.7), 1.0);
}

TEST(CopulaDensity, NormalWithZeroCorrelationIsOne) {
    EXPECT_NEAR(copula_density({Family::Normal, Rotation::None, 0.0, 0.0}, 0.2, 0.9), 1.0, 1e-14);
}

TEST(CopulaDensity, ClaytonMatchesDifferencedCdf) {
    const PairCopula c{Family::Clayton, Rotation::None, 2.0, 0.0};
    const double fd = oracle::fd_density([](double u, double v) { return oracle::clayton_cdf(2.0, u, v); }, 0.5, 0.5);
    EXPECT_NEAR(copula_density(c, 0.5, 0.5) / fd, 1.0, 1e-5);
}

TEST(CopulaDensity, ClosedFormCdfsAgreeOnGrid) {
    for (double u : {0.1, 0.35, 0.8}) {
        for (double v : {0.15, 0.5, 0.95}) {
            EXPECT_NEAR(copula_cdf({Family::Clayton, Rotation::None, 1.2256, 0.0}, u, v),
                        oracle::clayton_cdf(1.2256, u, v), 1e-12);
            EXPECT_NEAR(copula_cdf({Family::Frank, Rotation::None, 7.2222, 0.0}, u, v),
                        oracle::frank_cdf(7.2222, u, v), 1e-12);
            EXPECT_NEAR(copula_cdf({Family::Gumbel, Rotation::None, 1.7, 0.0}, u, v),
                        oracle::gumbel_cdf(1.7, u, v), 1e-12);
        }
    }
}

TEST(CopulaDensity, SurvivalRotationReflectsBothArguments) {
    const PairCopula base{Family::Gumbel, Rotation::None, 2.0, 0.0};
    PairCopula surv = base;
    surv.rotation = Rotation::Rot180;
    EXPECT_NEAR(copula_density(surv, 0.2, 0.7), copula_density(base, 0.8, 0.3), 1e-12);
}

TEST(CopulaDensity, NonNegativeOnGridForEveryFamily) {
    for (const PairCopula& c : fixture::catalog_full()) {
        for (int i = 1; i <= 19; ++i) {
            for (int j = 1; j <= 19; ++j) {
                const double d = copula_density(c, i / 20.0, j / 20.0);
                ASSERT_TRUE(d >= 0.0 && std::isfinite(d)) << describe(c);
            }
        }
    }
}

TEST(CopulaDensity, ParameterOutsideBoxIsDomainError) {
    EXPECT_THROW(copula_density({Family::Clayton, Rotation::None, -1.0, 0.0}, 0.5, 0.5), DomainError);
    EXPECT_THROW(copula_density({Family::Frank, Rotation::None, 0.0, 0.0}, 0.5, 0.5), DomainError);
    EXPECT_THROW(copula_density({Family::StudentT, Rotation::None, 0.5, 1.5}, 0.5, 0.5), DomainError);
    EXPECT_THROW(copula_density({Family::Normal, Rotation::Rot90, 0.5, 0.0}, 0.5, 0.5), DomainError);
}

TEST(HFunction, IndependenceReturnsU) {
    EXPECT_DOUBLE_EQ(h_function(PairCopula::independence(), 0.42, 0.8), 0.42);
}

TEST(HFunction, TendsToOneAtUpperEndForEveryFamily) {
    for (const PairCopula& c : fixture::catalog_sample()) {
        EXPECT_NEAR(h_function(c, 1.0 - 1e-12, 0.5), 1.0, 1e-8) << describe(c);
        EXPECT_NEAR(h_function(c, 1e-12, 0.5), 0.0, 1e-8) << describe(c);
    }
}

TEST(HFunction, FrankMatchesDifferencedCdf) {
    const PairCopula c{Family::Frank, Rotation::None, 7.2222, 0.0};
    const double fd = oracle::fd_h([](double u, double v) { return oracle::frank_cdf(7.2222, u, v); }, 0.5, 0.5);
    EXPECT_NEAR(h_function(c, 0.5, 0.5), fd, 1e-6);
}

TEST(HFunction, NondecreasingInUForEveryFamily) {
    for (const PairCopula& c : fixture::catalog_sample()) {
        for (double v : {0.05, 0.5, 0.93}) {
            double prev = 0.0;
            for (int i = 1; i < 200; ++i) {
                const double h = h_function(c, i / 200.0, v);
                ASSERT_GE(h, prev - 1e-12) << describe(c) << " v=" << v;
                prev = h;
            }
        }
    }
}

TEST(HInverse, IndependenceReturnsP) {
    EXPECT_DOUBLE_EQ(h_inverse(PairCopula::independence(), 0.37, 0.9), 0.37);
}

TEST(HInverse, ClaytonReappliedForwardGivesP) {
    const PairCopula c{Family::Clayton, Rotation::None, 1.2256, 0.0};
    const double u = h_inverse(c, 0.25, 0.6);
    EXPECT_LT(std::fabs(h_function(c, u, 0.6) - 0.25), 1e-8);
}

TEST(HInverse, RoundTripOnInteriorGrid) {
    for (const PairCopula& c : fixture::catalog_sample()) {
        for (int i = 1; i <= 9; ++i) {
            for (int j = 1; j <= 9; ++j) {
                const double u = i / 10.0;
                const double v = j / 10.0;
                EXPECT_NEAR(h_inverse(c, h_function(c, u, v), v), u, 1e-8) << describe(c);
                EXPECT_NEAR(h_inverse_first(c, h_function_first(c, u, v), u), v, 1e-8) << describe(c);
            }
        }
    }
}

TEST(SamplePair, IndependenceHasNearZeroTau) {
    const std::size_t n = 10000;
    auto [u, v] = draw(PairCopula::independence(), n, 7);
    EXPECT_LT(std::fabs(empirical_kendall_tau(u, v)), 3.0 * oracle::tau_null_sd(n));
}

TEST(SamplePair, ClaytonTwoHasTauOneHalf) {
    const std::size_t n = 50000;
    auto [u, v] = draw({Family::Clayton, Rotation::None, 2.0, 0.0}, n, 11);
    EXPECT_LT(std::fabs(empirical_kendall_tau(u, v) - 0.5), 3.0 * oracle::tau_null_sd(n));
}

TEST(SamplePair, SameSeedIsBitwiseIdentical) {
    const PairCopula c{Family::BB7, Rotation::Rot90, 1.5, 0.8};
    EXPECT_EQ(sample_pair(c, 500, 99), sample_pair(c, 500, 99));
    EXPECT_NE(sample_pair(c, 500, 99), sample_pair(c, 500, 100));
}

TEST(SamplePair, MarginalsPassUniformKsInMostRuns) {
    const PairCopula c{Family::Joe, Rotation::None, 2.0, 0.0};
    const std::size_t n = 5000;
    int passed = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto [u, v] = draw(c, n, 500 + seed);
        bool ok = true;
        for (auto* col : {&u, &v}) {
            std::sort(col->begin(), col->end());
            double d = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                d = std::max({d, std::fabs((*col)[i] - static_cast<double>(i) / n),
                              std::fabs((*col)[i] - static_cast<double>(i + 1) / n)});
            }
            // 1% critical value of the Kolmogorov statistic
            ok = ok && d < 1.628 / std::sqrt(static_cast<double>(n));
        }
        passed += ok;
    }
    EXPECT_GE(passed, 19);
}

TEST(KendallTauOf, PublishedFitValues) {
    EXPECT_NEAR(kendall_tau_of({Family::Frank, Rotation::None, 7.2222, 0.0}), 0.5718, 1e-3);
    EXPECT_NEAR(kendall_tau_of({Family::Clayton, Rotation::None, 1.2256, 0.0}), 0.3800, 1e-3);
    EXPECT_NEAR(kendall_tau_of({Family::StudentT, Rotation::None, 0.9868, 7.6539}), 0.8963, 1e-3);
    EXPECT_NEAR(kendall_tau_of({Family::Normal, Rotation::None, -0.0337, 0.0}), -0.0214, 1e-3);
    EXPECT_NEAR(kendall_tau_of({Family::BB7, Rotation::None, 2.4309, 5.3880}), 0.7267, 1e-3);
    EXPECT_NEAR(kendall_tau_of({Family::BB8, Rotation::None, 5.9831, 0.9979}), 0.7208, 1e-3);
    EXPECT_NEAR(kendall_tau_of({Family::BB1, Rotation::None, 0.4325, 4.2015}), 0.8043, 1e-3);
}

TEST(KendallTauOf, ClosedFormIdentitiesHoldExactly) {
    for (double t : {0.1, 1.0, 2.0, 7.5}) {
        EXPECT_EQ(kendall_tau_of({Family::Clayton, Rotation::None, t, 0.0}), t / (t + 2.0));
    }
    for (double t : {1.1, 2.0, 5.0}) EXPECT_EQ(kendall_tau_of({Family::Gumbel, Rotation::None, t, 0.0}), 1.0 - 1.0 / t);
    for (double r : {-0.7, 0.0, 0.45}) {
        EXPECT_EQ(kendall_tau_of({Family::Normal, Rotation::None, r, 0.0}), 2.0 / M_PI * std::asin(r));
    }
}

TEST(KendallTauOf, RotationsNegateOrPreserveExactly) {
    for (Family f : kAllFamilies) {
        if (!rotation_allowed(f, Rotation::Rot90)) continue;
        for (PairCopula c : fixture::parameter_points(f)) {
            const double tau = kendall_tau_of(c);
            c.rotation = Rotation::Rot180;
            EXPECT_EQ(kendall_tau_of(c), tau);
            c.rotation = Rotation::Rot90;
            EXPECT_EQ(kendall_tau_of(c), -tau);
            c.rotation = Rotation::Rot270;
            EXPECT_EQ(kendall_tau_of(c), -tau);
        }
    }
}

TEST(KendallTauOf, NumericFamiliesMatchTwoDimensionalQuadrature) {
    for (Family f : {Family::Joe, Family::BB1, Family::BB6, Family::BB7, Family::BB8}) {
        for (const PairCopula& c : fixture::parameter_points(f)) {
            const double quad = oracle::tau_by_quadrature([&](double u, double v) { return h_function_first(c, u, v); },
                                                          [&](double u, double v) { return h_function(c, u, v); });
            EXPECT_NEAR(kendall_tau_of(c), quad, 1e-4) << describe(c);
        }
    }
}

TEST(KendallTauOf, MatchesEmpiricalTauOnLargeSamples) {
    const std::size_t n = 100000;
    std::uint64_t seed = 1;
    for (const PairCopula& c : fixture::catalog_sample()) {
        auto [u, v] = draw(c, n, seed++);
        EXPECT_LT(std::fabs(empirical_kendall_tau(u, v) - kendall_tau_of(c)), 3.0 * oracle::tau_null_sd(n))
            << describe(c);
    }
}

TEST(KendallTauOf, InversionRecoversFirstParameter) {
    for (Family f : {Family::Normal, Family::Clayton, Family::Gumbel, Family::Frank, Family::Joe}) {
        for (const PairCopula& c : fixture::parameter_points(f)) {
            EXPECT_NEAR(invert_tau_first_param(f, kendall_tau_of(c), 0.0), c.theta1, 1e-6 * (1.0 + std::fabs(c.theta1)));
        }
    }
}

TEST(EmpiricalTau, IncreasingPairsGiveOne) {
    std::vector<double> x{1, 2, 3, 4, 5}, y{2, 4, 8, 16, 32};
    EXPECT_DOUBLE_EQ(empirical_kendall_tau(x, y), 1.0);
}

TEST(EmpiricalTau, ThreePointExampleIsOneThird) {
    std::vector<double> x{1, 2, 3}, y{1, 3, 2};
    EXPECT_NEAR(empirical_kendall_tau(x, y), 1.0 / 3.0, 1e-15);
}

TEST(EmpiricalTau, ReversedGivesMinusOne) {
    std::vector<double> x{0.3, 0.1, 0.9, 0.5}, y;
    for (double a : x) y.push_back(-a);
    EXPECT_DOUBLE_EQ(empirical_kendall_tau(x, y), -1.0);
}

TEST(EmpiricalTau, TiesUseTauB) {
    std::vector<double> x{1, 1, 2}, y{1, 2, 3};
    EXPECT_NEAR(empirical_kendall_tau(x, y), 2.0 / std::sqrt(6.0), 1e-15);
}

TEST(EmpiricalTau, MatchesPairCounting) {
    auto [u, v] = draw({Family::Frank, Rotation::None, -3.0, 0.0}, 1500, 3);
    EXPECT_NEAR(empirical_kendall_tau(u, v), oracle::pair_count_tau(u, v), 1e-12);
}

TEST(EmpiricalTau, TooFewPointsIsArgumentError) {
    std::vector<double> x{1.0}, y{2.0};
    EXPECT_THROW(empirical_kendall_tau(x, y), ArgumentError);
}

TEST(IndependenceTest, ZeroTauGivesPValueOne) {
    // concordant and discordant pairs balance exactly
    std::vector<double> x{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}, y{9, 4, 10, 6, 8, 1, 2, 11, 7, 3, 12, 5};
    ASSERT_EQ(oracle::pair_count_tau(x, y), 0.0);
    const auto r = independence_test(x, y, 0.05);
    EXPECT_EQ(r.p_value, 1.0);
    EXPECT_FALSE(r.reject);
}

TEST(IndependenceTest, StatisticFollowsFormula) {
    auto [u, v] = draw({Family::Clayton, Rotation::None, 2.0, 0.0}, 100, 21);
    const auto r = independence_test(u, v, 0.05);
    const double n = 100.0;
    const double t = std::sqrt(9.0 * n * (n - 1.0) / (2.0 * (2.0 * n + 5.0))) * std::fabs(r.tau_hat);
    EXPECT_NEAR(r.statistic, t, 1e-12);
    EXPECT_NEAR(r.p_value, 2.0 * (1.0 - oracle::std_normal_cdf(t)), 1e-12);
    EXPECT_EQ(r.reject, r.p_value < 0.05);
    // n = 100 and tau = 0.5 give T close to 7.37
    EXPECT_NEAR(std::sqrt(9.0 * n * (n - 1.0) / (2.0 * (2.0 * n + 5.0))) * 0.5, 7.37, 5e-3);
}

TEST(IndependenceTest, StrongNormalDependenceIsRejected) {
    auto [u, v] = draw({Family::Normal, Rotation::None, 0.9, 0.0}, 1000, 4);
    EXPECT_TRUE(independence_test(u, v, 0.05).reject);
}

TEST(IndependenceTest, FewerThanTenIsArgumentError) {
    std::vector<double> x{1, 2, 3, 4, 5, 6, 7, 8, 9}, y{1, 2, 3, 4, 5, 6, 7, 8, 9};
    EXPECT_THROW(independence_test(x, y, 0.05), ArgumentError);
}

TEST(FitMle, ClaytonTwoIsRecovered) {
    auto [u, v] = draw({Family::Clayton, Rotation::None, 2.0, 0.0}, 5000, 8);
    const FitResult r = fit_mle({Family::Clayton, Rotation::None}, u, v);
    EXPECT_GE(r.copula.theta1, 1.8);
    EXPECT_LE(r.copula.theta1, 2.2);
    EXPECT_EQ(r.aic, 2.0 * r.n_params - 2.0 * r.loglik);
}

TEST(FitMle, NormalOnIndependentUniformsIsNearZero) {
    auto [u, v] = draw(PairCopula::independence(), 5000, 9);
    EXPECT_LT(std::fabs(fit_mle({Family::Normal, Rotation::None}, u, v).copula.theta1), 0.05);
}

TEST(FitMle, RefitOnOwnSampleWithinThreeStandardErrors) {
    auto [u, v] = draw({Family::Gumbel, Rotation::None, 1.8, 0.0}, 3000, 12);
    const FitResult first = fit_mle({Family::Gumbel, Rotation::None}, u, v);
    auto [u2, v2] = draw(first.copula, 3000, 13);
    const FitResult second = fit_mle({Family::Gumbel, Rotation::None}, u2, v2);
    ASSERT_TRUE(std::isfinite(second.std_error[0]));
    EXPECT_LT(std::fabs(second.copula.theta1 - first.copula.theta1), 3.0 * second.std_error[0]);
}

TEST(FitMle, StudentTRecoversBothParameters) {
    auto [u, v] = draw({Family::StudentT, Rotation::None, 0.6, 5.0}, 4000, 14);
    const FitResult r = fit_mle({Family::StudentT, Rotation::None}, u, v);
    EXPECT_NEAR(r.copula.theta1, 0.6, 0.03);
    EXPECT_GT(r.copula.theta2, 3.0);
    EXPECT_LT(r.copula.theta2, 9.0);
    EXPECT_EQ(r.n_params, 2);
}

TEST(FitMle, TwoParameterFamilyBeatsItsOwnStart) {
    auto [u, v] = draw({Family::BB7, Rotation::Rot180, 1.6, 1.2}, 2000, 15);
    const FitResult r = fit_mle({Family::BB7, Rotation::Rot180}, u, v);
    EXPECT_GE(r.loglik, copula_loglik({Family::BB7, Rotation::Rot180, 1.6, 1.2}, u, v) - 1e-6);
    EXPECT_EQ(r.aic, 2.0 * r.n_params - 2.0 * r.loglik);
}

TEST(SelectPairCopula, IndependentUniformsSelectIndependence) {
    auto [u, v] = draw(PairCopula::independence(), 1000, 16);
    const FitResult r = select_pair_copula(u, v, default_candidates(), 0.05);
    EXPECT_EQ(r.copula.family, Family::Independence);
    EXPECT_EQ(r.loglik, 0.0);
    EXPECT_EQ(r.n_params, 0);
}

TEST(SelectPairCopula, FrankIsSelectedOnFrankData) {
    int hits = 0;
    const int reps = 10;
    for (int rep = 0; rep < reps; ++rep) {
        auto [u, v] = draw({Family::Frank, Rotation::None, 7.2222, 0.0}, 5000, 100 + rep);
        hits += select_pair_copula(u, v, default_candidates(), 0.05).copula.family == Family::Frank;
    }
    EXPECT_GE(hits, 9);
}

TEST(SelectPairCopula, SingleCandidateIsReturned) {
    auto [u, v] = draw({Family::Gumbel, Rotation::None, 2.0, 0.0}, 500, 17);
    const FitResult r = select_pair_copula(u, v, {{Family::Normal, Rotation::None}}, 0.05);
    EXPECT_EQ(r.copula.family, Family::Normal);
    EXPECT_EQ(r.aic, 2.0 * r.n_params - 2.0 * r.loglik);
}

TEST(SelectPairCopula, NegativeDependencePicksARotation) {
    auto [u, v] = draw({Family::Clayton, Rotation::Rot90, 3.0, 0.0}, 2000, 18);
    const FitResult r = select_pair_copula(u, v, default_candidates(), 0.05);
    EXPECT_LT(kendall_tau_of(r.copula), 0.0);
}

TEST(SelectPairCopula, EmptyCandidateSetIsArgumentError) {
    auto [u, v] = draw({Family::Gumbel, Rotation::None, 2.0, 0.0}, 200, 19);
    EXPECT_THROW(select_pair_copula(u, v, {}, 0.05), ArgumentError);
}

TEST(Catalog, NamesRoundTrip) {
    for (Family f : kAllFamilies) EXPECT_EQ(parse_family(family_name(f)), f);
    for (Rotation r : kAllRotations) EXPECT_EQ(rotation_from_degrees(rotation_degrees(r)), r);
    EXPECT_THROW(parse_family("Plackett"), ArgumentError);
}
