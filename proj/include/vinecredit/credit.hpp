#pragma once

#include "vinecredit/dvine.hpp"
#include "vinecredit/mixture.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace vinecredit {

/// Balance-sheet components: current and long-term assets and liabilities.
enum class Role { A_C, A_L, B_C, B_L };
inline constexpr std::array<Role, 4> kAllRoles = {Role::A_C, Role::A_L, Role::B_C, Role::B_L};
std::string_view role_name(Role r);

struct FirmModel {
    std::array<MixtureParams, 4> marginals;  // indexed by Role
    DVineSpec vine;                          // 4 variables
    std::array<Role, 4> variable_key{Role::A_C, Role::A_L, Role::B_C, Role::B_L};  // vine variable -> role

    const MixtureParams& marginal(Role r) const { return marginals[static_cast<std::size_t>(r)]; }
    /// Throws ArgumentError unless the vine has dimension 4 and the key is a bijection.
    void validate() const;
};

/// Total assets minus total liabilities.
constexpr double equity_payoff(double a_c, double a_l, double b_c, double b_l) { return (a_c + a_l) - (b_c + b_l); }

inline constexpr std::array<double, 7> kEquityQuantileLevels = {0.01, 0.05, 0.25, 0.50, 0.75, 0.95, 0.99};

struct PDReport {
    double pd = 0.0;
    double mc_std_error = 0.0;  // sqrt(pd (1 - pd) / n_sims)
    std::size_t n_sims = 0;
    double discount_factor = 1.0;
    std::array<double, 7> equity_quantiles{};  // at kEquityQuantileLevels
    double mean_equity = 0.0;
    std::uint64_t seed = 0;
};

/// Discounted equity for n_sims draws from the vine mapped through the marginal
/// quantile functions. Deterministic given the seed.
std::vector<double> simulate_equity(const FirmModel& model, std::size_t n_sims, double discount, std::uint64_t seed);
/// PD = fraction of draws with equity <= 0, plus summary statistics.
PDReport summarize_equity(std::span<const double> equity, double discount, std::uint64_t seed);
PDReport estimate_pd(const FirmModel& model, std::size_t n_sims, double discount, std::uint64_t seed);

void write_pd_report(std::ostream& out, const PDReport& r);
PDReport read_pd_report(std::istream& in);
void write_equity_csv(std::ostream& out, std::span<const double> equity);

// Merton structural model. d1 uses the asset drift mu_A; the strike is
// discounted at the risk-free rate r.
struct MertonEquity {
    double equity = 0.0;
    double sigma_equity = 0.0;
};

MertonEquity merton_equity(double assets, double sigma_assets, double face_value, double r, double mu_assets,
                           double maturity);

struct MertonInputs {
    double equity = 0.0;
    double sigma_equity = 0.0;
    double face_value = 0.0;
    double r = 0.0;
    double mu_assets = 0.0;
    double maturity = 1.0;
};

struct MertonSolution {
    double assets = 0.0;
    double sigma_assets = 0.0;
    int iterations = 0;
    std::array<double, 2> relative_residual{};
};

/// Newton iteration in (log A, log sigma_A) from A0 = E + exp(-rT) D,
/// sigma0 = sigma_E E / A0. Throws NumericError with the residuals on failure.
MertonSolution merton_solve(const MertonInputs& in);

double merton_pd(double assets, double sigma_assets, double face_value, double mu_assets, double maturity);

enum class ZScoreZone { Safe, Grey, Distress };
std::string_view zone_name(ZScoreZone z);

struct ZScore {
    double z = 0.0;
    ZScoreZone zone = ZScoreZone::Grey;
};

/// z > 2.99 Safe, z < 1.81 Distress, otherwise (boundaries included) Grey.
ZScoreZone classify_z(double z);
/// Altman (1968): 1.2 x1 + 1.4 x2 + 3.3 x3 + 0.6 x4 + 1.0 x5.
ZScore altman_z(double x1, double x2, double x3, double x4, double x5);

}  // namespace vinecredit
