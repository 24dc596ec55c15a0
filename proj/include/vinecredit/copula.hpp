#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vinecredit {

enum class Family : std::uint8_t { Independence, Normal, StudentT, Clayton, Gumbel, Frank, Joe, BB1, BB6, BB7, BB8 };

enum class Rotation : std::uint8_t { None, Rot90, Rot180, Rot270 };

inline constexpr std::array<Family, 11> kAllFamilies = {
    Family::Independence, Family::Normal, Family::StudentT, Family::Clayton, Family::Gumbel, Family::Frank,
    Family::Joe,          Family::BB1,    Family::BB6,      Family::BB7,     Family::BB8};

inline constexpr std::array<Rotation, 4> kAllRotations = {Rotation::None, Rotation::Rot90, Rotation::Rot180,
                                                          Rotation::Rot270};

// Inputs are clamped to [kUClamp, 1 - kUClamp] before any copula evaluation.
inline constexpr double kUClamp = 1e-10;

std::string_view family_name(Family f);
Family parse_family(std::string_view name);
int rotation_degrees(Rotation r);
Rotation rotation_from_degrees(int degrees);

int family_param_count(Family f);
bool family_is_radially_symmetric(Family f);  // Normal, StudentT, Frank (and Independence)
bool rotation_allowed(Family f, Rotation r);

struct ParamBox {
    double lower1 = 0.0;
    double upper1 = 0.0;
    double lower2 = 0.0;
    double upper2 = 0.0;
    bool open_lower1 = false;
    bool open_upper1 = false;
    bool open_lower2 = false;
    bool open_upper2 = false;
};

// Admissible parameter box; open/closed ends follow the catalog table in copula.cpp.
ParamBox param_box(Family f);

struct FamilyRotation {
    Family family = Family::Independence;
    Rotation rotation = Rotation::None;
    friend bool operator==(const FamilyRotation&, const FamilyRotation&) = default;
};

/// One bivariate copula: family, rotation and up to two parameters.
/// For StudentT theta1 is the correlation and theta2 the degrees of freedom.
struct PairCopula {
    Family family = Family::Independence;
    Rotation rotation = Rotation::None;
    double theta1 = 0.0;
    double theta2 = 0.0;

    static PairCopula independence() { return {}; }
    FamilyRotation kind() const { return {family, rotation}; }
    int n_params() const { return family_param_count(family); }
    friend bool operator==(const PairCopula&, const PairCopula&) = default;
};

/// Throws DomainError when the parameters leave the family's box or the rotation
/// is not allowed for the family.
void validate(const PairCopula& c);
bool is_valid(const PairCopula& c);

std::string describe(const PairCopula& c);

double clamp_unit(double u);

double copula_cdf(const PairCopula& c, double u, double v);
double copula_density(const PairCopula& c, double u, double v);
double copula_log_density(const PairCopula& c, double u, double v);

/// Sum of log densities over paired samples; validates the copula once.
double copula_loglik(const PairCopula& c, std::span<const double> u, std::span<const double> v);

namespace detail {
/// Student-t copula log-likelihood on data already mapped through the t_nu
/// quantile function (lets fitting reuse quantiles across correlation values).
double student_t_loglik_from_quantiles(double rho, double nu, std::span<const double> x, std::span<const double> y);
}  // namespace detail

/// dC(u,v)/dv: conditional distribution of U given V = v.
double h_function(const PairCopula& c, double u, double v);
/// dC(u,v)/du: conditional distribution of V given U = u.
double h_function_first(const PairCopula& c, double u, double v);

/// u with h_function(c, u, v) = p.
double h_inverse(const PairCopula& c, double p, double v);
/// v with h_function_first(c, u, v) = p.
double h_inverse_first(const PairCopula& c, double p, double u);

/// Analytic Kendall's tau where a closed form exists, numeric otherwise.
double kendall_tau_of(const PairCopula& c);

/// First parameter such that kendall_tau_of matches `tau` with the second
/// parameter held at `theta2`; clamped to the box when tau is out of reach.
double invert_tau_first_param(Family f, double tau, double theta2);

/// Conditional-inversion sampling: v ~ U(0,1), u = h_inverse(w | v).
/// Returns (u, v) pairs.
std::vector<std::pair<double, double>> sample_pair(const PairCopula& c, std::size_t n, std::uint64_t seed);

}  // namespace vinecredit
