#include "vinecredit/copula.hpp"

#include "vinecredit/error.hpp"
#include "vinecredit/numeric.hpp"
#include "vinecredit/rng.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace vinecredit {

std::string_view family_name(Family f) {
    switch (f) {
        case Family::Independence: return "Independence";
        case Family::Normal: return "Normal";
        case Family::StudentT: return "StudentT";
        case Family::Clayton: return "Clayton";
        case Family::Gumbel: return "Gumbel";
        case Family::Frank: return "Frank";
        case Family::Joe: return "Joe";
        case Family::BB1: return "BB1";
        case Family::BB6: return "BB6";
        case Family::BB7: return "BB7";
        case Family::BB8: return "BB8";
    }
    return "?";
}

Family parse_family(std::string_view name) {
    for (Family f : kAllFamilies) {
        if (family_name(f) == name) return f;
    }
    throw ArgumentError("unknown copula family '" + std::string(name) + "'");
}

int rotation_degrees(Rotation r) {
    switch (r) {
        case Rotation::None: return 0;
        case Rotation::Rot90: return 90;
        case Rotation::Rot180: return 180;
        case Rotation::Rot270: return 270;
    }
    return 0;
}

Rotation rotation_from_degrees(int degrees) {
    switch (degrees) {
        case 0: return Rotation::None;
        case 90: return Rotation::Rot90;
        case 180: return Rotation::Rot180;
        case 270: return Rotation::Rot270;
        default: throw ArgumentError("rotation must be 0, 90, 180 or 270, got " + std::to_string(degrees));
    }
}

int family_param_count(Family f) {
    switch (f) {
        case Family::Independence: return 0;
        case Family::Normal:
        case Family::Clayton:
        case Family::Gumbel:
        case Family::Frank:
        case Family::Joe: return 1;
        default: return 2;
    }
}

bool family_is_radially_symmetric(Family f) {
    return f == Family::Independence || f == Family::Normal || f == Family::StudentT || f == Family::Frank;
}

bool rotation_allowed(Family f, Rotation r) { return r == Rotation::None || !family_is_radially_symmetric(f); }

ParamBox param_box(Family f) {
    switch (f) {
        case Family::Independence: return {};
        case Family::Normal: return {-0.999, 0.999, 0.0, 0.0, true, true};
        case Family::StudentT: return {-0.999, 0.999, 2.001, 30.0, true, true, false, false};
        case Family::Clayton: return {0.0001, 28.0, 0.0, 0.0, true, true};
        case Family::Gumbel: return {1.0001, 17.0};
        case Family::Frank: return {-35.0, 35.0, 0.0, 0.0, true, true};
        case Family::Joe: return {1.0001, 30.0};
        case Family::BB1: return {0.0, 7.0, 1.0, 7.0, true, false, false, false};
        case Family::BB6: return {1.0, 6.0, 1.0, 8.0};
        case Family::BB7: return {1.0, 6.0, 0.0, 28.0, false, false, true, false};
        case Family::BB8: return {1.0, 8.0, 0.0, 1.0, false, false, true, false};
    }
    return {};
}

namespace {

bool inside(double x, double lo, double hi, bool open_lo, bool open_hi) {
    if (!std::isfinite(x)) return false;
    if (open_lo ? !(x > lo) : !(x >= lo)) return false;
    if (open_hi ? !(x < hi) : !(x <= hi)) return false;
    return true;
}

std::string domain_message(const PairCopula& c, std::string_view what) {
    std::ostringstream msg;
    msg << describe(c) << ": " << what;
    return msg.str();
}

}  // namespace

void validate(const PairCopula& c) {
    if (!rotation_allowed(c.family, c.rotation)) {
        throw DomainError(domain_message(c, "rotation not allowed for this family"));
    }
    if (c.family == Family::Independence) return;
    const ParamBox box = param_box(c.family);
    if (!inside(c.theta1, box.lower1, box.upper1, box.open_lower1, box.open_upper1)) {
        throw DomainError(domain_message(c, "first parameter outside admissible box"));
    }
    if (c.family == Family::Frank && c.theta1 == 0.0) {
        throw DomainError(domain_message(c, "Frank parameter must be non-zero"));
    }
    if (c.n_params() == 2 && !inside(c.theta2, box.lower2, box.upper2, box.open_lower2, box.open_upper2)) {
        throw DomainError(domain_message(c, "second parameter outside admissible box"));
    }
}

bool is_valid(const PairCopula& c) {
    try {
        validate(c);
        return true;
    } catch (const DomainError&) {
        return false;
    }
}

std::string describe(const PairCopula& c) {
    std::ostringstream out;
    out << family_name(c.family);
    if (c.rotation != Rotation::None) out << "@" << rotation_degrees(c.rotation);
    if (c.n_params() >= 1) out << "(" << c.theta1;
    if (c.n_params() == 2) out << ", " << c.theta2;
    if (c.n_params() >= 1) out << ")";
    return out.str();
}

double clamp_unit(double u) { return std::clamp(u, kUClamp, 1.0 - kUClamp); }

namespace {

// ---------------------------------------------------------------------------
// Second-order forward-mode value: f, f', f'' with respect to one variable.

struct Jet {
    double v = 0.0;
    double d = 0.0;
    double dd = 0.0;
};

Jet variable(double x) { return {x, 1.0, 0.0}; }

Jet operator+(Jet a, double b) { return {a.v + b, a.d, a.dd}; }
Jet operator+(double a, Jet b) { return b + a; }
Jet operator-(Jet a) { return {-a.v, -a.d, -a.dd}; }
Jet operator-(double a, Jet b) { return (-b) + a; }
Jet operator*(Jet a, double b) { return {a.v * b, a.d * b, a.dd * b}; }
Jet operator*(double a, Jet b) { return b * a; }

// Applies g with g(x), g'(x), g''(x) given at x = a.v.
Jet chain(Jet a, double g, double g1, double g2) { return {g, g1 * a.d, g2 * a.d * a.d + g1 * a.dd}; }

Jet exp(Jet a) {
    const double e = std::exp(a.v);
    return chain(a, e, e, e);
}
Jet expm1(Jet a) {
    const double e = std::exp(a.v);
    return chain(a, std::expm1(a.v), e, e);
}
Jet log(Jet a) { return chain(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v)); }
Jet log1p(Jet a) {
    const double w = 1.0 + a.v;
    return chain(a, std::log1p(a.v), 1.0 / w, -1.0 / (w * w));
}
Jet pow(Jet a, double p) {
    const double g = std::pow(a.v, p);
    return chain(a, g, p * g / a.v, p * (p - 1.0) * g / (a.v * a.v));
}

// ---------------------------------------------------------------------------
// Two-parameter Archimedean families through their generator phi and inverse
// generator psi: C(u,v) = psi(phi(u) + phi(v)).

Jet bb_psi(Family f, double th, double de, Jet s) {
    switch (f) {
        case Family::BB1:  // (1 + s^(1/de))^(-1/th)
            return pow(1.0 + pow(s, 1.0 / de), -1.0 / th);
        case Family::BB6:  // 1 - (1 - exp(-s^(1/de)))^(1/th)
            return -expm1(log(-expm1(-pow(s, 1.0 / de))) * (1.0 / th));
        case Family::BB7:  // 1 - (1 - (1+s)^(-1/de))^(1/th)
            return -expm1(log(-expm1(log1p(s) * (-1.0 / de))) * (1.0 / th));
        case Family::BB8: {  // (1 - (1 - eta e^-s)^(1/th)) / de
            const double eta = -std::expm1(th * std::log1p(-de));
            return expm1(log1p(exp(-s) * (-eta)) * (1.0 / th)) * (-1.0 / de);
        }
        default: break;
    }
    throw DomainError("bb_psi: not a two-parameter Archimedean family");
}

Jet bb_phi(Family f, double th, double de, Jet t) {
    switch (f) {
        case Family::BB1:  // (t^-th - 1)^de
            return pow(expm1(log(t) * (-th)), de);
        case Family::BB6:  // (-log(1 - (1-t)^th))^de
            return pow(-log1p(-pow(1.0 - t, th)), de);
        case Family::BB7:  // (1 - (1-t)^th)^-de - 1
            return expm1(log1p(-pow(1.0 - t, th)) * (-de));
        case Family::BB8: {  // -log((1 - (1 - de t)^th) / eta)
            const double log_eta = std::log(-std::expm1(th * std::log1p(-de)));
            return -log1p(-pow(1.0 - de * t, th)) + log_eta;
        }
        default: break;
    }
    throw DomainError("bb_phi: not a two-parameter Archimedean family");
}

double bb_cdf(Family f, double th, double de, double u, double v) {
    const double s = bb_phi(f, th, de, variable(u)).v + bb_phi(f, th, de, variable(v)).v;
    return bb_psi(f, th, de, Jet{s, 0.0, 0.0}).v;
}

double bb_h(Family f, double th, double de, double u, double v) {
    const Jet pv = bb_phi(f, th, de, variable(v));
    const double s = bb_phi(f, th, de, variable(u)).v + pv.v;
    const Jet ps = bb_psi(f, th, de, variable(s));
    return ps.d * pv.d;
}

double bb_log_density(Family f, double th, double de, double u, double v) {
    const Jet pu = bb_phi(f, th, de, variable(u));
    const Jet pv = bb_phi(f, th, de, variable(v));
    const Jet ps = bb_psi(f, th, de, variable(pu.v + pv.v));
    return std::log(ps.dd) + std::log(-pu.d) + std::log(-pv.d);
}

// phi(t)/phi'(t), the integrand of the Archimedean Kendall's tau formula.
double bb_tau_integrand(Family f, double th, double de, double t) {
    const Jet p = bb_phi(f, th, de, variable(t));
    const double r = p.v / p.d;
    return std::isfinite(r) ? r : 0.0;  // phi/phi' vanishes at both ends
}

// ---------------------------------------------------------------------------
// One-parameter families.

double joe_phi(double th, double t) { return -std::log1p(-std::pow(1.0 - t, th)); }
double joe_phi_prime(double th, double t) {
    const double a = std::pow(1.0 - t, th);
    return -th * a / ((1.0 - t) * (1.0 - a));
}

double frank_debye1(double x) {
    // (1/x) * integral_0^x t / (e^t - 1) dt, x > 0
    auto f = [](double t) { return t == 0.0 ? 1.0 : t / std::expm1(t); };
    return integrate(f, 0.0, x, 1e-13) / x;
}

}  // namespace

double detail::student_t_loglik_from_quantiles(double rho, double nu, std::span<const double> x,
                                               std::span<const double> y) {
    const double r2 = 1.0 - rho * rho;
    const double lg_half = std::lgamma(nu / 2.0);
    const double log_pi_nu = std::log(nu * std::numbers::pi);
    const double joint_const = std::lgamma((nu + 2.0) / 2.0) - lg_half - log_pi_nu - 0.5 * std::log(r2);
    const double marg_const = std::lgamma((nu + 1.0) / 2.0) - lg_half - 0.5 * log_pi_nu;
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double a = x[i];
        const double b = y[i];
        total += joint_const - (nu + 2.0) / 2.0 * std::log1p((a * a + b * b - 2.0 * rho * a * b) / (nu * r2)) -
                 2.0 * marg_const + (nu + 1.0) / 2.0 * (std::log1p(a * a / nu) + std::log1p(b * b / nu));
    }
    return total;
}

namespace {

// ---------------------------------------------------------------------------
// Unrotated ("base") evaluations. All families in the catalog are exchangeable
// in their base form, so h with respect to the first argument is base_h with
// swapped arguments.

double base_cdf(const PairCopula& c, double u, double v);

double base_h(const PairCopula& c, double u, double v) {
    const double th = c.theta1;
    switch (c.family) {
        case Family::Independence: return u;
        case Family::Normal: {
            const double x = norm_quantile(u);
            const double y = norm_quantile(v);
            return norm_cdf((x - th * y) / std::sqrt(1.0 - th * th));
        }
        case Family::StudentT: {
            const double nu = c.theta2;
            const double x = student_t_quantile(u, nu);
            const double y = student_t_quantile(v, nu);
            const double scale = std::sqrt((nu + y * y) * (1.0 - th * th) / (nu + 1.0));
            return student_t_cdf((x - th * y) / scale, nu + 1.0);
        }
        case Family::Clayton: {
            const double t = std::pow(u, -th) + std::pow(v, -th) - 1.0;
            return std::exp((-th - 1.0) * std::log(v) + (-1.0 / th - 1.0) * std::log(t));
        }
        case Family::Gumbel: {
            const double lx = th * std::log(-std::log(u));
            const double ly = th * std::log(-std::log(v));
            const double m = std::max(lx, ly);
            const double log_a = (m + std::log1p(std::exp(std::min(lx, ly) - m))) / th;
            const double a = std::exp(log_a);
            const double y = -std::log(v);
            return std::exp(-a - std::log(v) + (th - 1.0) * std::log(y) + (1.0 - th) * log_a);
        }
        case Family::Frank: {
            const double eu = std::expm1(-th * u);
            const double ev = std::expm1(-th * v);
            return std::exp(-th * v) * eu / (std::expm1(-th) + eu * ev);
        }
        case Family::Joe: {
            const double ub = 1.0 - u;
            const double vb = 1.0 - v;
            const double a = std::pow(ub, th);
            const double b = std::pow(vb, th);
            const double s = a + b - a * b;
            return std::pow(s, 1.0 / th - 1.0) * std::pow(vb, th - 1.0) * (1.0 - a);
        }
        case Family::BB1:
        case Family::BB6:
        case Family::BB7:
        case Family::BB8: return bb_h(c.family, th, c.theta2, u, v);
    }
    return u;
}

double base_log_density(const PairCopula& c, double u, double v) {
    const double th = c.theta1;
    switch (c.family) {
        case Family::Independence: return 0.0;
        case Family::Normal: {
            const double x = norm_quantile(u);
            const double y = norm_quantile(v);
            const double r2 = 1.0 - th * th;
            return -0.5 * std::log(r2) - (th * th * (x * x + y * y) - 2.0 * th * x * y) / (2.0 * r2);
        }
        case Family::StudentT: {
            const double x = student_t_quantile(u, c.theta2);
            const double y = student_t_quantile(v, c.theta2);
            return detail::student_t_loglik_from_quantiles(th, c.theta2, {&x, 1}, {&y, 1});
        }
        case Family::Clayton: {
            const double lu = std::log(u);
            const double lv = std::log(v);
            const double t = std::exp(-th * lu) + std::exp(-th * lv) - 1.0;
            return std::log1p(th) + (-1.0 - th) * (lu + lv) + (-1.0 / th - 2.0) * std::log(t);
        }
        case Family::Gumbel: {
            const double x = -std::log(u);
            const double y = -std::log(v);
            const double lx = th * std::log(x);
            const double ly = th * std::log(y);
            const double m = std::max(lx, ly);
            const double log_a = (m + std::log1p(std::exp(std::min(lx, ly) - m))) / th;
            const double a = std::exp(log_a);
            return -a + x + y + (th - 1.0) * (std::log(x) + std::log(y)) + (1.0 - 2.0 * th) * log_a +
                   std::log(a + th - 1.0);
        }
        case Family::Frank: {
            const double denom = std::expm1(-th) + std::expm1(-th * u) * std::expm1(-th * v);
            return std::log(th * -std::expm1(-th)) - th * (u + v) - 2.0 * std::log(std::fabs(denom));
        }
        case Family::Joe: {
            const double ub = 1.0 - u;
            const double vb = 1.0 - v;
            const double a = std::pow(ub, th);
            const double b = std::pow(vb, th);
            const double s = a + b - a * b;
            return (1.0 / th - 2.0) * std::log(s) + (th - 1.0) * (std::log(ub) + std::log(vb)) +
                   std::log(th - 1.0 + s);
        }
        case Family::BB1:
        case Family::BB6:
        case Family::BB7:
        case Family::BB8: return bb_log_density(c.family, th, c.theta2, u, v);
    }
    return 0.0;
}

double base_cdf(const PairCopula& c, double u, double v) {
    const double th = c.theta1;
    switch (c.family) {
        case Family::Independence: return u * v;
        case Family::Clayton: return std::pow(std::pow(u, -th) + std::pow(v, -th) - 1.0, -1.0 / th);
        case Family::Gumbel: {
            const double a = std::pow(std::pow(-std::log(u), th) + std::pow(-std::log(v), th), 1.0 / th);
            return std::exp(-a);
        }
        case Family::Frank:
            return -std::log1p(std::expm1(-th * u) * std::expm1(-th * v) / std::expm1(-th)) / th;
        case Family::Joe: {
            const double a = std::pow(1.0 - u, th);
            const double b = std::pow(1.0 - v, th);
            return 1.0 - std::pow(a + b - a * b, 1.0 / th);
        }
        case Family::BB1:
        case Family::BB6:
        case Family::BB7:
        case Family::BB8: return bb_cdf(c.family, th, c.theta2, u, v);
        case Family::Normal:
        case Family::StudentT: {
            // C(u,v) = integral_0^v h(u|s) ds
            auto integrand = [&](double s) { return base_h(c, u, clamp_unit(s)); };
            return std::clamp(integrate(integrand, 0.0, v, 1e-12), 0.0, std::min(u, v));
        }
    }
    return u * v;
}

double numeric_base_h_inverse(const PairCopula& c, double p, double v) {
    const double lo = kUClamp;
    const double hi = 1.0 - kUClamp;
    const double hlo = base_h(c, lo, v);
    const double hhi = base_h(c, hi, v);
    if (!(p > hlo)) return lo;
    if (!(p < hhi)) return hi;
    auto f = [&](double u) { return base_h(c, u, v) - p; };
    try {
        return find_root(f, lo, hi, RootOptions{1e-13, 300});
    } catch (const NumericError& e) {
        std::ostringstream msg;
        msg << "h_inverse " << describe(c) << " at p=" << p << ", v=" << v << ": " << e.what();
        throw NumericError(msg.str());
    }
}

double base_h_inverse(const PairCopula& c, double p, double v) {
    const double th = c.theta1;
    switch (c.family) {
        case Family::Independence: return p;
        case Family::Normal: {
            const double y = norm_quantile(v);
            return norm_cdf(norm_quantile(p) * std::sqrt(1.0 - th * th) + th * y);
        }
        case Family::StudentT: {
            const double nu = c.theta2;
            const double y = student_t_quantile(v, nu);
            const double scale = std::sqrt((nu + y * y) * (1.0 - th * th) / (nu + 1.0));
            return student_t_cdf(student_t_quantile(p, nu + 1.0) * scale + th * y, nu);
        }
        case Family::Clayton: {
            const double t = std::pow(v, -th) * std::expm1(-th / (1.0 + th) * std::log(p)) + 1.0;
            return std::pow(t, -1.0 / th);
        }
        case Family::Frank: {
            const double a = p * std::expm1(-th) / (1.0 + std::expm1(-th * v) * (1.0 - p));
            return -std::log1p(a) / th;
        }
        default: return numeric_base_h_inverse(c, p, v);
    }
}

// ---------------------------------------------------------------------------

double archimedean_tau_numeric(const PairCopula& c) {
    auto integrand = [&](double t) {
        if (c.family == Family::Joe) {
            const double r = joe_phi(c.theta1, t) / joe_phi_prime(c.theta1, t);
            return std::isfinite(r) ? r : 0.0;
        }
        return bb_tau_integrand(c.family, c.theta1, c.theta2, t);
    };
    return 1.0 + 4.0 * integrate(integrand, 0.0, 1.0, 1e-10);
}

double base_tau(const PairCopula& c) {
    const double th = c.theta1;
    switch (c.family) {
        case Family::Independence: return 0.0;
        case Family::Normal:
        case Family::StudentT: return 2.0 / std::numbers::pi * std::asin(th);
        case Family::Clayton: return th / (th + 2.0);
        case Family::Gumbel: return 1.0 - 1.0 / th;
        case Family::Frank: {
            const double a = std::fabs(th);
            const double tau = 1.0 - 4.0 / a + 4.0 * frank_debye1(a) / a;
            return th < 0.0 ? -tau : tau;
        }
        case Family::BB1: return 1.0 - 2.0 / (c.theta2 * (th + 2.0));
        case Family::Joe:
        case Family::BB6:
        case Family::BB7:
        case Family::BB8: return archimedean_tau_numeric(c);
    }
    return 0.0;
}

PairCopula base_of(const PairCopula& c) {
    PairCopula b = c;
    b.rotation = Rotation::None;
    return b;
}

}  // namespace

double copula_cdf(const PairCopula& c, double u, double v) {
    validate(c);
    u = clamp_unit(u);
    v = clamp_unit(v);
    const PairCopula b = base_of(c);
    switch (c.rotation) {
        case Rotation::None: return base_cdf(b, u, v);
        case Rotation::Rot90: return v - base_cdf(b, 1.0 - u, v);
        case Rotation::Rot180: return u + v - 1.0 + base_cdf(b, 1.0 - u, 1.0 - v);
        case Rotation::Rot270: return u - base_cdf(b, u, 1.0 - v);
    }
    return 0.0;
}

double copula_log_density(const PairCopula& c, double u, double v) {
    validate(c);
    u = clamp_unit(u);
    v = clamp_unit(v);
    const PairCopula b = base_of(c);
    switch (c.rotation) {
        case Rotation::None: return base_log_density(b, u, v);
        case Rotation::Rot90: return base_log_density(b, 1.0 - u, v);
        case Rotation::Rot180: return base_log_density(b, 1.0 - u, 1.0 - v);
        case Rotation::Rot270: return base_log_density(b, u, 1.0 - v);
    }
    return 0.0;
}

double copula_density(const PairCopula& c, double u, double v) { return std::exp(copula_log_density(c, u, v)); }

double copula_loglik(const PairCopula& c, std::span<const double> u, std::span<const double> v) {
    validate(c);
    if (u.size() != v.size()) throw ArgumentError("copula_loglik: size mismatch");
    if (c.family == Family::Independence) return 0.0;
    const PairCopula b = base_of(c);
    double total = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double x = clamp_unit(u[i]);
        const double y = clamp_unit(v[i]);
        switch (c.rotation) {
            case Rotation::None: total += base_log_density(b, x, y); break;
            case Rotation::Rot90: total += base_log_density(b, 1.0 - x, y); break;
            case Rotation::Rot180: total += base_log_density(b, 1.0 - x, 1.0 - y); break;
            case Rotation::Rot270: total += base_log_density(b, x, 1.0 - y); break;
        }
    }
    return total;
}

double h_function(const PairCopula& c, double u, double v) {
    validate(c);
    u = clamp_unit(u);
    v = clamp_unit(v);
    const PairCopula b = base_of(c);
    double h = 0.0;
    switch (c.rotation) {
        case Rotation::None: h = base_h(b, u, v); break;
        case Rotation::Rot90: h = 1.0 - base_h(b, 1.0 - u, v); break;
        case Rotation::Rot180: h = 1.0 - base_h(b, 1.0 - u, 1.0 - v); break;
        case Rotation::Rot270: h = base_h(b, u, 1.0 - v); break;
    }
    return std::clamp(h, 0.0, 1.0);
}

double h_function_first(const PairCopula& c, double u, double v) {
    validate(c);
    u = clamp_unit(u);
    v = clamp_unit(v);
    const PairCopula b = base_of(c);
    double h = 0.0;
    switch (c.rotation) {
        case Rotation::None: h = base_h(b, v, u); break;
        case Rotation::Rot90: h = base_h(b, v, 1.0 - u); break;
        case Rotation::Rot180: h = 1.0 - base_h(b, 1.0 - v, 1.0 - u); break;
        case Rotation::Rot270: h = 1.0 - base_h(b, 1.0 - v, u); break;
    }
    return std::clamp(h, 0.0, 1.0);
}

double h_inverse(const PairCopula& c, double p, double v) {
    validate(c);
    p = clamp_unit(p);
    v = clamp_unit(v);
    const PairCopula b = base_of(c);
    double u = 0.0;
    switch (c.rotation) {
        case Rotation::None: u = base_h_inverse(b, p, v); break;
        case Rotation::Rot90: u = 1.0 - base_h_inverse(b, 1.0 - p, v); break;
        case Rotation::Rot180: u = 1.0 - base_h_inverse(b, 1.0 - p, 1.0 - v); break;
        case Rotation::Rot270: u = base_h_inverse(b, p, 1.0 - v); break;
    }
    return clamp_unit(u);
}

double h_inverse_first(const PairCopula& c, double p, double u) {
    validate(c);
    p = clamp_unit(p);
    u = clamp_unit(u);
    const PairCopula b = base_of(c);
    double v = 0.0;
    switch (c.rotation) {
        case Rotation::None: v = base_h_inverse(b, p, u); break;
        case Rotation::Rot90: v = base_h_inverse(b, p, 1.0 - u); break;
        case Rotation::Rot180: v = 1.0 - base_h_inverse(b, 1.0 - p, 1.0 - u); break;
        case Rotation::Rot270: v = 1.0 - base_h_inverse(b, 1.0 - p, u); break;
    }
    return clamp_unit(v);
}

double kendall_tau_of(const PairCopula& c) {
    validate(c);
    const double tau = base_tau(base_of(c));
    return (c.rotation == Rotation::Rot90 || c.rotation == Rotation::Rot270) ? -tau : tau;
}

double invert_tau_first_param(Family f, double tau, double theta2) {
    const ParamBox box = param_box(f);
    switch (f) {
        case Family::Independence: return 0.0;
        case Family::Normal:
        case Family::StudentT:
            return std::clamp(std::sin(std::numbers::pi / 2.0 * tau), -0.998, 0.998);
        case Family::Clayton:
            return tau <= 0.0 ? 0.0002 : std::clamp(2.0 * tau / (1.0 - tau), 0.0002, 27.99);
        case Family::Gumbel:
            return tau <= 0.0 ? box.lower1 : std::clamp(1.0 / (1.0 - tau), box.lower1, box.upper1);
        default: break;
    }
    double lo = box.lower1;
    double hi = box.upper1;
    if (f == Family::Frank) {
        if (std::fabs(tau) < 1e-6) return tau < 0.0 ? -1e-4 : 1e-4;
        lo = tau > 0.0 ? 1e-4 : -34.99;
        hi = tau > 0.0 ? 34.99 : -1e-4;
    } else {
        if (box.open_lower1) lo += 1e-6;
        if (box.open_upper1) hi -= 1e-6;
    }
    auto tau_at = [&](double th) {
        PairCopula c{f, Rotation::None, th, theta2};
        return base_tau(c);
    };
    const double tlo = tau_at(lo);
    const double thi = tau_at(hi);
    if (tau <= std::min(tlo, thi)) return tlo < thi ? lo : hi;
    if (tau >= std::max(tlo, thi)) return tlo < thi ? hi : lo;
    return find_root([&](double th) { return tau_at(th) - tau; }, lo, hi, RootOptions{1e-9, 200});
}

std::vector<std::pair<double, double>> sample_pair(const PairCopula& c, std::size_t n, std::uint64_t seed) {
    validate(c);
    if (n < 1) throw ArgumentError("sample_pair: n must be at least 1");
    RandomStream rng(seed);
    std::vector<std::pair<double, double>> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = rng.uniform();
        const double w = rng.uniform();
        out.emplace_back(h_inverse(c, w, v), v);
    }
    return out;
}

}  // namespace vinecredit
