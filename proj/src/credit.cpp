#include "vinecredit/credit.hpp"

#include "vinecredit/error.hpp"
#include "vinecredit/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace vinecredit {

std::string_view role_name(Role r) {
    switch (r) {
        case Role::A_C: return "A_C";
        case Role::A_L: return "A_L";
        case Role::B_C: return "B_C";
        case Role::B_L: return "B_L";
    }
    return "?";
}

void FirmModel::validate() const {
    if (vine.dim() != 4) throw ArgumentError("FirmModel: the vine must have dimension 4");
    std::array<int, 4> hits{};
    for (Role r : variable_key) ++hits[static_cast<std::size_t>(r)];
    for (int h : hits) {
        if (h != 1) throw ArgumentError("FirmModel: variable_key must map the vine variables one-to-one onto roles");
    }
    for (Role r : kAllRoles) {
        const MixtureParams& p = marginal(r);
        if (!(p.sigma2 > 0.0 && p.eta1 >= 0.0 && p.eta1 <= 1.0)) {
            throw ArgumentError("FirmModel: invalid mixture parameters for " + std::string(role_name(r)));
        }
    }
    vine.validate();
}

std::vector<double> simulate_equity(const FirmModel& model, std::size_t n_sims, double discount,
                                    std::uint64_t seed) {
    if (n_sims < 1000) throw ArgumentError("estimate_pd: n_sims must be at least 1000");
    if (!(discount > 0.0) || !std::isfinite(discount)) throw ArgumentError("estimate_pd: discount must be positive");
    model.validate();
    const ColumnData u = simulate_dvine(model.vine, n_sims, seed);
    std::vector<double> equity(n_sims);
    std::array<double, 4> x{};
    for (std::size_t s = 0; s < n_sims; ++s) {
        try {
            for (std::size_t j = 0; j < 4; ++j) {
                const Role role = model.variable_key[j];
                x[static_cast<std::size_t>(role)] = mixture_quantile(model.marginal(role), u[j][s]);
            }
        } catch (const std::exception& e) {
            throw NumericError("estimate_pd: simulation " + std::to_string(s) + ": " + e.what());
        }
        equity[s] = discount * equity_payoff(x[0], x[1], x[2], x[3]);
    }
    return equity;
}

PDReport summarize_equity(std::span<const double> equity, double discount, std::uint64_t seed) {
    if (equity.empty()) throw ArgumentError("summarize_equity: no simulations");
    PDReport r;
    r.n_sims = equity.size();
    r.discount_factor = discount;
    r.seed = seed;
    const auto defaults = std::count_if(equity.begin(), equity.end(), [](double e) { return e <= 0.0; });
    const double n = static_cast<double>(r.n_sims);
    r.pd = static_cast<double>(defaults) / n;
    r.mc_std_error = std::sqrt(r.pd * (1.0 - r.pd) / n);
    r.mean_equity = mean(equity);
    std::vector<double> sorted(equity.begin(), equity.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 0; k < kEquityQuantileLevels.size(); ++k) {
        r.equity_quantiles[k] = quantile_sorted(sorted, kEquityQuantileLevels[k]);
    }
    return r;
}

PDReport estimate_pd(const FirmModel& model, std::size_t n_sims, double discount, std::uint64_t seed) {
    const std::vector<double> equity = simulate_equity(model, n_sims, discount, seed);
    return summarize_equity(equity, discount, seed);
}

namespace {

std::string quantile_key(double level) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "q%02d", static_cast<int>(std::lround(level * 100.0)));
    return buf;
}

}  // namespace

void write_pd_report(std::ostream& out, const PDReport& r) {
    out << "pd " << format_double(r.pd) << '\n';
    out << "mc_std_error " << format_double(r.mc_std_error) << '\n';
    out << "n_sims " << r.n_sims << '\n';
    out << "discount_factor " << format_double(r.discount_factor) << '\n';
    out << "seed " << r.seed << '\n';
    out << "mean_equity " << format_double(r.mean_equity) << '\n';
    for (std::size_t k = 0; k < kEquityQuantileLevels.size(); ++k) {
        out << quantile_key(kEquityQuantileLevels[k]) << ' ' << format_double(r.equity_quantiles[k]) << '\n';
    }
}

PDReport read_pd_report(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string key;
        std::string value;
        if (!(ss >> key >> value)) throw IoError("pd report: malformed line '" + line + "'");
        kv[key] = value;
    }
    auto get = [&](const std::string& key) {
        auto it = kv.find(key);
        if (it == kv.end()) throw IoError("pd report: missing field '" + key + "'");
        try {
            return std::stod(it->second);
        } catch (const std::exception&) {
            throw IoError("pd report: field '" + key + "' is not numeric");
        }
    };
    PDReport r;
    r.pd = get("pd");
    r.mc_std_error = get("mc_std_error");
    r.n_sims = static_cast<std::size_t>(get("n_sims"));
    r.discount_factor = get("discount_factor");
    const auto seed_it = kv.find("seed");
    if (seed_it == kv.end()) throw IoError("pd report: missing field 'seed'");
    r.seed = std::stoull(seed_it->second);
    r.mean_equity = get("mean_equity");
    for (std::size_t k = 0; k < kEquityQuantileLevels.size(); ++k) {
        r.equity_quantiles[k] = get(quantile_key(kEquityQuantileLevels[k]));
    }
    return r;
}

void write_equity_csv(std::ostream& out, std::span<const double> equity) {
    out << "sim,equity\n";
    for (std::size_t s = 0; s < equity.size(); ++s) out << s + 1 << ',' << format_double(equity[s]) << '\n';
}

namespace {

void require_positive(double x, const char* name) {
    if (!(x > 0.0) || !std::isfinite(x)) throw ArgumentError(std::string("merton: ") + name + " must be positive");
}

struct D12 {
    double d1;
    double d2;
};

D12 merton_d(double assets, double sigma_assets, double face_value, double mu_assets, double maturity) {
    const double vol = sigma_assets * std::sqrt(maturity);
    const double d1 =
        (std::log(assets / face_value) + (mu_assets + 0.5 * sigma_assets * sigma_assets) * maturity) / vol;
    return {d1, d1 - vol};
}

}  // namespace

MertonEquity merton_equity(double assets, double sigma_assets, double face_value, double r, double mu_assets,
                           double maturity) {
    require_positive(assets, "A");
    require_positive(sigma_assets, "sigma_A");
    require_positive(face_value, "D");
    require_positive(maturity, "T");
    const auto [d1, d2] = merton_d(assets, sigma_assets, face_value, mu_assets, maturity);
    const double n1 = norm_cdf(d1);
    MertonEquity out;
    out.equity = assets * n1 - std::exp(-r * maturity) * face_value * norm_cdf(d2);
    out.sigma_equity = sigma_assets * assets * n1 / out.equity;
    return out;
}

MertonSolution merton_solve(const MertonInputs& in) {
    require_positive(in.equity, "E");
    require_positive(in.sigma_equity, "sigma_E");
    require_positive(in.face_value, "D");
    require_positive(in.maturity, "T");

    auto residual = [&](double la, double ls) -> std::array<double, 2> {
        const MertonEquity m = merton_equity(std::exp(la), std::exp(ls), in.face_value, in.r, in.mu_assets,
                                             in.maturity);
        return {m.equity / in.equity - 1.0, m.sigma_equity / in.sigma_equity - 1.0};
    };
    auto norm_of = [](const std::array<double, 2>& f) { return std::max(std::fabs(f[0]), std::fabs(f[1])); };

    struct Run {
        std::array<double, 2> x;
        std::array<double, 2> f;
        int iterations;
    };
    auto newton = [&](std::array<double, 2> x) -> Run {
        std::array<double, 2> f{std::numeric_limits<double>::infinity(), 0.0};
        try {
            f = residual(x[0], x[1]);
        } catch (const ArgumentError&) {
        }
        int it = 0;
        while (it < 200) {
            ++it;
            if (!(norm_of(f) > 1e-13)) break;
            std::array<std::array<double, 2>, 2> jac{};
            for (int k = 0; k < 2; ++k) {
                const double h = 1e-6;
                auto xp = x;
                auto xm = x;
                xp[static_cast<std::size_t>(k)] += h;
                xm[static_cast<std::size_t>(k)] -= h;
                const auto fp = residual(xp[0], xp[1]);
                const auto fm = residual(xm[0], xm[1]);
                jac[0][static_cast<std::size_t>(k)] = (fp[0] - fm[0]) / (2.0 * h);
                jac[1][static_cast<std::size_t>(k)] = (fp[1] - fm[1]) / (2.0 * h);
            }
            const double det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
            if (!(std::fabs(det) > 0.0) || !std::isfinite(det)) break;
            const std::array<double, 2> step{(jac[1][1] * f[0] - jac[0][1] * f[1]) / det,
                                             (jac[0][0] * f[1] - jac[1][0] * f[0]) / det};
            // backtracking keeps each update a descent step for max |residual|
            double lambda = 1.0;
            bool moved = false;
            for (int b = 0; b < 40; ++b, lambda *= 0.5) {
                const std::array<double, 2> trial{x[0] - lambda * step[0], x[1] - lambda * step[1]};
                std::array<double, 2> ft{};
                try {
                    ft = residual(trial[0], trial[1]);
                } catch (const ArgumentError&) {
                    continue;
                }
                if (std::isfinite(ft[0]) && std::isfinite(ft[1]) && norm_of(ft) < norm_of(f)) {
                    x = trial;
                    f = ft;
                    moved = true;
                    break;
                }
            }
            if (!moved) break;
        }
        if (!std::isfinite(f[0]) || !std::isfinite(f[1])) f = {std::numeric_limits<double>::infinity(), 0.0};
        return {x, f, it};
    };

    // The prescribed start comes first; the others cover the out-of-the-money
    // region where it underflows. With mu_A > r the system can have several
    // roots, and the first start that converges wins.
    const double a0 = in.equity + std::exp(-in.r * in.maturity) * in.face_value;
    const double la0 = std::log(a0);
    std::vector<std::array<double, 2>> starts{{la0, std::log(in.sigma_equity * in.equity / a0)}};
    for (double s0 : {0.02, 0.05, 0.1, 0.2, 0.4, 0.8, 1.6}) starts.push_back({la0, std::log(s0)});

    std::optional<Run> best_root;
    std::optional<Run> closest;
    int total_iterations = 0;
    for (const auto& x0 : starts) {
        const Run run = newton(x0);
        total_iterations += run.iterations;
        if (!closest || norm_of(run.f) < norm_of(closest->f)) closest = run;
        if (norm_of(run.f) < 1e-10) {
            best_root = run;
            break;
        }
    }

    MertonSolution sol;
    if (!best_root) {
        std::ostringstream msg;
        msg.precision(6);
        msg << "merton_solve: no root found after " << total_iterations << " iterations (A="
            << std::exp(closest->x[0]) << ", sigma_A=" << std::exp(closest->x[1]) << ", relative residuals "
            << closest->f[0] << ", " << closest->f[1] << ")";
        throw NumericError(msg.str());
    }
    sol.assets = std::exp(best_root->x[0]);
    sol.sigma_assets = std::exp(best_root->x[1]);
    sol.iterations = best_root->iterations;
    sol.relative_residual = best_root->f;
    return sol;
}

double merton_pd(double assets, double sigma_assets, double face_value, double mu_assets, double maturity) {
    require_positive(assets, "A");
    require_positive(sigma_assets, "sigma_A");
    require_positive(face_value, "D");
    require_positive(maturity, "T");
    return norm_cdf(-merton_d(assets, sigma_assets, face_value, mu_assets, maturity).d2);
}

std::string_view zone_name(ZScoreZone z) {
    switch (z) {
        case ZScoreZone::Safe: return "Safe";
        case ZScoreZone::Grey: return "Grey";
        case ZScoreZone::Distress: return "Distress";
    }
    return "?";
}

ZScoreZone classify_z(double z) {
    if (z > 2.99) return ZScoreZone::Safe;
    if (z < 1.81) return ZScoreZone::Distress;
    return ZScoreZone::Grey;
}

ZScore altman_z(double x1, double x2, double x3, double x4, double x5) {
    const double z = 1.2 * x1 + 1.4 * x2 + 3.3 * x3 + 0.6 * x4 + 1.0 * x5;
    return {z, classify_z(z)};
}

}  // namespace vinecredit
