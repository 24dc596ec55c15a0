#include "vinecredit/report.hpp"

#include "vinecredit/error.hpp"
#include "vinecredit/numeric.hpp"
#include "vinecredit/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace vinecredit {

namespace {

std::string fmt(const char* pattern, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, x);
    return buf;
}

std::string with_interval(double mean_value, const CredibleInterval& ci) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.6g [%.6g, %.6g]", mean_value, ci.lower, ci.upper);
    return buf;
}

}  // namespace

std::string format_marginals(const std::array<MixturePosterior, 4>& posts) {
    std::ostringstream out;
    out << "Marginal mixtures: posterior means [95% credible interval]\n";
    for (Role r : kAllRoles) {
        const MixturePosterior& p = posts[static_cast<std::size_t>(r)];
        out << "  " << role_name(r) << " (" << p.draws.size() << " draws"
            << (p.degenerate_warning ? ", degenerate component warning" : "") << ")\n";
        out << "    eta1    " << with_interval(p.posterior_mean.eta1, p.eta1_ci) << '\n';
        out << "    eta2    " << fmt("%.6g", p.posterior_mean.eta2()) << '\n';
        out << "    mu1     " << with_interval(p.posterior_mean.mu1, p.mu1_ci) << '\n';
        out << "    mu2     " << with_interval(p.posterior_mean.mu2, p.mu2_ci) << '\n';
        out << "    sigma2  " << with_interval(p.posterior_mean.sigma2, p.sigma2_ci) << '\n';
    }
    return out.str();
}

std::string format_vine_table(const DVineSpec& spec) {
    std::ostringstream out;
    out << "D-vine, order";
    for (int v : spec.order) out << ' ' << spec.names[static_cast<std::size_t>(v)];
    out << '\n';
    char buf[256];
    std::snprintf(buf, sizeof buf, "  %-4s %-22s %-16s %-12s %-12s %-8s %s\n", "tree", "edge", "family", "par1", "par2",
                  "tau", "note");
    out << buf;
    for (int t = 1; t < static_cast<int>(spec.dim()); ++t) {
        for (int i = 0; i < static_cast<int>(spec.dim()) - t; ++i) {
            const VineEdge& e = spec.edge(t, i);
            const auto [a, b] = spec.edge_pair(t, i);
            std::string label = spec.names[static_cast<std::size_t>(a)] + "," + spec.names[static_cast<std::size_t>(b)];
            const auto cond = spec.edge_conditioning(t, i);
            for (std::size_t k = 0; k < cond.size(); ++k) {
                label += (k == 0 ? "|" : ",") + spec.names[static_cast<std::size_t>(cond[k])];
            }
            std::string family(family_name(e.copula.family));
            if (e.copula.rotation != Rotation::None) family += " " + std::to_string(rotation_degrees(e.copula.rotation));
            const int k = e.copula.n_params();
            const std::string p1 = k >= 1 ? fmt("%.4f", e.copula.theta1) : "N/A";
            const std::string p2 = k >= 2 ? fmt("%.4f", e.copula.theta2) : "N/A";
            const double tau = kendall_tau_of(e.copula);
            const std::string tau_s = k == 0 ? "0" : fmt("%.4f", tau);
            const char* note = e.status == EdgeStatus::Skipped             ? "skipped"
                               : e.status == EdgeStatus::TestedIndependent ? "not rejected"
                                                                           : "";
            std::snprintf(buf, sizeof buf, "  %-4d %-22s %-16s %-12s %-12s %-8s %s\n", t, label.c_str(),
                          family.c_str(), p1.c_str(), p2.c_str(), tau_s.c_str(), note);
            out << buf;
        }
    }
    return out.str();
}

std::string format_pd(const PDReport& r) {
    std::ostringstream out;
    out << "Probability of default\n";
    out << "  PD               " << fmt("%.4f", r.pd) << "  (MC s.e. " << fmt("%.4f", r.mc_std_error) << ")\n";
    out << "  simulations      " << r.n_sims << '\n';
    out << "  discount factor  " << fmt("%.6g", r.discount_factor) << '\n';
    out << "  seed             " << r.seed << '\n';
    out << "  mean equity      " << fmt("%.6g", r.mean_equity) << '\n';
    out << "  equity quantiles\n";
    for (std::size_t k = 0; k < kEquityQuantileLevels.size(); ++k) {
        out << "    " << fmt("%4.0f%%", kEquityQuantileLevels[k] * 100.0) << "  " << fmt("%.6g", r.equity_quantiles[k])
            << '\n';
    }
    return out.str();
}

std::string equity_density_csv(std::span<const double> equity, std::size_t grid_points) {
    if (equity.size() < 2) throw ArgumentError("equity_density_csv: need at least 2 draws");
    if (grid_points < 2) throw ArgumentError("equity_density_csv: need at least 2 grid points");
    std::vector<double> sorted(equity.begin(), equity.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    const double sd = std::sqrt(variance(sorted));
    const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    double spread = std::min(sd, iqr / 1.349);
    if (!(spread > 0.0)) spread = sd > 0.0 ? sd : std::max(1.0, std::fabs(sorted.front())) * 1e-6;
    const double bw = 0.9 * spread * std::pow(n, -0.2);
    const double lo = sorted.front() - 3.0 * bw;
    const double hi = sorted.back() + 3.0 * bw;
    std::ostringstream out;
    out << "equity,density\n";
    char buf[64];
    for (std::size_t g = 0; g < grid_points; ++g) {
        const double x = lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(grid_points - 1);
        // only draws within 8 bandwidths contribute noticeably
        const auto first = std::lower_bound(sorted.begin(), sorted.end(), x - 8.0 * bw);
        const auto last = std::upper_bound(sorted.begin(), sorted.end(), x + 8.0 * bw);
        double acc = 0.0;
        for (auto it = first; it != last; ++it) acc += norm_pdf((x - *it) / bw);
        std::snprintf(buf, sizeof buf, "%.10g,%.10g\n", x, acc / (n * bw));
        out << buf;
    }
    return out.str();
}

ReportOutput emit_report(const std::filesystem::path& dir) {
    const Manifest m = read_manifest(dir);
    for (const char* stage : {"marginals", "vine", "pd"}) {
        if (!m.complete(stage)) throw IoError("report: stage '" + std::string(stage) + "' is incomplete in " + dir.string());
    }
    const auto posts = load_posteriors(dir);
    const DVineSpec vine = load_vine(dir);
    std::istringstream rep_in(read_file(pd_report_path(dir)));
    const PDReport pd = read_pd_report(rep_in);

    std::vector<double> equity;
    {
        std::istringstream eq(read_file(equity_path(dir)));
        std::string line;
        std::getline(eq, line);
        while (std::getline(eq, line)) {
            const auto comma = line.find(',');
            if (comma == std::string::npos) continue;
            equity.push_back(std::stod(line.substr(comma + 1)));
        }
    }

    ReportOutput out;
    std::ostringstream text;
    text << "Firm " << m.firm_id << "\n\n";
    text << format_marginals(posts) << '\n';
    text << format_vine_table(vine) << '\n';
    text << format_pd(pd);
    out.text = text.str();
    out.density_csv = equity_density_csv(equity);
    return out;
}

}  // namespace vinecredit
