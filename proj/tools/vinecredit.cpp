// Command-line front end: ingest a balance-sheet panel, fit the marginal
// mixtures and the D-vine, simulate equity and report the default probability.
#include "vinecredit/credit.hpp"
#include "vinecredit/error.hpp"
#include "vinecredit/pipeline.hpp"
#include "vinecredit/report.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

using namespace vinecredit;

namespace {

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> iters;
    std::optional<int> burnin;
    std::optional<std::size_t> sims;
    std::optional<double> level;
    std::optional<std::string> out;
    std::optional<std::string> frequency;
    bool linear = false;
};

RunConfig build_config(const Overrides& o) {
    RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
    if (o.seed) cfg.seed = *o.seed;
    if (o.iters) cfg.iterations = *o.iters;
    if (o.burnin) cfg.burnin = *o.burnin;
    if (o.sims) cfg.n_sims = *o.sims;
    if (o.level) cfg.indep_level = *o.level;
    if (o.out) cfg.out_dir = *o.out;
    if (o.frequency) cfg.frequency = parse_frequency(*o.frequency);
    if (o.linear) cfg.expansion = Expansion::Linear;
    cfg.validate();
    return cfg;
}

void print_pd(const PDReport& r) {
    std::printf("PD %.4f (MC s.e. %.4f, %zu simulations)\n", r.pd, r.mc_std_error, r.n_sims);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Default probability from balance-sheet panels with mixture marginals and a D-vine copula"};
    app.set_version_flag("--version", VINECREDIT_VERSION);
    app.require_subcommand(1);
    app.fallthrough();

    Overrides o;
    app.add_option("--config", o.config, "key = value configuration file")->check(CLI::ExistingFile);
    app.add_option("--seed", o.seed, "random seed");
    app.add_option("--iters", o.iters, "Gibbs iterations (default 4000)");
    app.add_option("--burnin", o.burnin, "Gibbs burn-in (default 1000)");
    app.add_option("--sims", o.sims, "Monte Carlo simulations (default 10000)");
    app.add_option("--level", o.level, "independence test level (default 0.05)");
    app.add_option("--out", o.out, "output directory (default out)");

    std::string input;
    auto* ingest = app.add_subcommand("ingest", "validate a panel CSV and store it as monthly rows");
    auto* run = app.add_subcommand("run", "full pipeline: ingest, marginals, vine, PD");
    for (auto* sub : {ingest, run}) {
        sub->add_option("input", input, "CSV with header date,a_c,a_l,b_c,b_l")->required()->check(CLI::ExistingFile);
        sub->add_option("--frequency", o.frequency, "monthly or semiannual")
            ->check(CLI::IsMember({"monthly", "semiannual"}));
        sub->add_flag("--linear", o.linear, "interpolate semiannual rows instead of repeating them");
    }
    auto* fit_marg = app.add_subcommand("fit-marginals", "Gibbs-fit the four marginal mixtures");
    auto* fit_vine = app.add_subcommand("fit-vine", "select the order and fit the D-vine on the PIT data");
    auto* pd = app.add_subcommand("pd", "simulate equity and estimate the default probability");
    auto* report = app.add_subcommand("report", "write report.txt and equity_density.csv from a finished run");

    double m_equity = 0, m_sigma_e = 0, m_debt = 0, m_rate = 0, m_drift = 0, m_maturity = 1;
    auto* merton = app.add_subcommand("merton", "solve the Merton model for asset value and volatility");
    merton->add_option("--equity", m_equity, "equity value E")->required();
    merton->add_option("--sigma-equity", m_sigma_e, "equity volatility")->required();
    merton->add_option("--debt", m_debt, "face value of debt D")->required();
    merton->add_option("--rate", m_rate, "risk-free rate r");
    merton->add_option("--drift", m_drift, "asset drift mu_A");
    merton->add_option("--maturity", m_maturity, "maturity T in years");

    std::vector<double> ratios;
    auto* zscore = app.add_subcommand("zscore", "Altman Z-score from five ratios");
    zscore->add_option("ratios", ratios, "x1 x2 x3 x4 x5")->required()->expected(5);

    CLI11_PARSE(app, argc, argv);

    try {
        if (merton->parsed()) {
            const MertonSolution s = merton_solve({m_equity, m_sigma_e, m_debt, m_rate, m_drift, m_maturity});
            std::printf("A %.10g\nsigma_A %.10g\nPD %.10g\n", s.assets, s.sigma_assets,
                        merton_pd(s.assets, s.sigma_assets, m_debt, m_drift, m_maturity));
            return 0;
        }
        if (zscore->parsed()) {
            const ZScore z = altman_z(ratios[0], ratios[1], ratios[2], ratios[3], ratios[4]);
            std::printf("z %.4f\nzone %s\n", z.z, std::string(zone_name(z.zone)).c_str());
            return 0;
        }
        const RunConfig cfg = build_config(o);
        if (ingest->parsed()) {
            run_ingest(input, cfg);
            std::printf("panel stored in %s\n", panel_path(cfg.out_dir).string().c_str());
        } else if (fit_marg->parsed()) {
            run_fit_marginals(cfg);
        } else if (fit_vine->parsed()) {
            run_fit_vine(cfg);
            std::cout << format_vine_table(load_vine(cfg.out_dir));
        } else if (pd->parsed()) {
            print_pd(run_pd(cfg));
        } else if (run->parsed()) {
            const BalancePanel panel = ingest_panel(input, cfg.frequency, cfg.expansion);
            print_pd(run_pipeline(panel, cfg));
        } else if (report->parsed()) {
            const ReportOutput r = emit_report(cfg.out_dir);
            write_file_atomic(cfg.out_dir / "report.txt", r.text);
            write_file_atomic(cfg.out_dir / "equity_density.csv", r.density_csv);
            std::cout << r.text;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
