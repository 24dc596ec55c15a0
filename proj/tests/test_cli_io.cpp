#include "fixtures.hpp"

#include "vinecredit/error.hpp"
#include "vinecredit/panel.hpp"
#include "vinecredit/pipeline.hpp"
#include "vinecredit/report.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace vinecredit;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("vinecredit_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string semiannual_csv(int rows) {
    std::ostringstream out;
    out << "date,a_c,a_l,b_c,b_l\n";
    YearMonth d{1990, 1};
    for (int k = 0; k < rows; ++k) {
        out << d.to_string() << ',' << 100 + k << ',' << 200 + 2 * k << ',' << 50 + k << ",70.5\n";
        d = d.plus_months(6);
    }
    return out.str();
}

std::string expect_io_error(const std::string& csv, Frequency f = Frequency::Monthly) {
    std::istringstream in(csv);
    try {
        parse_panel(in, f);
    } catch (const IoError& e) {
        return e.what();
    }
    ADD_FAILURE() << "no IoError for:\n" << csv;
    return {};
}

RunConfig quick_config(const fs::path& out) {
    RunConfig cfg;
    cfg.iterations = 600;
    cfg.burnin = 100;
    cfg.n_sims = 2000;
    cfg.out_dir = out;
    cfg.seed = 4242;
    return cfg;
}

}  // namespace

TEST(PanelIngest, SemiannualRowsBecomeSixMonthsEach) {
    std::istringstream in(semiannual_csv(28));
    const auto p = parse_panel(in, Frequency::Semiannual);
    ASSERT_EQ(p.rows.size(), 168u);
    EXPECT_EQ(p.rows.front().date.to_string(), "1990-01");
    EXPECT_EQ(p.rows.back().date.to_string(), "2003-12");
    for (std::size_t k = 0; k < 28; ++k) {
        for (std::size_t m = 0; m < 6; ++m) {
            const auto& r = p.rows[6 * k + m];
            EXPECT_EQ(r.a_c, 100.0 + static_cast<double>(k));
            EXPECT_EQ(r.a_l, 200.0 + 2.0 * static_cast<double>(k));
            EXPECT_EQ(r.b_l, 70.5);
        }
    }
    for (std::size_t t = 1; t < p.rows.size(); ++t) EXPECT_EQ(p.rows[t].date, p.rows[t - 1].date.plus_months(1));
}

TEST(PanelIngest, LinearExpansionInterpolatesTowardNextRow) {
    std::istringstream in(semiannual_csv(3));
    const auto p = parse_panel(in, Frequency::Semiannual, Expansion::Linear);
    ASSERT_EQ(p.rows.size(), 18u);
    EXPECT_EQ(p.rows[0].a_c, 100.0);
    EXPECT_NEAR(p.rows[3].a_c, 100.5, 1e-12);
    EXPECT_EQ(p.rows[6].a_c, 101.0);
    EXPECT_EQ(p.rows[17].a_c, 102.0);
    EXPECT_EQ(p.rows[4].b_l, 70.5);
}

TEST(PanelIngest, MonthlyPassesThrough) {
    const auto panel = fixture::solvent_panel(30, 1);
    std::ostringstream out;
    write_panel_csv(out, panel);
    std::istringstream in(out.str());
    const auto back = parse_panel(in, Frequency::Monthly);
    EXPECT_EQ(back.rows, panel.rows);
}

TEST(PanelIngest, IdempotentThroughCsv) {
    std::istringstream in(semiannual_csv(5));
    const auto once = parse_panel(in, Frequency::Semiannual, Expansion::Linear);
    std::ostringstream out;
    write_panel_csv(out, once);
    std::istringstream in2(out.str());
    const auto twice = parse_panel(in2, Frequency::Monthly);
    EXPECT_EQ(twice.rows, once.rows);
    std::ostringstream out2;
    write_panel_csv(out2, twice);
    EXPECT_EQ(out2.str(), out.str());
}

TEST(PanelIngest, DuplicateDateNamesTheRow) {
    const std::string msg = expect_io_error("date,a_c,a_l,b_c,b_l\n2000-01,1,2,3,4\n2000-02,1,2,3,4\n2000-02,1,2,3,4\n");
    EXPECT_NE(msg.find("line 4"), std::string::npos) << msg;
}

TEST(PanelIngest, MalformedInputsNameLineAndColumn) {
    EXPECT_NE(expect_io_error("").find("empty"), std::string::npos);
    EXPECT_NE(expect_io_error("date,a_c,a_l,b_c\n2000-01,1,2,3\n").find("header"), std::string::npos);
    const std::string bad_cell = expect_io_error("date,a_c,a_l,b_c,b_l\n2000-01,1,2,3,4\n2000-02,1,x,3,4\n");
    EXPECT_NE(bad_cell.find("line 3"), std::string::npos) << bad_cell;
    EXPECT_NE(bad_cell.find("a_l"), std::string::npos) << bad_cell;
    EXPECT_NE(expect_io_error("date,a_c,a_l,b_c,b_l\n2000-13,1,2,3,4\n").find("line 2"), std::string::npos);
    EXPECT_NE(expect_io_error("date,a_c,a_l,b_c,b_l\n2000-01,1,2,3\n").find("line 2"), std::string::npos);
    EXPECT_NE(expect_io_error("date,a_c,a_l,b_c,b_l\n2000-03,1,2,3,4\n2000-02,1,2,3,4\n").find("line 3"),
              std::string::npos);
    expect_io_error("date,a_c,a_l,b_c,b_l\n");
    expect_io_error("date,a_c,a_l,b_c,b_l\n2000-01,1,2,3,4\n2000-04,1,2,3,4\n", Frequency::Semiannual);
}

TEST(PanelIngest, MissingFileIsIoError) {
    EXPECT_THROW(ingest_panel("/nonexistent/panel.csv", Frequency::Monthly), IoError);
}

TEST(Config, DefaultsAreTheReferenceSettings) {
    const RunConfig cfg;
    EXPECT_EQ(cfg.iterations, 4000);
    EXPECT_EQ(cfg.burnin, 1000);
    EXPECT_EQ(cfg.n_sims, 10000u);
    EXPECT_EQ(cfg.indep_level, 0.05);
    EXPECT_EQ(cfg.discount_factor(), 1.0);
    EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, ParsesKeyValueLines) {
    RunConfig cfg;
    std::istringstream in("# comment\n\nseed = 7\niterations=900\n burnin = 50\nn_sims = 1500\nindep_level = 0.1\n"
                          "families = Clayton, Frank\ndiscount_rate = 0.04\nhorizon = 2\nout = somewhere\n"
                          "frequency = semiannual\nexpansion = linear\n");
    apply_config(cfg, in);
    EXPECT_EQ(cfg.seed, 7u);
    EXPECT_EQ(cfg.iterations, 900);
    EXPECT_EQ(cfg.burnin, 50);
    EXPECT_EQ(cfg.n_sims, 1500u);
    EXPECT_EQ(cfg.indep_level, 0.1);
    EXPECT_EQ(cfg.out_dir, fs::path("somewhere"));
    EXPECT_EQ(cfg.frequency, Frequency::Semiannual);
    EXPECT_EQ(cfg.expansion, Expansion::Linear);
    EXPECT_NEAR(cfg.discount_factor(), std::exp(-0.08), 1e-15);
    for (const auto& k : cfg.candidates) {
        EXPECT_TRUE(k.family == Family::Clayton || k.family == Family::Frank);
    }
    EXPECT_EQ(cfg.candidates.size(), 5u);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
    RunConfig cfg;
    std::istringstream unknown("colour = blue\n");
    EXPECT_THROW(apply_config(cfg, unknown), ArgumentError);
    std::istringstream no_eq("seed 7\n");
    EXPECT_THROW(apply_config(cfg, no_eq), ArgumentError);
    EXPECT_THROW(apply_config_value(cfg, "iterations", "many"), ArgumentError);
    EXPECT_THROW(apply_config_value(cfg, "families", "Unicorn"), ArgumentError);
    cfg = RunConfig{};
    cfg.burnin = cfg.iterations;
    EXPECT_THROW(cfg.validate(), ArgumentError);
    cfg = RunConfig{};
    cfg.n_sims = 10;
    EXPECT_THROW(cfg.validate(), ArgumentError);
}

TEST(Config, WriteThenApplyRoundTrips) {
    RunConfig cfg;
    cfg.seed = 99;
    cfg.iterations = 1234;
    cfg.discount_rate = 0.0375;
    apply_config_value(cfg, "families", "Gumbel,BB8");
    std::ostringstream out;
    write_config(out, cfg);
    RunConfig back;
    std::istringstream in(out.str());
    apply_config(back, in);
    std::ostringstream again;
    write_config(again, back);
    EXPECT_EQ(again.str(), out.str());
    EXPECT_EQ(back.seed, 99u);
    EXPECT_EQ(back.discount_rate, 0.0375);
    EXPECT_EQ(back.candidates, cfg.candidates);
}

TEST(Pipeline, TwelveRowsHaltAtMarginals) {
    const fs::path dir = scratch_dir("short");
    const auto panel = fixture::solvent_panel(12, 3);
    try {
        run_pipeline(panel, quick_config(dir));
        FAIL() << "expected StageError";
    } catch (const StageError& e) {
        EXPECT_EQ(e.stage(), "marginals");
        EXPECT_NE(std::string(e.what()).find("20"), std::string::npos) << e.what();
    }
    const Manifest m = read_manifest(dir);
    EXPECT_TRUE(m.complete("ingest"));
    EXPECT_FALSE(m.complete("marginals"));
    EXPECT_FALSE(m.complete("pd"));
    EXPECT_NE(read_file(manifest_path(dir)).find("status incomplete"), std::string::npos);
    EXPECT_THROW(emit_report(dir), IoError);
}

TEST(Pipeline, InvalidConfigIsTaggedAsConfigStage) {
    RunConfig cfg = quick_config(scratch_dir("badcfg"));
    cfg.n_sims = 5;
    try {
        run_pipeline(fixture::solvent_panel(40, 1), cfg);
        FAIL();
    } catch (const StageError& e) {
        EXPECT_EQ(e.stage(), "config");
    }
}

TEST(Pipeline, SolventFirmEndToEndAndReport) {
    const fs::path dir = scratch_dir("solvent");
    const auto report = run_pipeline(fixture::solvent_panel(96, 11), quick_config(dir));
    EXPECT_LT(report.pd, 0.01);
    EXPECT_EQ(report.n_sims, 2000u);

    for (Role r : kAllRoles) EXPECT_TRUE(fs::exists(posterior_path(dir, r)));
    for (const auto& p : {vine_path(dir), pd_report_path(dir), equity_path(dir), manifest_path(dir), panel_path(dir)}) {
        EXPECT_TRUE(fs::exists(p)) << p;
    }
    const Manifest m = read_manifest(dir);
    for (const char* s : kStages) EXPECT_TRUE(m.complete(s)) << s;
    EXPECT_EQ(m.artifacts.size(), 8u);
    for (const auto& [name, digest] : m.artifacts) EXPECT_EQ(digest, fnv1a_hex(read_file(dir / name))) << name;
    const std::string manifest_text = read_file(manifest_path(dir));
    EXPECT_NE(manifest_text.find("config seed = 4242"), std::string::npos);
    EXPECT_NE(manifest_text.find("vinecredit_version"), std::string::npos);

    const auto out = emit_report(dir);
    for (Role r : kAllRoles) {
        EXPECT_NE(out.text.find("  " + std::string(role_name(r)) + " ("), std::string::npos) << role_name(r);
    }
    std::istringstream lines(out.text);
    std::string line;
    int edge_lines = 0;
    while (std::getline(lines, line)) {
        if (line.rfind("  1 ", 0) == 0 || line.rfind("  2 ", 0) == 0 || line.rfind("  3 ", 0) == 0) ++edge_lines;
    }
    EXPECT_EQ(edge_lines, 6);
    EXPECT_NE(out.text.find("Probability of default"), std::string::npos);
    EXPECT_EQ(out.density_csv.rfind("equity,density\n", 0), 0u);
}

TEST(Pipeline, RerunIsByteIdentical) {
    const fs::path a = scratch_dir("rerun_a");
    const fs::path b = scratch_dir("rerun_b");
    const auto panel = fixture::solvent_panel(48, 5);
    run_pipeline(panel, quick_config(a));
    run_pipeline(panel, quick_config(b));
    const Manifest ma = read_manifest(a);
    const Manifest mb = read_manifest(b);
    EXPECT_EQ(ma.artifacts, mb.artifacts);
    for (const auto& [name, digest] : ma.artifacts) EXPECT_EQ(read_file(a / name), read_file(b / name)) << name;
    EXPECT_EQ(read_file(manifest_path(a)), read_file(manifest_path(b)));
}

TEST(Pipeline, StagesResumeFromDisk) {
    const fs::path dir = scratch_dir("stages");
    const fs::path csv = dir / "firm.csv";
    {
        std::ofstream out(csv);
        write_panel_csv(out, fixture::solvent_panel(40, 9));
    }
    RunConfig cfg = quick_config(dir / "out");
    EXPECT_THROW(run_fit_vine(cfg), StageError);
    run_ingest(csv, cfg);
    EXPECT_EQ(read_manifest(cfg.out_dir).firm_id, "firm");
    try {
        run_pd(cfg);
        FAIL();
    } catch (const StageError& e) {
        EXPECT_EQ(e.stage(), "pd");
        EXPECT_NE(std::string(e.what()).find("vine"), std::string::npos);
    }
    run_fit_marginals(cfg);
    run_fit_vine(cfg);
    const auto r = run_pd(cfg);
    EXPECT_LT(r.pd, 0.01);
    EXPECT_NO_THROW(emit_report(cfg.out_dir));
    // refitting the marginals invalidates everything downstream
    std::ofstream(cfg.out_dir / "posterior_A_C.csv") << "garbage\n";
    run_fit_marginals(cfg);
    const Manifest m = read_manifest(cfg.out_dir);
    EXPECT_TRUE(m.complete("marginals"));
    EXPECT_FALSE(m.complete("vine"));
    EXPECT_FALSE(m.complete("pd"));
}

TEST(Report, PrunedEdgesReadIndependence) {
    DVineSpec spec = fixture::reference_vine();
    spec.names = {"A_C", "A_L", "B_C", "B_L"};
    spec.edge(2, 1) = VineEdge{PairCopula::independence(), EdgeStatus::TestedIndependent, 0.0, {}};
    const std::string table = format_vine_table(spec);
    std::istringstream lines(table);
    std::string line;
    int indep = 0;
    while (std::getline(lines, line)) {
        if (line.find("Independence") == std::string::npos) continue;
        ++indep;
        std::istringstream cells(line);
        std::string tree, edge, fam, p1, p2, tau;
        cells >> tree >> edge >> fam >> p1 >> p2 >> tau;
        EXPECT_EQ(p1, "N/A");
        EXPECT_EQ(p2, "N/A");
        EXPECT_EQ(tau, "0");
    }
    EXPECT_EQ(indep, 2);
    EXPECT_NE(table.find("A_C,B_C|A_L"), std::string::npos) << table;
}

TEST(Report, DensityIntegratesToOne) {
    std::vector<double> x;
    for (int k = 0; k < 2000; ++k) x.push_back(std::sin(k * 0.37) * 5.0 + k * 1e-3);
    const std::string csv = equity_density_csv(x, 400);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    std::vector<std::pair<double, double>> pts;
    while (std::getline(in, line)) {
        const auto c = line.find(',');
        pts.emplace_back(std::stod(line.substr(0, c)), std::stod(line.substr(c + 1)));
    }
    ASSERT_EQ(pts.size(), 400u);
    double area = 0.0;
    for (std::size_t k = 1; k < pts.size(); ++k) {
        area += 0.5 * (pts[k].second + pts[k - 1].second) * (pts[k].first - pts[k - 1].first);
    }
    EXPECT_NEAR(area, 1.0, 0.02);
}

TEST(Manifest, DigestIsFnv1a) {
    EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
    EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}
