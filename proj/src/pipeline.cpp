#include "vinecredit/pipeline.hpp"

#include "vinecredit/error.hpp"
#include "vinecredit/numeric.hpp"
#include "vinecredit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace vinecredit {

#ifndef VINECREDIT_VERSION
#define VINECREDIT_VERSION "unknown"
#endif

double RunConfig::discount_factor() const { return std::exp(-discount_rate * horizon); }

void RunConfig::validate() const {
    if (iterations < 2) throw ArgumentError("config: iterations must be at least 2");
    if (burnin < 0 || burnin >= iterations) throw ArgumentError("config: burnin must lie in [0, iterations)");
    if (n_sims < 1000) throw ArgumentError("config: n_sims must be at least 1000");
    if (!(indep_level > 0.0 && indep_level < 1.0)) throw ArgumentError("config: indep_level must lie in (0,1)");
    if (candidates.empty()) throw ArgumentError("config: the candidate family list is empty");
    if (!std::isfinite(discount_rate)) throw ArgumentError("config: discount_rate must be finite");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ArgumentError("config: horizon must be positive");
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size()) {
        throw ArgumentError("config: '" + key + "' expects a number, got '" + value + "'");
    }
    return v;
}

long long to_integer(const std::string& key, const std::string& value) {
    const double v = to_double(key, value);
    if (v != std::floor(v) || v < 0 || v > 9.0e15) {
        throw ArgumentError("config: '" + key + "' expects a non-negative integer, got '" + value + "'");
    }
    return static_cast<long long>(v);
}

CandidateSet parse_families(const std::string& value) {
    if (value == "all") return default_candidates();
    CandidateSet out;
    std::stringstream ss(value);
    std::string name;
    while (std::getline(ss, name, ',')) {
        name = trim(name);
        if (name.empty()) continue;
        const Family f = parse_family(name);
        if (f == Family::Independence) continue;
        for (Rotation r : kAllRotations) {
            if (rotation_allowed(f, r) && std::find(out.begin(), out.end(), FamilyRotation{f, r}) == out.end()) {
                out.push_back({f, r});
            }
        }
    }
    if (out.empty()) throw ArgumentError("config: 'families' names no parametric family");
    return out;
}

std::string families_string(const CandidateSet& c) {
    if (c == default_candidates()) return "all";
    std::string out;
    std::vector<Family> seen;
    for (const auto& fr : c) {
        if (std::find(seen.begin(), seen.end(), fr.family) != seen.end()) continue;
        seen.push_back(fr.family);
        if (!out.empty()) out += ",";
        out += family_name(fr.family);
    }
    return out;
}

void write_config_lines(std::ostream& out, const RunConfig& cfg, const char* prefix, bool with_out) {
    out << prefix << "seed = " << cfg.seed << '\n';
    out << prefix << "iterations = " << cfg.iterations << '\n';
    out << prefix << "burnin = " << cfg.burnin << '\n';
    out << prefix << "n_sims = " << cfg.n_sims << '\n';
    out << prefix << "indep_level = " << format_double(cfg.indep_level) << '\n';
    out << prefix << "families = " << families_string(cfg.candidates) << '\n';
    out << prefix << "discount_rate = " << format_double(cfg.discount_rate) << '\n';
    out << prefix << "horizon = " << format_double(cfg.horizon) << '\n';
    out << prefix << "frequency = " << frequency_name(cfg.frequency) << '\n';
    out << prefix << "expansion = " << expansion_name(cfg.expansion) << '\n';
    if (with_out) out << prefix << "out = " << cfg.out_dir.string() << '\n';
}

}  // namespace

void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(to_integer(key, value));
    } else if (key == "iterations") {
        cfg.iterations = static_cast<int>(to_integer(key, value));
    } else if (key == "burnin") {
        cfg.burnin = static_cast<int>(to_integer(key, value));
    } else if (key == "n_sims") {
        cfg.n_sims = static_cast<std::size_t>(to_integer(key, value));
    } else if (key == "indep_level") {
        cfg.indep_level = to_double(key, value);
    } else if (key == "families") {
        cfg.candidates = parse_families(value);
    } else if (key == "discount_rate") {
        cfg.discount_rate = to_double(key, value);
    } else if (key == "horizon") {
        cfg.horizon = to_double(key, value);
    } else if (key == "out") {
        cfg.out_dir = value;
    } else if (key == "frequency") {
        cfg.frequency = parse_frequency(value);
    } else if (key == "expansion") {
        cfg.expansion = parse_expansion(value);
    } else {
        throw ArgumentError("config: unknown key '" + key + "'");
    }
}

void apply_config(RunConfig& cfg, std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ArgumentError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        try {
            apply_config_value(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
        } catch (const ArgumentError& e) {
            throw ArgumentError("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    RunConfig cfg;
    apply_config(cfg, in);
    return cfg;
}

void write_config(std::ostream& out, const RunConfig& cfg) { write_config_lines(out, cfg, "", true); }

std::array<MixturePosterior, 4> fit_marginals(const BalancePanel& panel, const RunConfig& cfg) {
    std::array<MixturePosterior, 4> out;
    for (Role r : kAllRoles) {
        const std::vector<double> x = panel.series(r);
        try {
            const MixturePriors priors = vague_priors(x);
            out[static_cast<std::size_t>(r)] = gibbs_fit_mixture(
                x, priors, cfg.iterations, cfg.burnin, derive_seed(cfg.seed, 1 + static_cast<std::uint64_t>(r)));
        } catch (const std::exception& e) {
            throw ArgumentError(std::string(role_name(r)) + ": " + e.what());
        }
    }
    return out;
}

ColumnData panel_pit(const BalancePanel& panel, const std::array<MixtureParams, 4>& marginals) {
    ColumnData u;
    for (Role r : kAllRoles) u.push_back(pit_transform(panel.series(r), marginals[static_cast<std::size_t>(r)]));
    return u;
}

DVineSpec fit_panel_vine(const ColumnData& u, const RunConfig& cfg) {
    std::vector<std::string> names;
    for (Role r : kAllRoles) names.emplace_back(role_name(r));
    const std::vector<int> order = select_order(TauMatrix::from_data(u));
    return fit_dvine(u, order, cfg.candidates, cfg.indep_level, names);
}

FirmModel make_firm_model(const std::array<MixtureParams, 4>& marginals, DVineSpec vine) {
    FirmModel m;
    m.marginals = marginals;
    m.vine = std::move(vine);
    return m;
}

std::uint64_t pd_seed(const RunConfig& cfg) { return derive_seed(cfg.seed, 100); }

std::filesystem::path posterior_path(const std::filesystem::path& dir, Role r) {
    return dir / ("posterior_" + std::string(role_name(r)) + ".csv");
}
std::filesystem::path vine_path(const std::filesystem::path& dir) { return dir / "vine.spec"; }
std::filesystem::path pd_report_path(const std::filesystem::path& dir) { return dir / "pd_report.txt"; }
std::filesystem::path equity_path(const std::filesystem::path& dir) { return dir / "equity_samples.csv"; }
std::filesystem::path manifest_path(const std::filesystem::path& dir) { return dir / "manifest.txt"; }
std::filesystem::path panel_path(const std::filesystem::path& dir) { return dir / "panel.csv"; }

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("missing artifact " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::array<MixturePosterior, 4> load_posteriors(const std::filesystem::path& dir) {
    std::array<MixturePosterior, 4> out;
    for (Role r : kAllRoles) {
        std::istringstream in(read_file(posterior_path(dir, r)));
        out[static_cast<std::size_t>(r)] = read_posterior_csv(in);
    }
    return out;
}

DVineSpec load_vine(const std::filesystem::path& dir) {
    std::istringstream in(read_file(vine_path(dir)));
    return read_vine_spec(in);
}

bool Manifest::complete(const std::string& stage) const {
    for (const auto& [name, done] : stages) {
        if (name == stage) return done;
    }
    return false;
}

void Manifest::mark(const std::string& stage, bool done) {
    for (auto& [name, d] : stages) {
        if (name == stage) {
            d = done;
            return;
        }
    }
    stages.emplace_back(stage, done);
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

std::vector<std::filesystem::path> stage_artifacts(const std::filesystem::path& dir, const std::string& stage) {
    if (stage == "ingest") return {panel_path(dir)};
    if (stage == "marginals") {
        std::vector<std::filesystem::path> out;
        for (Role r : kAllRoles) out.push_back(posterior_path(dir, r));
        return out;
    }
    if (stage == "vine") return {vine_path(dir)};
    if (stage == "pd") return {pd_report_path(dir), equity_path(dir)};
    return {};
}

Manifest fresh_manifest(std::string firm_id) {
    Manifest m;
    m.firm_id = std::move(firm_id);
    for (const char* s : kStages) m.stages.emplace_back(s, false);
    return m;
}

// Marks `stage` and every later stage incomplete.
void invalidate_from(Manifest& m, const std::string& stage) {
    bool after = false;
    for (const char* s : kStages) {
        if (stage == s) after = true;
        if (after) m.mark(s, false);
    }
}

Manifest require_stage(const std::filesystem::path& dir, const std::string& needed, const std::string& running) {
    Manifest m;
    try {
        m = read_manifest(dir);
    } catch (const IoError& e) {
        throw StageError(running, e.what());
    }
    if (!m.complete(needed)) throw StageError(running, "prerequisite stage '" + needed + "' is incomplete");
    return m;
}

template <class F>
auto run_stage(const RunConfig& cfg, Manifest& m, const std::string& stage, F&& body) {
    invalidate_from(m, stage);
    write_manifest(cfg.out_dir, m, cfg);
    try {
        if constexpr (std::is_void_v<decltype(body())>) {
            body();
            m.mark(stage, true);
            write_manifest(cfg.out_dir, m, cfg);
        } else {
            auto result = body();
            m.mark(stage, true);
            write_manifest(cfg.out_dir, m, cfg);
            return result;
        }
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        write_manifest(cfg.out_dir, m, cfg);
        throw StageError(stage, e.what());
    }
}

}  // namespace

void write_manifest(const std::filesystem::path& dir, const Manifest& m, const RunConfig& cfg) {
    std::ostringstream out;
    out << "vinecredit_version " << VINECREDIT_VERSION << '\n';
    out << "firm_id " << m.firm_id << '\n';
    write_config_lines(out, cfg, "config ", false);
    bool all = true;
    for (const auto& [name, done] : m.stages) {
        out << "stage " << name << ' ' << (done ? "complete" : "incomplete") << '\n';
        all = all && done;
    }
    out << "status " << (all ? "complete" : "incomplete") << '\n';
    for (const auto& [name, done] : m.stages) {
        if (!done) continue;
        for (const auto& p : stage_artifacts(dir, name)) {
            out << "artifact " << p.filename().string() << " fnv1a64 " << fnv1a_hex(read_file(p)) << '\n';
        }
    }
    write_file_atomic(manifest_path(dir), out.str());
}

Manifest read_manifest(const std::filesystem::path& dir) {
    std::istringstream in(read_file(manifest_path(dir)));
    Manifest m;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "firm_id") {
            std::getline(ss >> std::ws, m.firm_id);
        } else if (tag == "stage") {
            std::string name;
            std::string state;
            ss >> name >> state;
            m.stages.emplace_back(name, state == "complete");
        } else if (tag == "artifact") {
            std::string name;
            std::string kind;
            std::string digest;
            ss >> name >> kind >> digest;
            m.artifacts.emplace_back(name, digest);
        }
    }
    return m;
}

void run_ingest(const std::filesystem::path& input, const RunConfig& cfg) {
    Manifest m = fresh_manifest(input.stem().string());
    run_stage(cfg, m, "ingest", [&] {
        const BalancePanel panel = ingest_panel(input, cfg.frequency, cfg.expansion);
        std::ostringstream out;
        write_panel_csv(out, panel);
        write_file_atomic(panel_path(cfg.out_dir), out.str());
    });
}

void run_fit_marginals(const RunConfig& cfg) {
    Manifest m = require_stage(cfg.out_dir, "ingest", "marginals");
    run_stage(cfg, m, "marginals", [&] {
        BalancePanel panel = ingest_panel(panel_path(cfg.out_dir), Frequency::Monthly);
        const auto posts = fit_marginals(panel, cfg);
        for (Role r : kAllRoles) {
            std::ostringstream out;
            write_posterior_csv(out, posts[static_cast<std::size_t>(r)]);
            write_file_atomic(posterior_path(cfg.out_dir, r), out.str());
        }
    });
}

namespace {

std::array<MixtureParams, 4> posterior_means(const std::array<MixturePosterior, 4>& posts) {
    std::array<MixtureParams, 4> out;
    for (std::size_t k = 0; k < 4; ++k) out[k] = posts[k].posterior_mean;
    return out;
}

}  // namespace

void run_fit_vine(const RunConfig& cfg) {
    Manifest m = require_stage(cfg.out_dir, "marginals", "vine");
    run_stage(cfg, m, "vine", [&] {
        const BalancePanel panel = ingest_panel(panel_path(cfg.out_dir), Frequency::Monthly);
        const auto marginals = posterior_means(load_posteriors(cfg.out_dir));
        const DVineSpec vine = fit_panel_vine(panel_pit(panel, marginals), cfg);
        std::ostringstream out;
        write_vine_spec(out, vine);
        write_file_atomic(vine_path(cfg.out_dir), out.str());
    });
}

PDReport run_pd(const RunConfig& cfg) {
    Manifest m = require_stage(cfg.out_dir, "vine", "pd");
    return run_stage(cfg, m, "pd", [&] {
        const FirmModel model = make_firm_model(posterior_means(load_posteriors(cfg.out_dir)), load_vine(cfg.out_dir));
        const std::vector<double> equity = simulate_equity(model, cfg.n_sims, cfg.discount_factor(), pd_seed(cfg));
        const PDReport report = summarize_equity(equity, cfg.discount_factor(), pd_seed(cfg));
        std::ostringstream rep;
        write_pd_report(rep, report);
        write_file_atomic(pd_report_path(cfg.out_dir), rep.str());
        std::ostringstream eq;
        write_equity_csv(eq, equity);
        write_file_atomic(equity_path(cfg.out_dir), eq.str());
        return report;
    });
}

PDReport run_pipeline(const BalancePanel& panel, const RunConfig& cfg) {
    try {
        cfg.validate();
    } catch (const ArgumentError& e) {
        throw StageError("config", e.what());
    }
    Manifest m = fresh_manifest(panel.firm_id);
    run_stage(cfg, m, "ingest", [&] {
        std::ostringstream out;
        write_panel_csv(out, panel);
        write_file_atomic(panel_path(cfg.out_dir), out.str());
    });
    run_fit_marginals(cfg);
    run_fit_vine(cfg);
    return run_pd(cfg);
}

}  // namespace vinecredit
