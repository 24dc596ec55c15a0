#pragma once

#include "vinecredit/copula_fit.hpp"
#include "vinecredit/credit.hpp"
#include "vinecredit/dvine.hpp"
#include "vinecredit/mixture.hpp"
#include "vinecredit/panel.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace vinecredit {

struct RunConfig {
    std::uint64_t seed = 20100;
    int iterations = 4000;
    int burnin = 1000;
    std::size_t n_sims = 10000;
    double indep_level = kDefaultIndepLevel;
    CandidateSet candidates = default_candidates();
    double discount_rate = 0.0;  // flat rate r; discount = exp(-r * horizon)
    double horizon = 1.0;        // years
    std::filesystem::path out_dir = "out";
    Frequency frequency = Frequency::Monthly;
    Expansion expansion = Expansion::Repeat;

    double discount_factor() const;
    /// Throws ArgumentError on out-of-range settings.
    void validate() const;
};

/// Applies `key = value` lines (blank lines and '#' comments ignored). Keys:
/// seed, iterations, burnin, n_sims, indep_level, families, discount_rate,
/// horizon, out, frequency, expansion. `families` is a comma list of family
/// names (every allowed rotation is included) or `all`.
void apply_config(RunConfig& cfg, std::istream& in);
void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value);
RunConfig load_config(const std::filesystem::path& path);
/// Same key = value format, every key, fixed order.
void write_config(std::ostream& out, const RunConfig& cfg);

/// Failure inside one pipeline stage.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& what)
        : std::runtime_error("stage '" + stage + "' failed: " + what), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

inline constexpr std::array<const char*, 4> kStages = {"ingest", "marginals", "vine", "pd"};

// Stage computations.
std::array<MixturePosterior, 4> fit_marginals(const BalancePanel& panel, const RunConfig& cfg);
ColumnData panel_pit(const BalancePanel& panel, const std::array<MixtureParams, 4>& marginals);
DVineSpec fit_panel_vine(const ColumnData& u, const RunConfig& cfg);
FirmModel make_firm_model(const std::array<MixtureParams, 4>& marginals, DVineSpec vine);
std::uint64_t pd_seed(const RunConfig& cfg);

// Artifact files inside the output directory.
std::filesystem::path posterior_path(const std::filesystem::path& dir, Role r);
std::filesystem::path vine_path(const std::filesystem::path& dir);
std::filesystem::path pd_report_path(const std::filesystem::path& dir);
std::filesystem::path equity_path(const std::filesystem::path& dir);
std::filesystem::path manifest_path(const std::filesystem::path& dir);
std::filesystem::path panel_path(const std::filesystem::path& dir);

/// Writes to a sibling temporary file, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

std::array<MixturePosterior, 4> load_posteriors(const std::filesystem::path& dir);
DVineSpec load_vine(const std::filesystem::path& dir);

/// Run manifest: library version, firm, configuration, per-stage status
/// (complete / incomplete) and a 64-bit FNV-1a digest of every artifact.
struct Manifest {
    std::string firm_id;
    std::vector<std::pair<std::string, bool>> stages;  // name, complete
    std::vector<std::pair<std::string, std::string>> artifacts;  // file name, digest

    bool complete(const std::string& stage) const;
    void mark(const std::string& stage, bool done);
};

std::string fnv1a_hex(const std::string& bytes);
void write_manifest(const std::filesystem::path& dir, const Manifest& m, const RunConfig& cfg);
Manifest read_manifest(const std::filesystem::path& dir);

// CLI-level stages operating on the output directory.
void run_ingest(const std::filesystem::path& input, const RunConfig& cfg);
void run_fit_marginals(const RunConfig& cfg);
void run_fit_vine(const RunConfig& cfg);
PDReport run_pd(const RunConfig& cfg);

/// Full pipeline: ingest, marginals, PIT, order selection, vine, PD. Every
/// stage is recorded in the manifest; a failing stage leaves it incomplete and
/// raises StageError.
PDReport run_pipeline(const BalancePanel& panel, const RunConfig& cfg);

}  // namespace vinecredit
