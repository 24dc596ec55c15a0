#pragma once

#include "vinecredit/credit.hpp"
#include "vinecredit/dvine.hpp"
#include "vinecredit/mixture.hpp"

#include <array>
#include <filesystem>
#include <span>
#include <string>

namespace vinecredit {

/// Marginal block per role: posterior means with 95% credible intervals.
std::string format_marginals(const std::array<MixturePosterior, 4>& posts);
/// One line per edge: tree, pair|conditioning, family, parameters, tau.
/// Unfitted edges read `Independence  N/A  N/A  0`.
std::string format_vine_table(const DVineSpec& spec);
std::string format_pd(const PDReport& r);

/// Gaussian kernel density of the equity draws on an even grid
/// (Silverman bandwidth), as `equity,density` CSV.
std::string equity_density_csv(std::span<const double> equity, std::size_t grid_points = 200);

struct ReportOutput {
    std::string text;
    std::string density_csv;
};

/// Builds the report from a run directory. Throws IoError naming the first
/// incomplete stage, or the missing file.
ReportOutput emit_report(const std::filesystem::path& dir);

}  // namespace vinecredit
