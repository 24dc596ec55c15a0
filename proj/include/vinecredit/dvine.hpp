#pragma once

#include "vinecredit/copula.hpp"
#include "vinecredit/copula_fit.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace vinecredit {

/// Data with one column per variable; every column has the same length.
using ColumnData = std::vector<std::vector<double>>;

/// Symmetric matrix of pairwise empirical Kendall's tau with unit diagonal.
class TauMatrix {
public:
    explicit TauMatrix(std::size_t d = 0);
    static TauMatrix from_data(const ColumnData& columns);

    std::size_t dim() const { return d_; }
    double operator()(std::size_t i, std::size_t j) const { return values_[i * d_ + j]; }
    /// Sets both (i,j) and (j,i).
    void set(std::size_t i, std::size_t j, double tau);

private:
    std::size_t d_;
    std::vector<double> values_;
};

/// Path over the variables maximising the summed |tau| of adjacent pairs, by
/// enumeration. A path and its reverse describe the same D-vine; the returned
/// path has first < last, and ties go to the lexicographically smallest path.
std::vector<int> select_order(const TauMatrix& tau);

enum class EdgeStatus {
    Fitted,             // family selected and estimated
    TestedIndependent,  // independence test did not reject
    Skipped,            // not estimated because a feeding edge is independent
};

std::string_view edge_status_name(EdgeStatus s);
EdgeStatus parse_edge_status(std::string_view s);

struct VineEdge {
    PairCopula copula;
    EdgeStatus status = EdgeStatus::TestedIndependent;
    double loglik = 0.0;
    std::array<double, 2> std_error{std::numeric_limits<double>::quiet_NaN(),
                                    std::numeric_limits<double>::quiet_NaN()};
};

/// D-vine on d variables. Tree t (1-based) has d - t edges; edge (t, i) joins the
/// variables at path positions i and i + t given those strictly between them.
struct DVineSpec {
    std::vector<int> order;          // path over variable indices 0..d-1
    std::vector<std::string> names;  // variable labels, indexed by variable
    std::vector<std::vector<VineEdge>> trees;

    /// All-independence vine on the given path.
    static DVineSpec independence(std::vector<int> order, std::vector<std::string> names = {});

    std::size_t dim() const { return order.size(); }
    VineEdge& edge(int tree, int pos) {
        return trees.at(static_cast<std::size_t>(tree - 1)).at(static_cast<std::size_t>(pos));
    }
    const VineEdge& edge(int tree, int pos) const {
        return trees.at(static_cast<std::size_t>(tree - 1)).at(static_cast<std::size_t>(pos));
    }
    /// Variables joined by edge (tree, pos) and its conditioning set.
    std::pair<int, int> edge_pair(int tree, int pos) const;
    std::vector<int> edge_conditioning(int tree, int pos) const;

    /// Throws ArgumentError on shape problems and DomainError on invalid copulas.
    void validate() const;
};

bool operator==(const VineEdge& a, const VineEdge& b);
bool operator==(const DVineSpec& a, const DVineSpec& b);

/// Sequential tree-by-tree estimation. Each edge goes through the independence
/// test and AIC selection; pseudo-observations for the next tree come from the
/// h-functions of the fitted edges. From tree 3 on, an edge fed by an independent
/// edge is skipped.
DVineSpec fit_dvine(const ColumnData& u, const std::vector<int>& order, const CandidateSet& candidates,
                    double level = kDefaultIndepLevel, std::vector<std::string> names = {});

/// Copula density of the vine at one point (u indexed by variable).
double dvine_density(const DVineSpec& spec, std::span<const double> u);
double dvine_log_density(const DVineSpec& spec, std::span<const double> u);
double dvine_loglik(const DVineSpec& spec, const ColumnData& u);

/// n draws by conditional inversion; output columns are indexed by variable.
ColumnData simulate_dvine(const DVineSpec& spec, std::size_t n, std::uint64_t seed);

/// Plain-text layout: header lines, then one edge per line with tree, pair,
/// conditioning set, family, rotation, parameters, Kendall's tau and status.
void write_vine_spec(std::ostream& out, const DVineSpec& spec);
DVineSpec read_vine_spec(std::istream& in);

}  // namespace vinecredit
