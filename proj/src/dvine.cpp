#include "vinecredit/dvine.hpp"

#include "vinecredit/dependence.hpp"
#include "vinecredit/error.hpp"
#include "vinecredit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace vinecredit {

TauMatrix::TauMatrix(std::size_t d) : d_(d), values_(d * d, 0.0) {
    for (std::size_t i = 0; i < d; ++i) values_[i * d + i] = 1.0;
}

TauMatrix TauMatrix::from_data(const ColumnData& columns) {
    TauMatrix m(columns.size());
    for (std::size_t i = 0; i < columns.size(); ++i) {
        for (std::size_t j = i + 1; j < columns.size(); ++j) {
            m.set(i, j, empirical_kendall_tau(columns[i], columns[j]));
        }
    }
    return m;
}

void TauMatrix::set(std::size_t i, std::size_t j, double tau) {
    if (i >= d_ || j >= d_) throw ArgumentError("TauMatrix: index out of range");
    if (!(tau >= -1.0 && tau <= 1.0)) throw ArgumentError("TauMatrix: entries must lie in [-1,1]");
    values_[i * d_ + j] = tau;
    values_[j * d_ + i] = tau;
}

std::vector<int> select_order(const TauMatrix& tau) {
    const std::size_t d = tau.dim();
    if (d < 3 || d > 8) throw ArgumentError("select_order: dimension must be in [3,8], got " + std::to_string(d));
    std::vector<int> path(d);
    std::iota(path.begin(), path.end(), 0);
    std::vector<int> best;
    double best_score = -1.0;
    // permutations come out in lexicographic order, so the first maximiser wins ties
    do {
        if (path.front() > path.back()) continue;
        double score = 0.0;
        for (std::size_t i = 0; i + 1 < d; ++i) {
            score += std::fabs(tau(static_cast<std::size_t>(path[i]), static_cast<std::size_t>(path[i + 1])));
        }
        if (score > best_score + 1e-12) {
            best_score = score;
            best = path;
        }
    } while (std::next_permutation(path.begin(), path.end()));
    return best;
}

std::string_view edge_status_name(EdgeStatus s) {
    switch (s) {
        case EdgeStatus::Fitted: return "fitted";
        case EdgeStatus::TestedIndependent: return "independent";
        case EdgeStatus::Skipped: return "skipped";
    }
    return "?";
}

EdgeStatus parse_edge_status(std::string_view s) {
    for (EdgeStatus e : {EdgeStatus::Fitted, EdgeStatus::TestedIndependent, EdgeStatus::Skipped}) {
        if (edge_status_name(e) == s) return e;
    }
    throw ArgumentError("unknown edge status '" + std::string(s) + "'");
}

namespace {

std::vector<std::string> default_names(std::size_t d) {
    std::vector<std::string> out(d);
    for (std::size_t i = 0; i < d; ++i) out[i] = "V" + std::to_string(i + 1);
    return out;
}

void check_order(const std::vector<int>& order) {
    const std::size_t d = order.size();
    if (d < 2 || d > 8) throw ArgumentError("D-vine dimension must be in [2,8], got " + std::to_string(d));
    std::vector<int> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < d; ++i) {
        if (sorted[i] != static_cast<int>(i)) throw ArgumentError("D-vine order must be a permutation of 0..d-1");
    }
}

bool same_double(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

}  // namespace

DVineSpec DVineSpec::independence(std::vector<int> order, std::vector<std::string> names) {
    check_order(order);
    DVineSpec s;
    const std::size_t d = order.size();
    s.order = std::move(order);
    s.names = names.empty() ? default_names(d) : std::move(names);
    s.trees.resize(d - 1);
    for (std::size_t t = 1; t < d; ++t) s.trees[t - 1].assign(d - t, VineEdge{});
    return s;
}

std::pair<int, int> DVineSpec::edge_pair(int tree, int pos) const {
    return {order.at(static_cast<std::size_t>(pos)), order.at(static_cast<std::size_t>(pos + tree))};
}

std::vector<int> DVineSpec::edge_conditioning(int tree, int pos) const {
    return std::vector<int>(order.begin() + pos + 1, order.begin() + pos + tree);
}

void DVineSpec::validate() const {
    check_order(order);
    const std::size_t d = order.size();
    if (names.size() != d) throw ArgumentError("D-vine: expected " + std::to_string(d) + " variable names");
    for (const auto& name : names) {
        if (name.empty() || name.find_first_of(" \t\r\n,|#") != std::string::npos) {
            throw ArgumentError("D-vine: variable name '" + name + "' is empty or contains a separator");
        }
    }
    if (trees.size() != d - 1) throw ArgumentError("D-vine: expected " + std::to_string(d - 1) + " trees");
    for (std::size_t t = 1; t < d; ++t) {
        if (trees[t - 1].size() != d - t) {
            throw ArgumentError("D-vine: tree " + std::to_string(t) + " must have " + std::to_string(d - t) +
                                " edges");
        }
        for (const auto& e : trees[t - 1]) {
            vinecredit::validate(e.copula);
            if (e.status != EdgeStatus::Fitted && e.copula.family != Family::Independence) {
                throw ArgumentError("D-vine: an unfitted edge must carry the Independence copula");
            }
        }
    }
}

bool operator==(const VineEdge& a, const VineEdge& b) {
    return a.copula == b.copula && a.status == b.status && same_double(a.loglik, b.loglik) &&
           same_double(a.std_error[0], b.std_error[0]) && same_double(a.std_error[1], b.std_error[1]);
}

bool operator==(const DVineSpec& a, const DVineSpec& b) {
    return a.order == b.order && a.names == b.names && a.trees == b.trees;
}

namespace {

// Pseudo-observations of one tree: fwd[i] = F(x_i | x_{i+1..i+t}),
// bwd[i] = F(x_{i+t} | x_{i..i+t-1}) with positions along the path.
struct TreeLevel {
    std::vector<std::vector<double>> fwd;
    std::vector<std::vector<double>> bwd;
};

std::string edge_label(const DVineSpec& s, int tree, int pos) {
    const auto [a, b] = s.edge_pair(tree, pos);
    std::string out = s.names[static_cast<std::size_t>(a)] + "," + s.names[static_cast<std::size_t>(b)];
    const auto cond = s.edge_conditioning(tree, pos);
    if (!cond.empty()) {
        out += "|";
        for (std::size_t k = 0; k < cond.size(); ++k) {
            if (k > 0) out += ",";
            out += s.names[static_cast<std::size_t>(cond[k])];
        }
    }
    return out;
}

bool is_independent(const VineEdge& e) { return e.copula.family == Family::Independence; }

}  // namespace

DVineSpec fit_dvine(const ColumnData& u, const std::vector<int>& order, const CandidateSet& candidates,
                    double level, std::vector<std::string> names) {
    const std::size_t d = u.size();
    if (order.size() != d) throw ArgumentError("fit_dvine: order length does not match the number of columns");
    DVineSpec spec = DVineSpec::independence(order, std::move(names));
    if (spec.names.size() != d) throw ArgumentError("fit_dvine: names length does not match the number of columns");
    const std::size_t n = u.front().size();
    if (n < 30) throw ArgumentError("fit_dvine: need at least 30 observations, got " + std::to_string(n));
    for (std::size_t j = 0; j < d; ++j) {
        if (u[j].size() != n) throw ArgumentError("fit_dvine: columns differ in length");
        for (std::size_t r = 0; r < n; ++r) {
            if (!(u[j][r] > 0.0 && u[j][r] < 1.0)) {
                throw ArgumentError("fit_dvine: entry (" + std::to_string(r) + ", " + std::to_string(j) +
                                    ") is outside (0,1)");
            }
        }
    }

    TreeLevel prev;
    for (std::size_t i = 0; i < d; ++i) {
        prev.fwd.push_back(u[static_cast<std::size_t>(order[i])]);
        prev.bwd.push_back(u[static_cast<std::size_t>(order[i])]);
    }

    for (int t = 1; t < static_cast<int>(d); ++t) {
        const int edges = static_cast<int>(d) - t;
        TreeLevel next;
        next.fwd.resize(static_cast<std::size_t>(edges));
        next.bwd.resize(static_cast<std::size_t>(edges));
        for (int i = 0; i < edges; ++i) {
            const auto& a = prev.fwd[static_cast<std::size_t>(i)];
            const auto& b = prev.bwd[static_cast<std::size_t>(i + 1)];
            VineEdge& edge = spec.edge(t, i);
            const bool skip = t >= 3 && (is_independent(spec.edge(t - 1, i)) || is_independent(spec.edge(t - 1, i + 1)));
            if (skip) {
                edge.status = EdgeStatus::Skipped;
            } else {
                try {
                    const FitResult fit = select_pair_copula(a, b, candidates, level);
                    edge.copula = fit.copula;
                    edge.loglik = fit.loglik;
                    edge.std_error = fit.std_error;
                    edge.status = fit.copula.family == Family::Independence ? EdgeStatus::TestedIndependent
                                                                             : EdgeStatus::Fitted;
                } catch (const std::exception& e) {
                    throw NumericError("fit_dvine: tree " + std::to_string(t) + " edge " + std::to_string(i) + " (" +
                                       edge_label(spec, t, i) + "): " + e.what());
                }
            }
            auto& f = next.fwd[static_cast<std::size_t>(i)];
            auto& g = next.bwd[static_cast<std::size_t>(i)];
            if (is_independent(edge)) {
                f = a;
                g = b;
                continue;
            }
            f.resize(n);
            g.resize(n);
            for (std::size_t r = 0; r < n; ++r) {
                f[r] = clamp_unit(h_function(edge.copula, a[r], b[r]));
                g[r] = clamp_unit(h_function_first(edge.copula, a[r], b[r]));
            }
        }
        prev = std::move(next);
    }
    return spec;
}

double dvine_log_density(const DVineSpec& spec, std::span<const double> u) {
    const std::size_t d = spec.dim();
    if (u.size() != d) throw ArgumentError("dvine_density: point has the wrong dimension");
    std::array<double, 8> fwd{};
    std::array<double, 8> bwd{};
    for (std::size_t i = 0; i < d; ++i) fwd[i] = bwd[i] = clamp_unit(u[static_cast<std::size_t>(spec.order[i])]);
    double log_density = 0.0;
    for (int t = 1; t < static_cast<int>(d); ++t) {
        const int edges = static_cast<int>(d) - t;
        // fwd[i] and bwd[i] are overwritten in increasing i; bwd[i + 1] is still the previous tree's value
        for (int i = 0; i < edges; ++i) {
            const PairCopula& c = spec.edge(t, i).copula;
            const double a = fwd[static_cast<std::size_t>(i)];
            const double b = bwd[static_cast<std::size_t>(i + 1)];
            if (c.family == Family::Independence) {
                bwd[static_cast<std::size_t>(i)] = b;
                continue;
            }
            log_density += copula_log_density(c, a, b);
            fwd[static_cast<std::size_t>(i)] = clamp_unit(h_function(c, a, b));
            bwd[static_cast<std::size_t>(i)] = clamp_unit(h_function_first(c, a, b));
        }
    }
    return log_density;
}

double dvine_density(const DVineSpec& spec, std::span<const double> u) {
    return std::exp(dvine_log_density(spec, u));
}

double dvine_loglik(const DVineSpec& spec, const ColumnData& u) {
    const std::size_t d = spec.dim();
    if (u.size() != d) throw ArgumentError("dvine_loglik: wrong number of columns");
    std::vector<double> point(d);
    double total = 0.0;
    for (std::size_t r = 0; r < u.front().size(); ++r) {
        for (std::size_t j = 0; j < d; ++j) point[j] = u[j][r];
        total += dvine_log_density(spec, point);
    }
    return total;
}

ColumnData simulate_dvine(const DVineSpec& spec, std::size_t n, std::uint64_t seed) {
    spec.validate();
    if (n < 1) throw ArgumentError("simulate_dvine: n must be at least 1");
    const std::size_t d = spec.dim();
    ColumnData out(d, std::vector<double>(n));
    RandomStream rng(seed);
    // fwd[t][i] = F(x_i | x_{i+1..i+t}), bwd[t][i] = F(x_{i+t} | x_{i..i+t-1})
    std::array<std::array<double, 8>, 8> fwd{};
    std::array<std::array<double, 8>, 8> bwd{};
    std::array<double, 8> w{};
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t k = 0; k < d; ++k) w[k] = rng.uniform();
        try {
            fwd[0][0] = bwd[0][0] = w[0];
            for (std::size_t k = 1; k < d; ++k) {
                bwd[k][0] = w[k];
                for (std::size_t t = k; t >= 1; --t) {
                    const PairCopula& c = spec.edge(static_cast<int>(t), static_cast<int>(k - t)).copula;
                    const double p = bwd[t][k - t];
                    const double a = fwd[t - 1][k - t];
                    bwd[t - 1][k - t + 1] =
                        c.family == Family::Independence ? p : clamp_unit(h_inverse_first(c, p, a));
                }
                fwd[0][k] = bwd[0][k];
                for (std::size_t t = 1; t <= k; ++t) {
                    const PairCopula& c = spec.edge(static_cast<int>(t), static_cast<int>(k - t)).copula;
                    const double a = fwd[t - 1][k - t];
                    const double b = bwd[t - 1][k - t + 1];
                    fwd[t][k - t] = c.family == Family::Independence ? a : clamp_unit(h_function(c, a, b));
                }
            }
        } catch (const std::exception& e) {
            throw NumericError("simulate_dvine: sample " + std::to_string(r) + ": " + e.what());
        }
        for (std::size_t i = 0; i < d; ++i) out[static_cast<std::size_t>(spec.order[i])][r] = bwd[0][i];
    }
    return out;
}

}  // namespace vinecredit
