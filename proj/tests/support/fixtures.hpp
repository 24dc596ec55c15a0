#pragma once

#include "vinecredit/copula.hpp"
#include "vinecredit/dvine.hpp"
#include "vinecredit/panel.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace fixture {

using vinecredit::Family;
using vinecredit::PairCopula;
using vinecredit::Rotation;

// Three interior parameter points per family (one for Independence), away from
// the box edges where densities become numerically spiky.
inline std::vector<PairCopula> parameter_points(Family f) {
    auto pc = [f](double a, double b = 0.0) { return PairCopula{f, Rotation::None, a, b}; };
    switch (f) {
        case Family::Independence: return {PairCopula::independence()};
        case Family::Normal: return {pc(-0.5), pc(0.3), pc(0.8)};
        case Family::StudentT: return {pc(0.5, 4.0), pc(-0.3, 10.0), pc(0.8, 3.0)};
        case Family::Clayton: return {pc(0.5), pc(2.0), pc(6.0)};
        case Family::Gumbel: return {pc(1.3), pc(2.0), pc(4.0)};
        case Family::Frank: return {pc(-5.0), pc(2.0), pc(7.2222)};
        case Family::Joe: return {pc(1.3), pc(2.0), pc(4.0)};
        case Family::BB1: return {pc(0.5, 1.5), pc(1.0, 2.0), pc(2.0, 1.2)};
        case Family::BB6: return {pc(1.5, 1.5), pc(2.0, 1.2), pc(1.2, 2.0)};
        case Family::BB7: return {pc(1.5, 0.8), pc(2.0, 2.0), pc(1.2, 0.5)};
        case Family::BB8: return {pc(2.0, 0.8), pc(3.0, 0.6), pc(4.0, 0.9)};
    }
    return {};
}

// Every allowed family/rotation at the middle parameter point.
inline std::vector<PairCopula> catalog_sample() {
    std::vector<PairCopula> out;
    for (Family f : vinecredit::kAllFamilies) {
        const auto pts = parameter_points(f);
        const PairCopula base = pts[pts.size() / 2];
        for (Rotation r : vinecredit::kAllRotations) {
            if (!vinecredit::rotation_allowed(f, r)) continue;
            PairCopula c = base;
            c.rotation = r;
            out.push_back(c);
        }
    }
    return out;
}

// Every allowed family/rotation at every parameter point.
inline std::vector<PairCopula> catalog_full() {
    std::vector<PairCopula> out;
    for (Family f : vinecredit::kAllFamilies) {
        for (const PairCopula& base : parameter_points(f)) {
            for (Rotation r : vinecredit::kAllRotations) {
                if (!vinecredit::rotation_allowed(f, r)) continue;
                PairCopula c = base;
                c.rotation = r;
                out.push_back(c);
            }
        }
    }
    return out;
}

// Four-dimensional D-vine on the path 0-1-2-3: Clayton 2, Frank 5, Gumbel 2 in
// tree 1; Normal 0.3 and 0.2 in tree 2; independence in tree 3.
inline vinecredit::DVineSpec reference_vine() {
    using vinecredit::EdgeStatus;
    auto spec = vinecredit::DVineSpec::independence({0, 1, 2, 3});
    spec.edge(1, 0) = {PairCopula{Family::Clayton, Rotation::None, 2.0, 0.0}, EdgeStatus::Fitted, 0.0, {}};
    spec.edge(1, 1) = {PairCopula{Family::Frank, Rotation::None, 5.0, 0.0}, EdgeStatus::Fitted, 0.0, {}};
    spec.edge(1, 2) = {PairCopula{Family::Gumbel, Rotation::None, 2.0, 0.0}, EdgeStatus::Fitted, 0.0, {}};
    spec.edge(2, 0) = {PairCopula{Family::Normal, Rotation::None, 0.3, 0.0}, EdgeStatus::Fitted, 0.0, {}};
    spec.edge(2, 1) = {PairCopula{Family::Normal, Rotation::None, 0.2, 0.0}, EdgeStatus::Fitted, 0.0, {}};
    return spec;
}

// Monthly panel whose four series are two-component Normal mixtures tied
// together by a common factor. Assets sit far above liabilities.
inline vinecredit::BalancePanel solvent_panel(std::size_t months, unsigned seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> z;
    std::bernoulli_distribution second(0.4);
    const double lo[4] = {100.0, 300.0, 40.0, 60.0};
    const double gap[4] = {12.0, 20.0, 8.0, 10.0};
    vinecredit::BalancePanel panel;
    panel.firm_id = "synthetic";
    vinecredit::YearMonth date{1998, 1};
    for (std::size_t t = 0; t < months; ++t) {
        const double common = z(gen);
        double x[4];
        for (int k = 0; k < 4; ++k) {
            x[k] = lo[k] + (second(gen) ? gap[k] : 0.0) + 2.0 * (0.7 * common + std::sqrt(0.51) * z(gen));
        }
        panel.rows.push_back({date, x[0], x[1], x[2], x[3]});
        date = date.plus_months(1);
    }
    return panel;
}

}  // namespace fixture
