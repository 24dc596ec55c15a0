#pragma once

#include "vinecredit/credit.hpp"

#include <compare>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace vinecredit {

enum class Frequency { Monthly, Semiannual };
/// How a semiannual row becomes six monthly rows.
enum class Expansion { Repeat, Linear };

std::string_view frequency_name(Frequency f);
Frequency parse_frequency(std::string_view s);
std::string_view expansion_name(Expansion e);
Expansion parse_expansion(std::string_view s);

struct YearMonth {
    int year = 0;
    int month = 1;  // 1..12

    /// Parses YYYY-MM; throws ArgumentError otherwise.
    static YearMonth parse(std::string_view s);
    std::string to_string() const;
    YearMonth plus_months(int k) const;
    friend auto operator<=>(const YearMonth&, const YearMonth&) = default;
};

struct PanelRow {
    YearMonth date;
    double a_c = 0.0;
    double a_l = 0.0;
    double b_c = 0.0;
    double b_l = 0.0;

    double value(Role r) const;
    friend bool operator==(const PanelRow&, const PanelRow&) = default;
};

/// Monthly balance-sheet observations of one firm.
struct BalancePanel {
    std::string firm_id;
    std::vector<PanelRow> rows;            // monthly, strictly increasing dates
    Frequency source_frequency = Frequency::Monthly;

    std::vector<double> series(Role r) const;
};

/// CSV with header `date,a_c,a_l,b_c,b_l` and YYYY-MM dates. A semiannual row
/// dated m covers months m .. m+5: Repeat holds the values constant, Linear
/// interpolates toward the next row (the last row is held constant).
/// Errors name the offending line and column.
BalancePanel parse_panel(std::istream& in, Frequency frequency, Expansion expansion = Expansion::Repeat,
                         std::string firm_id = "firm");
BalancePanel ingest_panel(const std::filesystem::path& path, Frequency frequency,
                          Expansion expansion = Expansion::Repeat);

/// Monthly CSV in the ingestion format.
void write_panel_csv(std::ostream& out, const BalancePanel& panel);

}  // namespace vinecredit
