#include "vinecredit/panel.hpp"

#include "vinecredit/error.hpp"
#include "vinecredit/numeric.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>

namespace vinecredit {

std::string_view frequency_name(Frequency f) { return f == Frequency::Monthly ? "monthly" : "semiannual"; }

Frequency parse_frequency(std::string_view s) {
    if (s == "monthly") return Frequency::Monthly;
    if (s == "semiannual") return Frequency::Semiannual;
    throw ArgumentError("frequency must be 'monthly' or 'semiannual', got '" + std::string(s) + "'");
}

std::string_view expansion_name(Expansion e) { return e == Expansion::Repeat ? "repeat" : "linear"; }

Expansion parse_expansion(std::string_view s) {
    if (s == "repeat") return Expansion::Repeat;
    if (s == "linear") return Expansion::Linear;
    throw ArgumentError("expansion must be 'repeat' or 'linear', got '" + std::string(s) + "'");
}

YearMonth YearMonth::parse(std::string_view s) {
    auto digits = [&](std::size_t from, std::size_t len) {
        int v = 0;
        for (std::size_t k = from; k < from + len; ++k) {
            if (s[k] < '0' || s[k] > '9') return -1;
            v = v * 10 + (s[k] - '0');
        }
        return v;
    };
    if (s.size() != 7 || s[4] != '-') throw ArgumentError("date '" + std::string(s) + "' is not YYYY-MM");
    const int y = digits(0, 4);
    const int m = digits(5, 2);
    if (y < 0 || m < 1 || m > 12) throw ArgumentError("date '" + std::string(s) + "' is not YYYY-MM");
    return {y, m};
}

std::string YearMonth::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
    return buf;
}

YearMonth YearMonth::plus_months(int k) const {
    const int total = year * 12 + (month - 1) + k;
    return {total / 12, total % 12 + 1};
}

double PanelRow::value(Role r) const {
    switch (r) {
        case Role::A_C: return a_c;
        case Role::A_L: return a_l;
        case Role::B_C: return b_c;
        case Role::B_L: return b_l;
    }
    return 0.0;
}

std::vector<double> BalancePanel::series(Role r) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(row.value(r));
    return out;
}

namespace {

constexpr std::array<const char*, 5> kColumns = {"date", "a_c", "a_l", "b_c", "b_l"};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string where(std::size_t line, std::size_t col) {
    return "line " + std::to_string(line) + ", column '" + kColumns[col] + "'";
}

}  // namespace

BalancePanel parse_panel(std::istream& in, Frequency frequency, Expansion expansion, std::string firm_id) {
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (!have_header && std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != kColumns.size()) {
            throw IoError("panel: header on line " + std::to_string(line_no) + " must be date,a_c,a_l,b_c,b_l");
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (cells[c] != kColumns[c]) {
                throw IoError("panel: header on line " + std::to_string(line_no) + " must be date,a_c,a_l,b_c,b_l; found '" +
                              cells[c] + "' for column " + std::to_string(c + 1));
            }
        }
        have_header = true;
    }
    if (!have_header) throw IoError("panel: empty file");

    std::vector<PanelRow> source;
    std::vector<std::size_t> source_lines;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != kColumns.size()) {
            throw IoError("panel: line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                          " cells, expected 5");
        }
        PanelRow row;
        try {
            row.date = YearMonth::parse(cells[0]);
        } catch (const ArgumentError& e) {
            throw IoError("panel: " + where(line_no, 0) + ": " + e.what());
        }
        std::array<double*, 4> targets = {&row.a_c, &row.a_l, &row.b_c, &row.b_l};
        for (std::size_t c = 1; c < kColumns.size(); ++c) {
            const std::string& cell = cells[c];
            if (cell.empty()) throw IoError("panel: " + where(line_no, c) + " is empty");
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end != cell.c_str() + cell.size() || !std::isfinite(v)) {
                throw IoError("panel: " + where(line_no, c) + ": '" + cell + "' is not a finite number");
            }
            *targets[c - 1] = v;
        }
        if (!source.empty() && !(source.back().date < row.date)) {
            throw IoError("panel: " + where(line_no, 0) + ": date " + row.date.to_string() +
                          " does not follow " + source.back().date.to_string());
        }
        source.push_back(row);
        source_lines.push_back(line_no);
    }
    if (source.empty()) throw IoError("panel: no data rows");

    BalancePanel panel;
    panel.firm_id = std::move(firm_id);
    panel.source_frequency = frequency;
    if (frequency == Frequency::Monthly) {
        panel.rows = std::move(source);
        return panel;
    }
    for (std::size_t k = 0; k < source.size(); ++k) {
        if (k + 1 < source.size() && source[k].date.plus_months(6) > source[k + 1].date) {
            throw IoError("panel: " + where(source_lines[k + 1], 0) + ": semiannual rows must be at least 6 months apart");
        }
        for (int m = 0; m < 6; ++m) {
            PanelRow row = source[k];
            row.date = source[k].date.plus_months(m);
            if (expansion == Expansion::Linear && k + 1 < source.size() && m > 0) {
                const double w = m / 6.0;
                const PanelRow& nx = source[k + 1];
                row.a_c += w * (nx.a_c - row.a_c);
                row.a_l += w * (nx.a_l - row.a_l);
                row.b_c += w * (nx.b_c - row.b_c);
                row.b_l += w * (nx.b_l - row.b_l);
            }
            panel.rows.push_back(row);
        }
    }
    return panel;
}

BalancePanel ingest_panel(const std::filesystem::path& path, Frequency frequency, Expansion expansion) {
    std::ifstream in(path);
    if (!in) throw IoError("panel: cannot open " + path.string());
    return parse_panel(in, frequency, expansion, path.stem().string());
}

void write_panel_csv(std::ostream& out, const BalancePanel& panel) {
    out << "date,a_c,a_l,b_c,b_l\n";
    for (const auto& r : panel.rows) {
        out << r.date.to_string() << ',' << format_double(r.a_c) << ',' << format_double(r.a_l) << ','
            << format_double(r.b_c) << ',' << format_double(r.b_l) << '\n';
    }
}

}  // namespace vinecredit
