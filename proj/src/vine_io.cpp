#include "vinecredit/dvine.hpp"

#include "vinecredit/error.hpp"
#include "vinecredit/numeric.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

namespace vinecredit {

namespace {

double parse_double(const std::string& s, std::size_t line) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) {
        throw IoError("vine spec line " + std::to_string(line) + ": '" + s + "' is not a number");
    }
    return v;
}

int parse_int(const std::string& s, std::size_t line) {
    const double v = parse_double(s, line);
    if (v != static_cast<int>(v)) throw IoError("vine spec line " + std::to_string(line) + ": expected an integer");
    return static_cast<int>(v);
}

std::string join_names(const DVineSpec& s, const std::vector<int>& vars, const char* empty) {
    if (vars.empty()) return empty;
    std::string out;
    for (std::size_t k = 0; k < vars.size(); ++k) {
        if (k > 0) out += ",";
        out += s.names[static_cast<std::size_t>(vars[k])];
    }
    return out;
}

}  // namespace

void write_vine_spec(std::ostream& out, const DVineSpec& spec) {
    spec.validate();
    out << "dvine " << spec.dim() << "\n";
    out << "order";
    for (int v : spec.order) out << ' ' << v;
    out << "\nnames";
    for (const auto& name : spec.names) out << ' ' << name;
    out << "\n# tree pos pair cond family rotation theta1 theta2 tau status loglik se1 se2\n";
    for (int t = 1; t < static_cast<int>(spec.dim()); ++t) {
        for (int i = 0; i < static_cast<int>(spec.dim()) - t; ++i) {
            const VineEdge& e = spec.edge(t, i);
            const auto [a, b] = spec.edge_pair(t, i);
            const double tau = kendall_tau_of(e.copula);
            char tau_buf[32];
            std::snprintf(tau_buf, sizeof tau_buf, "%.4f", tau == 0.0 ? 0.0 : tau);
            out << t << ' ' << i << ' ' << join_names(spec, {a, b}, "") << ' '
                << join_names(spec, spec.edge_conditioning(t, i), "-") << ' ' << family_name(e.copula.family) << ' '
                << rotation_degrees(e.copula.rotation) << ' ' << format_double(e.copula.theta1) << ' '
                << format_double(e.copula.theta2) << ' ' << tau_buf << ' ' << edge_status_name(e.status) << ' '
                << format_double(e.loglik) << ' ' << format_double(e.std_error[0]) << ' '
                << format_double(e.std_error[1]) << '\n';
        }
    }
}

DVineSpec read_vine_spec(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            return true;
        }
        return false;
    };
    auto tokens = [&]() {
        std::istringstream ss(line);
        std::vector<std::string> out;
        std::string tok;
        while (ss >> tok) out.push_back(tok);
        return out;
    };

    if (!next_line()) throw IoError("vine spec: empty input");
    auto head = tokens();
    if (head.size() != 2 || head[0] != "dvine") throw IoError("vine spec line 1: expected 'dvine <dim>'");
    const int d = parse_int(head[1], line_no);
    if (d < 2 || d > 8) throw IoError("vine spec: dimension must be in [2,8]");

    if (!next_line()) throw IoError("vine spec: missing order line");
    auto order_tok = tokens();
    if (order_tok.size() != static_cast<std::size_t>(d) + 1 || order_tok[0] != "order") {
        throw IoError("vine spec line " + std::to_string(line_no) + ": expected 'order' with " + std::to_string(d) +
                      " entries");
    }
    std::vector<int> order;
    for (int k = 1; k <= d; ++k) order.push_back(parse_int(order_tok[static_cast<std::size_t>(k)], line_no));

    if (!next_line()) throw IoError("vine spec: missing names line");
    auto name_tok = tokens();
    if (name_tok.size() != static_cast<std::size_t>(d) + 1 || name_tok[0] != "names") {
        throw IoError("vine spec line " + std::to_string(line_no) + ": expected 'names' with " + std::to_string(d) +
                      " entries");
    }
    name_tok.erase(name_tok.begin());

    DVineSpec spec;
    try {
        spec = DVineSpec::independence(order, name_tok);
    } catch (const ArgumentError& e) {
        throw IoError(std::string("vine spec: ") + e.what());
    }
    const int n_edges = d * (d - 1) / 2;
    std::vector<bool> seen(static_cast<std::size_t>(n_edges), false);
    int count = 0;
    while (next_line()) {
        auto tok = tokens();
        if (tok.size() != 13) {
            throw IoError("vine spec line " + std::to_string(line_no) + ": expected 13 fields, got " +
                          std::to_string(tok.size()));
        }
        const int t = parse_int(tok[0], line_no);
        const int i = parse_int(tok[1], line_no);
        if (t < 1 || t >= d || i < 0 || i >= d - t) {
            throw IoError("vine spec line " + std::to_string(line_no) + ": edge (" + tok[0] + ", " + tok[1] +
                          ") out of range");
        }
        const auto [a, b] = spec.edge_pair(t, i);
        if (tok[2] != join_names(spec, {a, b}, "") || tok[3] != join_names(spec, spec.edge_conditioning(t, i), "-")) {
            throw IoError("vine spec line " + std::to_string(line_no) + ": pair/conditioning set does not match the order");
        }
        const std::size_t slot = static_cast<std::size_t>((t - 1) * d - (t - 1) * t / 2 + i);
        if (seen[slot]) throw IoError("vine spec line " + std::to_string(line_no) + ": duplicate edge");
        seen[slot] = true;
        ++count;
        VineEdge& e = spec.edge(t, i);
        try {
            e.copula.family = parse_family(tok[4]);
            e.copula.rotation = rotation_from_degrees(parse_int(tok[5], line_no));
            e.status = parse_edge_status(tok[9]);
        } catch (const ArgumentError& err) {
            throw IoError("vine spec line " + std::to_string(line_no) + ": " + err.what());
        }
        e.copula.theta1 = parse_double(tok[6], line_no);
        e.copula.theta2 = parse_double(tok[7], line_no);
        e.loglik = parse_double(tok[10], line_no);
        e.std_error = {parse_double(tok[11], line_no), parse_double(tok[12], line_no)};
    }
    if (count != n_edges) {
        throw IoError("vine spec: expected " + std::to_string(n_edges) + " edges, found " + std::to_string(count));
    }
    try {
        spec.validate();
    } catch (const std::exception& e) {
        throw IoError(std::string("vine spec: ") + e.what());
    }
    return spec;
}

}  // namespace vinecredit
