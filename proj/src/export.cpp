#include "drcc/export.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

namespace drcc {

std::string format_number(double value) {
    if (value == 0.0) return "0";
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, result.ptr);
}

namespace {

constexpr const char* kObjectiveRow = "COST";

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

/// One MPS data line: code in columns 2-3, names in 5-12 and 15-22, value in 25-36.
std::string mps_line(const std::string& code, const std::string& name1, const std::string& name2,
                     const std::string& value) {
    std::string line = " " + pad(code, 2) + " " + pad(name1, 8) + "  " + pad(name2, 8) + "  " + value;
    while (!line.empty() && line.back() == ' ') line.pop_back();
    return line + "\n";
}

char sense_code(Sense s) {
    switch (s) {
    case Sense::LessEqual: return 'L';
    case Sense::GreaterEqual: return 'G';
    case Sense::Equal: return 'E';
    }
    return 'L';
}

const char* sense_text(Sense s) {
    switch (s) {
    case Sense::LessEqual: return "<=";
    case Sense::GreaterEqual: return ">=";
    case Sense::Equal: return "=";
    }
    return "<=";
}

void write_cone_comment(std::ostringstream& out, const MipModel& model, const char* lead) {
    if (model.cones.empty()) return;
    out << lead << " Second-order cone rows, each head >= || body ||_2 with head >= 0,\n";
    out << lead << " written as the quadratic constraint sum(body^2) - head^2 <= 0:\n";
    for (const auto& c : model.cones) {
        out << lead << "   " << c.name << ": " << model.variables[c.head].name << " >= ||(";
        for (std::size_t k = 0; k < c.body.size(); ++k) {
            out << (k ? ", " : "") << model.variables[c.body[k]].name;
        }
        out << ")||_2\n";
    }
}

} // namespace

std::string write_mps(const MipModel& model) {
    model.validate();
    const int n = model.num_variables();
    // column-wise coefficient lists in row order
    std::vector<std::vector<std::pair<std::string, double>>> columns(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        if (model.objective[j] != 0.0) columns[j].emplace_back(kObjectiveRow, model.objective[j]);
    }
    for (const auto& r : model.rows) {
        std::map<int, double> merged;
        for (const auto& [j, coef] : r.terms) merged[j] += coef;
        for (const auto& [j, coef] : merged) {
            if (coef != 0.0) columns[j].emplace_back(r.name, coef);
        }
    }

    std::ostringstream out;
    out << "NAME          " << model.name << "\n";
    write_cone_comment(out, model, "*");
    out << "ROWS\n";
    out << mps_line("N", kObjectiveRow, "", "");
    for (const auto& r : model.rows) out << mps_line(std::string(1, sense_code(r.sense)), r.name, "", "");
    for (const auto& c : model.cones) out << mps_line("L", c.name, "", "");

    out << "COLUMNS\n";
    bool in_integer = false;
    int marker = 0;
    for (int j = 0; j < n; ++j) {
        const bool binary = model.variables[j].binary;
        if (binary != in_integer) {
            out << "    " << pad("MARKER" + std::to_string(marker++), 8) << "  'MARKER'                 "
                << (binary ? "'INTORG'" : "'INTEND'") << "\n";
            in_integer = binary;
        }
        const std::string& name = model.variables[j].name;
        if (columns[j].empty()) out << mps_line("", name, kObjectiveRow, "0");
        for (const auto& [row, coef] : columns[j]) out << mps_line("", name, row, format_number(coef));
    }
    if (in_integer) out << "    " << pad("MARKER" + std::to_string(marker), 8) << "  'MARKER'                 'INTEND'\n";

    out << "RHS\n";
    if (model.objective_offset != 0.0) out << mps_line("", "RHS", kObjectiveRow, format_number(-model.objective_offset));
    for (const auto& r : model.rows) {
        if (r.rhs != 0.0) out << mps_line("", "RHS", r.name, format_number(r.rhs));
    }

    out << "BOUNDS\n";
    for (const auto& v : model.variables) {
        if (v.binary && v.lo == 0.0 && v.hi == 1.0) {
            out << mps_line("BV", "BND", v.name, "");
            continue;
        }
        if (v.lo == v.hi) {
            out << mps_line("FX", "BND", v.name, format_number(v.lo));
            continue;
        }
        if (std::isinf(v.lo) && std::isinf(v.hi)) {
            out << mps_line("FR", "BND", v.name, "");
            continue;
        }
        if (std::isinf(v.lo)) out << mps_line("MI", "BND", v.name, "");
        else if (v.lo != 0.0) out << mps_line("LO", "BND", v.name, format_number(v.lo));
        if (std::isfinite(v.hi)) out << mps_line("UP", "BND", v.name, format_number(v.hi));
    }

    for (const auto& c : model.cones) {
        out << "QCMATRIX   " << c.name << "\n";
        for (int j : c.body) out << mps_line("", model.variables[j].name, model.variables[j].name, "1");
        out << mps_line("", model.variables[c.head].name, model.variables[c.head].name, "-1");
    }
    out << "ENDATA\n";
    return out.str();
}

std::string write_lp(const MipModel& model) {
    model.validate();
    std::ostringstream out;
    out << "\\ " << model.name << "\n";
    for (const auto& [key, value] : model.diagnostics) out << "\\ " << key << " = " << value << "\n";
    write_cone_comment(out, model, "\\");

    auto write_terms = [&](const std::vector<std::pair<int, double>>& terms) {
        std::map<int, double> merged;
        for (const auto& [j, coef] : terms) merged[j] += coef;
        int written = 0;
        for (const auto& [j, coef] : merged) {
            if (coef == 0.0) continue;
            if (written > 0 && written % 6 == 0) out << "\n   ";
            out << (coef < 0 ? " - " : (written ? " + " : " ")) << format_number(std::abs(coef)) << " "
                << model.variables[j].name;
            ++written;
        }
        if (written == 0) out << " 0 " << model.variables.front().name;
    };

    out << "Minimize\n obj:";
    std::vector<std::pair<int, double>> objective;
    for (int j = 0; j < model.num_variables(); ++j) objective.emplace_back(j, model.objective[j]);
    write_terms(objective);
    if (model.objective_offset != 0.0) {
        out << (model.objective_offset < 0 ? " - " : " + ") << format_number(std::abs(model.objective_offset));
    }
    out << "\nSubject To\n";
    for (const auto& r : model.rows) {
        out << " " << r.name << ":";
        write_terms(r.terms);
        out << " " << sense_text(r.sense) << " " << format_number(r.rhs) << "\n";
    }
    for (const auto& c : model.cones) {
        out << " " << c.name << ": [";
        for (std::size_t k = 0; k < c.body.size(); ++k) {
            out << (k ? " + " : " ") << model.variables[c.body[k]].name << " ^2";
        }
        out << " - " << model.variables[c.head].name << " ^2 ] <= 0\n";
    }
    out << "Bounds\n";
    for (const auto& v : model.variables) {
        if (v.binary) continue;
        if (std::isinf(v.lo) && std::isinf(v.hi)) {
            out << " " << v.name << " free\n";
        } else if (v.lo == v.hi) {
            out << " " << v.name << " = " << format_number(v.lo) << "\n";
        } else {
            out << " " << (std::isinf(v.lo) ? "-inf" : format_number(v.lo)) << " <= " << v.name << " <= "
                << (std::isinf(v.hi) ? "+inf" : format_number(v.hi)) << "\n";
        }
    }
    if (model.num_binaries() > 0) {
        out << "Binaries\n";
        int written = 0;
        for (const auto& v : model.variables) {
            if (!v.binary) continue;
            out << (written % 10 == 0 ? (written ? "\n " : " ") : " ") << v.name;
            ++written;
        }
        out << "\n";
    }
    out << "End\n";
    return out.str();
}

std::string export_model(const MipModel& model, ExportFormat format) {
    return format == ExportFormat::Mps ? write_mps(model) : write_lp(model);
}

namespace {

double parse_number(const std::string& token) {
    double value = 0.0;
    const auto result = std::from_chars(token.data(), token.data() + token.size(), value);
    if (result.ec != std::errc() || result.ptr != token.data() + token.size()) {
        throw ParseError("bad number \"" + token + "\" in MPS data");
    }
    return value;
}

std::vector<std::string> split(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    std::string token;
    while (in >> token) out.push_back(token);
    return out;
}

} // namespace

MipModel read_mps(std::string_view text) {
    MipModel model;
    model.objective.clear();
    std::map<std::string, int> row_index;  // -1 for the objective row
    std::map<std::string, int> col_index;
    std::map<std::string, double> rhs_values;
    std::vector<Sense> senses;
    std::vector<std::string> row_names;
    std::string objective_name;
    std::string section;
    bool integer_block = false;
    std::string current_cone;
    std::map<std::string, std::vector<std::pair<int, double>>> row_entries;

    auto column = [&](const std::string& name) {
        auto it = col_index.find(name);
        if (it != col_index.end()) return it->second;
        const int j = model.add_variable(name, 0.0, kInf, VarRole::Auxiliary, integer_block);
        if (integer_block) model.variables[j].hi = 1.0;
        col_index[name] = j;
        return j;
    };

    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '*') continue;
        const std::vector<std::string> f = split(line);
        if (f.empty()) continue;
        if (line[0] != ' ') {
            section = f[0];
            if (section == "NAME" && f.size() > 1) model.name = f[1];
            if (section == "QCMATRIX") {
                if (f.size() < 2) throw ParseError("QCMATRIX without a row name");
                current_cone = f[1];
            }
            if (section == "ENDATA") break;
            continue;
        }
        if (section == "ROWS") {
            if (f.size() < 2) throw ParseError("short ROWS line");
            if (f[0] == "N") {
                if (objective_name.empty()) objective_name = f[1];
                row_index[f[1]] = -1;
                continue;
            }
            Sense s = f[0] == "L" ? Sense::LessEqual : f[0] == "G" ? Sense::GreaterEqual : Sense::Equal;
            if (f[0] != "L" && f[0] != "G" && f[0] != "E") throw ParseError("unknown row type " + f[0]);
            row_index[f[1]] = static_cast<int>(row_names.size());
            row_names.push_back(f[1]);
            senses.push_back(s);
        } else if (section == "COLUMNS") {
            if (f.size() >= 3 && f[1] == "'MARKER'") {
                integer_block = f[2] == "'INTORG'";
                continue;
            }
            if (f.size() < 3 || f.size() % 2 == 0) throw ParseError("malformed COLUMNS line");
            const int j = column(f[0]);
            for (std::size_t k = 1; k + 1 < f.size(); k += 2) {
                auto it = row_index.find(f[k]);
                if (it == row_index.end()) throw ParseError("unknown row " + f[k]);
                const double value = parse_number(f[k + 1]);
                if (it->second < 0) {
                    model.objective[j] += value;
                } else {
                    row_entries[f[k]].emplace_back(j, value);
                }
            }
        } else if (section == "RHS") {
            if (f.size() < 3) throw ParseError("malformed RHS line");
            for (std::size_t k = 1; k + 1 < f.size(); k += 2) {
                auto it = row_index.find(f[k]);
                if (it == row_index.end()) throw ParseError("unknown row " + f[k]);
                const double value = parse_number(f[k + 1]);
                if (it->second < 0) model.objective_offset = -value;
                else rhs_values[f[k]] = value;
            }
        } else if (section == "BOUNDS") {
            if (f.size() < 3) throw ParseError("malformed BOUNDS line");
            auto it = col_index.find(f[2]);
            if (it == col_index.end()) throw ParseError("bound on unknown column " + f[2]);
            Variable& v = model.variables[it->second];
            const std::string& type = f[0];
            const double value = f.size() > 3 ? parse_number(f[3]) : 0.0;
            if (type == "LO") v.lo = value;
            else if (type == "UP") v.hi = value;
            else if (type == "FX") v.lo = v.hi = value;
            else if (type == "FR") { v.lo = -kInf; v.hi = kInf; }
            else if (type == "MI") v.lo = -kInf;
            else if (type == "PL") v.hi = kInf;
            else if (type == "BV") { v.binary = true; v.lo = 0.0; v.hi = 1.0; }
            else throw ParseError("unsupported bound type " + type);
        } else if (section == "QCMATRIX") {
            if (f.size() != 3 || f[0] != f[1]) throw ParseError("only diagonal QCMATRIX entries are supported");
            auto it = col_index.find(f[0]);
            if (it == col_index.end()) throw ParseError("QCMATRIX on unknown column " + f[0]);
            const double value = parse_number(f[2]);
            auto& cone = model.cones;
            if (cone.empty() || cone.back().name != current_cone) cone.push_back({current_cone, -1, {}});
            if (value < 0) cone.back().head = it->second;
            else cone.back().body.push_back(it->second);
        } else if (section == "RANGES") {
            throw ParseError("RANGES are not supported");
        }
    }

    std::map<std::string, bool> is_cone;
    for (const auto& c : model.cones) {
        if (c.head < 0) throw ParseError("cone " + c.name + " has no head variable");
        is_cone[c.name] = true;
    }
    for (std::size_t r = 0; r < row_names.size(); ++r) {
        const std::string& name = row_names[r];
        if (is_cone.count(name)) continue;
        const auto rhs_it = rhs_values.find(name);
        const double rhs = rhs_it == rhs_values.end() ? 0.0 : rhs_it->second;
        model.add_row(name, row_entries[name], senses[r], rhs);
    }
    return model;
}

} // namespace drcc
