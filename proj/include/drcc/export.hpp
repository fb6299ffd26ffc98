#pragma once

#include "drcc/mip_model.hpp"

#include <string>
#include <string_view>

namespace drcc {

enum class ExportFormat { Mps, Lp };

/// Fixed-column MPS. Binaries sit between INTORG/INTEND markers and carry BV
/// bounds; cone rows appear as QCMATRIX sections (sum body^2 - head^2 <= 0)
/// preceded by a comment block. Numbers use the shortest round-trip form.
std::string write_mps(const MipModel& model);

/// CPLEX-style LP text; cone rows are written as quadratic constraints.
std::string write_lp(const MipModel& model);

std::string export_model(const MipModel& model, ExportFormat format);

/// Reads MPS as produced by write_mps (whitespace-separated fields).
/// Throws ParseError.
MipModel read_mps(std::string_view text);

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

} // namespace drcc
