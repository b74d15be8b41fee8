#pragma once

#include <string>

#include "kgm/mesh.hpp"

namespace kgm {

enum class FieldFormat { csv, binary };

// Field files carry a single-line JSON header {"lengths", "counts", "format"}
// followed by node values in x-fastest order: one decimal per line for csv,
// raw little-endian float64 for binary. Values round-trip exactly.
void write_field(const std::string& path, const ScalarField& f,
                 FieldFormat format = FieldFormat::csv);

// Reads a field file, building the grid from the header.
ScalarField read_field(const std::string& path);

// Reads a field file onto an existing grid; the header must match it.
ScalarField read_field(const std::string& path, const GridPtr& grid);

}  // namespace kgm
