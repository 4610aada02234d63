#pragma once

#include <iosfwd>
#include <string>

#include "wbe/grid.hpp"

namespace wbe {

// Binary layout, all little-endian:
//   int64 dims
//   int64 shape[dims]
//   float64 spacing[dims]
//   float64 origin[dims]
//   float64 values[prod(shape)]   row-major, last axis fastest
void write_field_binary(const ScalarField& f, std::ostream& out);
void write_field_binary(const ScalarField& f, const std::string& path);
ScalarField read_field_binary(std::istream& in);
ScalarField read_field_binary(const std::string& path);

/// CSV with header "i,j[,k],value", one line per cell.
void write_field_csv(const ScalarField& f, std::ostream& out);
void write_field_csv(const ScalarField& f, const std::string& path);

/// Grayscale PGM (P2 or P5, maxval <= 65535) into an (width x height) planar
/// field: pixel (col, row) maps to cell (col, height - 1 - row), intensity
/// scaled to [0, 1].
ScalarField read_pgm(const std::string& path, const GridDomain& domain);
void write_pgm(const ScalarField& f, const std::string& path);

}  // namespace wbe
