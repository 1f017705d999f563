#pragma once

#include <iosfwd>
#include <string>

#include "tlhb/spectral.hpp"

namespace tlhb {

/// Matrix Market I/O for dense real matrices. Reading accepts both the
/// array and coordinate formats (general or symmetric); writing uses
/// the array format for dense data and coordinate for sparse-looking
/// matrices when requested.

Matrix read_matrix_market(std::istream& in);
Matrix read_matrix_market_file(const std::string& path);

void write_matrix_market_array(std::ostream& out, const Matrix& m);
void write_matrix_market_coordinate(std::ostream& out, const Matrix& m);
void write_matrix_market_file(const std::string& path, const Matrix& m,
                              bool coordinate = false);

}  // namespace tlhb
