#ifndef SIMZ_MATRIX_IO_HPP
#define SIMZ_MATRIX_IO_HPP

#include <filesystem>
#include <iosfwd>

#include "simz/types.hpp"

namespace simz {

// Text format shared by all modules: a header line "rows cols", then the
// entries in row-major order as "re im" pairs separated by whitespace.
void write_matrix(std::ostream& os, const MatrixXcd& m);
void write_matrix(const std::filesystem::path& path, const MatrixXcd& m);

MatrixXcd read_matrix(std::istream& is);
MatrixXcd read_matrix(const std::filesystem::path& path);

// Shortest round-trip decimal form, used everywhere numbers are emitted so
// reruns are byte-identical.
std::string format_double(double v);

}  // namespace simz

#endif
