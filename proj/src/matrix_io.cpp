#include "simz/matrix_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "simz/errors.hpp"

namespace simz {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_matrix(std::ostream& os, const MatrixXcd& m) {
    os << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) os << ' ';
            os << format_double(m(r, c).real()) << ' ' << format_double(m(r, c).imag());
        }
        os << '\n';
    }
}

void write_matrix(const std::filesystem::path& path, const MatrixXcd& m) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    write_matrix(os, m);
    if (!os) throw IoError("write failed: " + path.string());
}

MatrixXcd read_matrix(std::istream& is) {
    long rows = 0, cols = 0;
    if (!(is >> rows >> cols)) throw IoError("matrix header 'rows cols' missing");
    if (rows <= 0 || cols <= 0) throw IoError("matrix dimensions must be positive");
    MatrixXcd m(rows, cols);
    for (long r = 0; r < rows; ++r)
        for (long c = 0; c < cols; ++c) {
            double re, im;
            if (!(is >> re >> im))
                throw IoError("truncated matrix data at entry (" + std::to_string(r) + "," +
                              std::to_string(c) + ")");
            m(r, c) = cxd(re, im);
        }
    return m;
}

MatrixXcd read_matrix(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open for reading: " + path.string());
    return read_matrix(is);
}

}  // namespace simz
