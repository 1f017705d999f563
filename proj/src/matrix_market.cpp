#include "tlhb/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace tlhb {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string next_data_line(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    const auto pos = line.find_first_not_of(" \t\r\n");
    if (pos == std::string::npos) continue;
    if (line[pos] == '%') continue;
    return line;
  }
  throw ParseError("matrix market: unexpected end of file");
}

}  // namespace

Matrix read_matrix_market(std::istream& in) {
  std::string header;
  if (!std::getline(in, header))
    throw ParseError("matrix market: empty stream");
  std::istringstream hs(header);
  std::string banner, object, format, field, symmetry;
  hs >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || lower(object) != "matrix")
    throw ParseError("matrix market: bad banner line");
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (field != "real" && field != "integer" && field != "double")
    throw ParseError("matrix market: unsupported field type '" + field + "'");
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general")
    throw ParseError("matrix market: unsupported symmetry '" + symmetry + "'");

  if (format == "array") {
    std::istringstream sz(next_data_line(in));
    Eigen::Index rows = 0, cols = 0;
    if (!(sz >> rows >> cols) || rows <= 0 || cols <= 0)
      throw ParseError("matrix market: bad array size line");
    Matrix m(rows, cols);
    // Array format is column-major; symmetric stores the lower triangle.
    for (Eigen::Index j = 0; j < cols; ++j) {
      for (Eigen::Index i = symmetric ? j : 0; i < rows; ++i) {
        std::istringstream vs(next_data_line(in));
        double v;
        if (!(vs >> v)) throw ParseError("matrix market: bad array entry");
        m(i, j) = v;
        if (symmetric) m(j, i) = v;
      }
    }
    return m;
  }
  if (format == "coordinate") {
    std::istringstream sz(next_data_line(in));
    Eigen::Index rows = 0, cols = 0;
    long long nnz = 0;
    if (!(sz >> rows >> cols >> nnz) || rows <= 0 || cols <= 0 || nnz < 0)
      throw ParseError("matrix market: bad coordinate size line");
    Matrix m = Matrix::Zero(rows, cols);
    for (long long k = 0; k < nnz; ++k) {
      std::istringstream es(next_data_line(in));
      Eigen::Index i, j;
      double v;
      if (!(es >> i >> j >> v) || i < 1 || i > rows || j < 1 || j > cols)
        throw ParseError("matrix market: bad coordinate entry");
      m(i - 1, j - 1) = v;
      if (symmetric) m(j - 1, i - 1) = v;
    }
    return m;
  }
  throw ParseError("matrix market: unsupported format '" + format + "'");
}

Matrix read_matrix_market_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("matrix market: cannot open '" + path + "'");
  return read_matrix_market(in);
}

void write_matrix_market_array(std::ostream& out, const Matrix& m) {
  out << "%%MatrixMarket matrix array real general\n";
  out << m.rows() << " " << m.cols() << "\n";
  out.precision(17);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) out << m(i, j) << "\n";
}

void write_matrix_market_coordinate(std::ostream& out, const Matrix& m) {
  long long nnz = 0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (m(i, j) != 0.0) ++nnz;
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << " " << m.cols() << " " << nnz << "\n";
  out.precision(17);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (m(i, j) != 0.0)
        out << i + 1 << " " << j + 1 << " " << m(i, j) << "\n";
}

void write_matrix_market_file(const std::string& path, const Matrix& m,
                              bool coordinate) {
  std::ofstream out(path);
  if (!out) throw ParseError("matrix market: cannot open '" + path + "'");
  if (coordinate)
    write_matrix_market_coordinate(out, m);
  else
    write_matrix_market_array(out, m);
}

}  // namespace tlhb
