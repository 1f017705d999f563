#include <sstream>

#include <doctest.h>

#include "tlhb/matrix_market.hpp"
#include "tlhb/rng.hpp"

using namespace tlhb;

TEST_CASE("array format round-trips bit-exactly") {
  Rng rng(55);
  const Matrix m = rng.gaussian_matrix(5, 3);
  std::stringstream s;
  write_matrix_market_array(s, m);
  const Matrix back = read_matrix_market(s);
  CHECK((m - back).norm() == 0.0);
}

TEST_CASE("coordinate format round-trips and drops explicit zeros") {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = 2.0;
  m(1, 2) = -0.5;
  m(3, 1) = 1.0 / 3.0;
  std::stringstream s;
  write_matrix_market_coordinate(s, m);
  const Matrix back = read_matrix_market(s);
  CHECK((m - back).norm() == 0.0);
}

TEST_CASE("symmetric coordinate input expands the upper triangle") {
  std::stringstream s("%%MatrixMarket matrix coordinate real symmetric\n"
                      "% comment line\n"
                      "3 3 4\n"
                      "1 1 2.0\n"
                      "2 1 -1.0\n"
                      "2 2 2.0\n"
                      "3 3 2.0\n");
  const Matrix m = read_matrix_market(s);
  CHECK(m(0, 1) == -1.0);
  CHECK(m(1, 0) == -1.0);
  CHECK(m(2, 2) == 2.0);
}

TEST_CASE("malformed input raises ParseError") {
  std::stringstream bad_banner("%%NotMatrixMarket matrix array real general\n"
                               "2 2\n1\n2\n3\n4\n");
  CHECK_THROWS_AS(read_matrix_market(bad_banner), ParseError);

  std::stringstream truncated("%%MatrixMarket matrix array real general\n"
                              "2 2\n1\n2\n3\n");
  CHECK_THROWS_AS(read_matrix_market(truncated), ParseError);

  std::stringstream bad_index("%%MatrixMarket matrix coordinate real general\n"
                              "2 2 1\n"
                              "3 1 5.0\n");
  CHECK_THROWS_AS(read_matrix_market(bad_index), ParseError);

  CHECK_THROWS_AS(read_matrix_market_file("/nonexistent/x.mtx"), ParseError);
}
