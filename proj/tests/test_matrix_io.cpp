#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "gssn/matrix_io.hpp"
#include "helpers.hpp"

using namespace gssn;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) {
    path = (std::filesystem::temp_directory_path() / name).string();
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("identity round trip") {
  std::istringstream in("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n2 2 1.0\n");
  const SparseMatrix a = load_matrix_market(in);
  CHECK(a.rows() == 2);
  CHECK((Matrix(a) - Matrix::Identity(2, 2)).norm() == 0.0);
}

TEST_CASE("symmetric storage expands the lower triangle") {
  std::istringstream in(
      "%%MatrixMarket matrix coordinate real symmetric\n3 3 3\n1 1 2.0\n2 1 -1.0\n3 3 5.0\n");
  const SparseMatrix a = load_matrix_market(in);
  CHECK(a.coeff(0, 1) == -1.0);
  CHECK(a.coeff(1, 0) == -1.0);
  CHECK(a.coeff(2, 2) == 5.0);
  CHECK(a.nonZeros() == 4);
}

TEST_CASE("random sparse round trip is exact") {
  std::mt19937_64 rng(7);
  std::vector<Eigen::Triplet<double>> trips;
  for (int k = 0; k < 60; ++k)
    trips.emplace_back(static_cast<int>(rng() % 9), static_cast<int>(rng() % 11),
                       std::normal_distribution<double>()(rng));
  SparseMatrix a(9, 11);
  a.setFromTriplets(trips.begin(), trips.end());
  a.makeCompressed();

  TempFile f("gssn_io_roundtrip.mtx");
  save_matrix_market(a, f.path);
  const SparseMatrix b = load_matrix_market(f.path);
  CHECK((Matrix(a) - Matrix(b)).norm() == 0.0);
}

TEST_CASE("parse errors carry line numbers") {
  std::istringstream bad_banner("%%NotMatrixMarket matrix coordinate real general\n1 1 0\n");
  CHECK_THROWS_WITH_AS(load_matrix_market(bad_banner),
                       doctest::Contains("(line 1)"), ParseError);

  std::istringstream bad_index("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n");
  CHECK_THROWS_WITH_AS(load_matrix_market(bad_index),
                       doctest::Contains("(line 3)"), ParseError);

  std::istringstream bad_field("%%MatrixMarket matrix coordinate complex general\n1 1 0\n");
  CHECK_THROWS_AS(load_matrix_market(bad_field), ParseError);

  std::istringstream short_file("%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 1.0\n");
  CHECK_THROWS_AS(load_matrix_market(short_file), ParseError);
}

TEST_CASE("vector files hold one value per line") {
  std::mt19937_64 rng(9);
  const Vector v = gssn::testing::random_vector(17, rng, 1e8);
  TempFile f("gssn_io_vector.txt");
  save_vector(v, f.path);
  const Vector w = load_vector(f.path);
  REQUIRE(w.size() == 17);
  CHECK((v - w).norm() == 0.0);  // 17 significant digits round trip doubles

  TempFile g("gssn_io_badvec.txt");
  {
    std::ofstream out(g.path);
    out << "1.0\nnot_a_number\n";
  }
  CHECK_THROWS_AS(load_vector(g.path), ParseError);
}

TEST_CASE("missing files raise errors") {
  CHECK_THROWS(load_matrix_market("/nonexistent/gssn.mtx"));
  CHECK_THROWS(load_vector("/nonexistent/gssn.txt"));
}
