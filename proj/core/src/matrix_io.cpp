#include "gssn/matrix_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

namespace gssn {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

}  // namespace

SparseMatrix load_matrix_market(const std::string& path) {
  auto in = open_input(path);
  return load_matrix_market(in);
}

SparseMatrix load_matrix_market(std::istream& in) {
  std::string line;
  int lineno = 0;

  if (!std::getline(in, line)) throw ParseError("empty input", 1);
  ++lineno;
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") throw ParseError("missing MatrixMarket banner", lineno);
  if (lower(object) != "matrix" || lower(format) != "coordinate")
    throw ParseError("unsupported object/format: " + object + " " + format, lineno);
  if (lower(field) != "real" && lower(field) != "integer")
    throw ParseError("unsupported field: " + field, lineno);
  const std::string sym = lower(symmetry);
  if (sym != "general" && sym != "symmetric")
    throw ParseError("unsupported symmetry: " + symmetry, lineno);

  Index rows = 0, cols = 0;
  long long nnz = 0;
  bool have_size = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream sz(line);
    if (!(sz >> rows >> cols >> nnz)) throw ParseError("malformed size line", lineno);
    have_size = true;
    break;
  }
  if (!have_size) throw ParseError("missing size line", lineno);
  if (rows < 0 || cols < 0 || nnz < 0) throw ParseError("negative size", lineno);

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(sym == "symmetric" ? 2 * nnz : nnz));
  long long seen = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream entry(line);
    long long i, j;
    double v;
    if (!(entry >> i >> j >> v)) throw ParseError("malformed entry", lineno);
    if (i < 1 || i > rows || j < 1 || j > cols)
      throw ParseError("index out of range", lineno);
    trips.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1), v);
    if (sym == "symmetric" && i != j)
      trips.emplace_back(static_cast<int>(j - 1), static_cast<int>(i - 1), v);
    ++seen;
  }
  if (seen != nnz) throw ParseError("entry count mismatch", lineno);

  SparseMatrix a(rows, cols);
  a.setFromTriplets(trips.begin(), trips.end());
  a.makeCompressed();
  return a;
}

void save_matrix_market(const SparseMatrix& a, const std::string& path) {
  auto out = open_output(path);
  save_matrix_market(a, out);
}

void save_matrix_market(const SparseMatrix& a, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << " " << a.cols() << " " << a.nonZeros() << "\n";
  out << std::setprecision(17);
  for (Index k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it)
      out << it.row() + 1 << " " << it.col() + 1 << " " << it.value() << "\n";
}

Vector load_vector(const std::string& path) {
  auto in = open_input(path);
  std::vector<double> vals;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%' || line[0] == '#') continue;
    std::istringstream row(line);
    double v;
    if (!(row >> v)) throw ParseError("malformed value", lineno);
    std::string rest;
    if (row >> rest) throw ParseError("trailing content", lineno);
    vals.push_back(v);
  }
  Vector out(static_cast<Index>(vals.size()));
  for (size_t i = 0; i < vals.size(); ++i) out[static_cast<Index>(i)] = vals[i];
  return out;
}

void save_vector(const Vector& v, const std::string& path) {
  auto out = open_output(path);
  out << std::setprecision(17);
  for (Index i = 0; i < v.size(); ++i) out << v[i] << "\n";
}

}  // namespace gssn
