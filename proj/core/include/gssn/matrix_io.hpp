#pragma once

#include <iosfwd>
#include <string>

#include "gssn/linear_operator.hpp"
#include "gssn/types.hpp"

namespace gssn {

struct ParseError : std::runtime_error {
  ParseError(const std::string& what, int line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line(line) {}
  int line;
};

/// Matrix Market coordinate format, "real general" or "real symmetric"
/// (lower triangle expanded on load).
SparseMatrix load_matrix_market(const std::string& path);
SparseMatrix load_matrix_market(std::istream& in);
void save_matrix_market(const SparseMatrix& a, const std::string& path);
void save_matrix_market(const SparseMatrix& a, std::ostream& out);

/// One decimal value per line.
Vector load_vector(const std::string& path);
void save_vector(const Vector& v, const std::string& path);

}  // namespace gssn
