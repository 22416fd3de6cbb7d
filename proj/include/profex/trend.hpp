#pragma once

#include "profex/types.hpp"

#include <string>
#include <vector>

namespace profex {

// Monomial trend basis: constant, coordinate, or squared-coordinate terms.
struct TrendTerm {
  enum class Kind { constant, linear, square };
  Kind kind = Kind::constant;
  Index coord = 0;

  std::string name() const;
  static TrendTerm parse(const std::string& token);
};

class TrendBasis {
 public:
  TrendBasis() = default;
  explicit TrendBasis(std::vector<TrendTerm> terms);

  static TrendBasis constant();
  // constant followed by one linear term per coordinate
  static TrendBasis constant_linear(Index d);

  Index size() const { return static_cast<Index>(terms_.size()); }
  const std::vector<TrendTerm>& terms() const { return terms_; }

  Vector eval(const Vector& x) const;          // h(x), length m
  Matrix design_matrix(const Matrix& X) const; // n x m
  Matrix grad(const Vector& x) const;          // m x d, row j = grad h_j

 private:
  std::vector<TrendTerm> terms_;
};

}  // namespace profex
