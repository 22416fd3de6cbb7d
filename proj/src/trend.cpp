#include "profex/trend.hpp"

#include <charconv>

namespace profex {

std::string TrendTerm::name() const {
  switch (kind) {
    case Kind::constant: return "const";
    case Kind::linear: return "lin:" + std::to_string(coord);
    case Kind::square: return "sq:" + std::to_string(coord);
  }
  return "?";
}

TrendTerm TrendTerm::parse(const std::string& token) {
  TrendTerm t;
  if (token == "const") {
    t.kind = Kind::constant;
    return t;
  }
  auto colon = token.find(':');
  require(colon != std::string::npos, "TrendTerm: bad token '" + token + "'");
  const std::string head = token.substr(0, colon);
  t.coord = std::stol(token.substr(colon + 1));
  if (head == "lin") {
    t.kind = Kind::linear;
  } else if (head == "sq") {
    t.kind = Kind::square;
  } else {
    throw std::invalid_argument("TrendTerm: bad token '" + token + "'");
  }
  return t;
}

TrendBasis::TrendBasis(std::vector<TrendTerm> terms) : terms_(std::move(terms)) {
  require(!terms_.empty(), "TrendBasis: at least one basis function required");
}

TrendBasis TrendBasis::constant() { return TrendBasis({TrendTerm{}}); }

TrendBasis TrendBasis::constant_linear(Index d) {
  std::vector<TrendTerm> t;
  t.push_back(TrendTerm{});
  for (Index i = 0; i < d; ++i) t.push_back({TrendTerm::Kind::linear, i});
  return TrendBasis(std::move(t));
}

Vector TrendBasis::eval(const Vector& x) const {
  Vector h(size());
  for (Index j = 0; j < size(); ++j) {
    const TrendTerm& t = terms_[static_cast<size_t>(j)];
    switch (t.kind) {
      case TrendTerm::Kind::constant: h[j] = 1.0; break;
      case TrendTerm::Kind::linear: h[j] = x[t.coord]; break;
      case TrendTerm::Kind::square: h[j] = x[t.coord] * x[t.coord]; break;
    }
  }
  return h;
}

Matrix TrendBasis::design_matrix(const Matrix& X) const {
  Matrix H(X.rows(), size());
  for (Index i = 0; i < X.rows(); ++i) H.row(i) = eval(X.row(i).transpose()).transpose();
  return H;
}

Matrix TrendBasis::grad(const Vector& x) const {
  Matrix G = Matrix::Zero(size(), x.size());
  for (Index j = 0; j < size(); ++j) {
    const TrendTerm& t = terms_[static_cast<size_t>(j)];
    if (t.kind == TrendTerm::Kind::linear) G(j, t.coord) = 1.0;
    if (t.kind == TrendTerm::Kind::square) G(j, t.coord) = 2.0 * x[t.coord];
  }
  return G;
}

}  // namespace profex
