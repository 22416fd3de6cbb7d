#pragma once

#include "profex/types.hpp"

namespace profex {

enum class KernelFamily { matern32, matern52, gaussian };
enum class KernelStructure { tensor_product, isotropic };

const char* family_name(KernelFamily f);
const char* structure_name(KernelStructure s);
KernelFamily family_from_name(const std::string& s);
KernelStructure structure_from_name(const std::string& s);

// Stationary covariance spec. Conventions, with u_j = (x_j - y_j)/l_j and
// r = |u|:
//   matern32 isotropic:  s2 * (1 + sqrt3*r) * exp(-sqrt3*r)
//   matern52 isotropic:  s2 * (1 + sqrt5*r + 5r^2/3) * exp(-sqrt5*r)
//   gaussian:            s2 * exp(-r^2/2)
//   tensor_product:      product of the 1-d form over coordinates
struct KernelSpec {
  KernelFamily family = KernelFamily::matern52;
  KernelStructure structure = KernelStructure::tensor_product;
  Vector lengthscales;
  double variance = 1.0;

  Index dim() const { return lengthscales.size(); }
  void validate() const;
};

double kernel_eval(const KernelSpec& spec, const Vector& x, const Vector& y);

// d/dx of kernel_eval; zero at x == y (the stationary maximum).
Vector kernel_grad_x(const KernelSpec& spec, const Vector& x, const Vector& y);

// Pre-scaled SoA copy of a design for batch covariance evaluation.
class DesignCache {
 public:
  DesignCache() = default;
  DesignCache(const Matrix& X, const KernelSpec& spec);

  Index n() const { return scaled_.rows(); }
  Index d() const { return scaled_.cols(); }
  const KernelSpec& spec() const { return spec_; }

  // out[i] = k(x, X_i)
  void cross_cov(const Vector& x, Vector& out) const;
  Vector cross_cov(const Vector& x) const;

  // out.row(i) = d/dx k(x, X_i)
  void cross_cov_grad(const Vector& x, Matrix& out) const;

  Matrix kernel_matrix() const;  // K(X, X), symmetric

 private:
  KernelSpec spec_;
  Matrix scaled_;  // n x d column-major: coordinate j contiguous over points
};

}  // namespace profex
