#include "profex/kernels.hpp"

#include "profex/simd.hpp"

#include <cmath>
#include <vector>

namespace profex {

namespace {
constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kSqrt5 = 2.23606797749979;
}  // namespace

const char* family_name(KernelFamily f) {
  switch (f) {
    case KernelFamily::matern32: return "matern32";
    case KernelFamily::matern52: return "matern52";
    case KernelFamily::gaussian: return "gaussian";
  }
  return "?";
}

const char* structure_name(KernelStructure s) {
  return s == KernelStructure::tensor_product ? "tensor_product" : "isotropic";
}

KernelFamily family_from_name(const std::string& s) {
  if (s == "matern32") return KernelFamily::matern32;
  if (s == "matern52") return KernelFamily::matern52;
  if (s == "gaussian") return KernelFamily::gaussian;
  throw std::invalid_argument("unknown kernel family: " + s);
}

KernelStructure structure_from_name(const std::string& s) {
  if (s == "tensor_product") return KernelStructure::tensor_product;
  if (s == "isotropic") return KernelStructure::isotropic;
  throw std::invalid_argument("unknown kernel structure: " + s);
}

void KernelSpec::validate() const {
  require(lengthscales.size() >= 1, "KernelSpec: empty lengthscales");
  require((lengthscales.array() > 0.0).all(), "KernelSpec: lengthscales must be positive");
  require(variance > 0.0 && std::isfinite(variance), "KernelSpec: variance must be positive");
}

namespace {

inline double iso_from_r2(KernelFamily family, double variance, double r2) {
  switch (family) {
    case KernelFamily::gaussian:
      return variance * std::exp(-0.5 * r2);
    case KernelFamily::matern32: {
      const double r = std::sqrt(r2);
      return variance * (1.0 + kSqrt3 * r) * std::exp(-kSqrt3 * r);
    }
    case KernelFamily::matern52: {
      const double r = std::sqrt(r2);
      return variance * (1.0 + kSqrt5 * r + (5.0 / 3.0) * r2) * std::exp(-kSqrt5 * r);
    }
  }
  return 0.0;
}

inline void check_finite(const Vector& x, const char* who) {
  if (!x.allFinite()) throw std::invalid_argument(std::string(who) + ": non-finite input");
}

}  // namespace

double kernel_eval(const KernelSpec& spec, const Vector& x, const Vector& y) {
  check_finite(x, "kernel_eval");
  check_finite(y, "kernel_eval");
  require(x.size() == spec.dim() && y.size() == spec.dim(), "kernel_eval: dimension mismatch");
  const Vector u = (x - y).cwiseQuotient(spec.lengthscales);
  if (spec.structure == KernelStructure::isotropic || spec.family == KernelFamily::gaussian) {
    return iso_from_r2(spec.family, spec.variance, u.squaredNorm());
  }
  // tensor product of 1-d factors; the exponentials collapse into one
  double sum_abs = 0.0, prod = 1.0;
  if (spec.family == KernelFamily::matern32) {
    for (Index j = 0; j < u.size(); ++j) {
      const double a = std::fabs(u[j]);
      sum_abs += a;
      prod *= 1.0 + kSqrt3 * a;
    }
    return spec.variance * prod * std::exp(-kSqrt3 * sum_abs);
  }
  for (Index j = 0; j < u.size(); ++j) {
    const double a = std::fabs(u[j]);
    sum_abs += a;
    prod *= 1.0 + kSqrt5 * a + (5.0 / 3.0) * a * a;
  }
  return spec.variance * prod * std::exp(-kSqrt5 * sum_abs);
}

Vector kernel_grad_x(const KernelSpec& spec, const Vector& x, const Vector& y) {
  check_finite(x, "kernel_grad_x");
  check_finite(y, "kernel_grad_x");
  const Index d = spec.dim();
  const Vector u = (x - y).cwiseQuotient(spec.lengthscales);
  Vector g(d);
  if (spec.structure == KernelStructure::isotropic || spec.family == KernelFamily::gaussian) {
    const double r2 = u.squaredNorm();
    const double r = std::sqrt(r2);
    double w;  // dk/dx_i = -w * u_i / l_i
    switch (spec.family) {
      case KernelFamily::gaussian:
        w = spec.variance * std::exp(-0.5 * r2);
        break;
      case KernelFamily::matern32:
        w = 3.0 * spec.variance * std::exp(-kSqrt3 * r);
        break;
      case KernelFamily::matern52:
      default:
        w = (5.0 / 3.0) * spec.variance * (1.0 + kSqrt5 * r) * std::exp(-kSqrt5 * r);
        break;
    }
    for (Index j = 0; j < d; ++j) g[j] = -w * u[j] / spec.lengthscales[j];
    return g;
  }
  const double k = kernel_eval(spec, x, y);
  for (Index j = 0; j < d; ++j) {
    const double a = std::fabs(u[j]);
    if (spec.family == KernelFamily::matern32) {
      g[j] = -3.0 * (u[j] / spec.lengthscales[j]) * k / (1.0 + kSqrt3 * a);
    } else {
      const double f = 1.0 + kSqrt5 * a + (5.0 / 3.0) * a * a;
      g[j] = -(5.0 / 3.0) * (u[j] / spec.lengthscales[j]) * (1.0 + kSqrt5 * a) * k / f;
    }
  }
  return g;
}

DesignCache::DesignCache(const Matrix& X, const KernelSpec& spec) : spec_(spec) {
  spec_.validate();
  require(X.cols() == spec.dim(), "DesignCache: design/lengthscale dimension mismatch");
  scaled_ = X.array().rowwise() / spec.lengthscales.transpose().array();
}

namespace {
thread_local std::vector<double> t_buf_a, t_buf_b;
}

void DesignCache::cross_cov(const Vector& x, Vector& out) const {
  const auto n = static_cast<std::size_t>(scaled_.rows());
  const auto d = static_cast<std::size_t>(scaled_.cols());
  out.resize(scaled_.rows());
  Vector q = x.cwiseQuotient(spec_.lengthscales);
  const double s2 = spec_.variance;

  if (spec_.structure == KernelStructure::isotropic || spec_.family == KernelFamily::gaussian) {
    t_buf_a.resize(n);
    simd::sq_dist(q.data(), scaled_.data(), n, n, d, t_buf_a.data());
    for (std::size_t i = 0; i < n; ++i)
      out[static_cast<Index>(i)] = iso_from_r2(spec_.family, s2, t_buf_a[i]);
    return;
  }
  t_buf_a.resize(n);
  t_buf_b.resize(n);
  if (spec_.family == KernelFamily::matern32) {
    simd::abs_prod_m32(q.data(), scaled_.data(), n, n, d, kSqrt3, t_buf_a.data(), t_buf_b.data());
    for (std::size_t i = 0; i < n; ++i)
      out[static_cast<Index>(i)] = s2 * t_buf_b[i] * std::exp(-kSqrt3 * t_buf_a[i]);
  } else {
    simd::abs_prod_m52(q.data(), scaled_.data(), n, n, d, kSqrt5, t_buf_a.data(), t_buf_b.data());
    for (std::size_t i = 0; i < n; ++i)
      out[static_cast<Index>(i)] = s2 * t_buf_b[i] * std::exp(-kSqrt5 * t_buf_a[i]);
  }
}

Vector DesignCache::cross_cov(const Vector& x) const {
  Vector out;
  cross_cov(x, out);
  return out;
}

void DesignCache::cross_cov_grad(const Vector& x, Matrix& out) const {
  const Index n = scaled_.rows();
  const Index d = scaled_.cols();
  out.resize(n, d);
  const Vector q = x.cwiseQuotient(spec_.lengthscales);
  const double s2 = spec_.variance;

  if (spec_.structure == KernelStructure::isotropic || spec_.family == KernelFamily::gaussian) {
    for (Index i = 0; i < n; ++i) {
      double r2 = 0.0;
      for (Index j = 0; j < d; ++j) {
        const double u = q[j] - scaled_(i, j);
        r2 += u * u;
      }
      const double r = std::sqrt(r2);
      double w;
      switch (spec_.family) {
        case KernelFamily::gaussian: w = s2 * std::exp(-0.5 * r2); break;
        case KernelFamily::matern32: w = 3.0 * s2 * std::exp(-kSqrt3 * r); break;
        case KernelFamily::matern52:
        default: w = (5.0 / 3.0) * s2 * (1.0 + kSqrt5 * r) * std::exp(-kSqrt5 * r); break;
      }
      for (Index j = 0; j < d; ++j)
        out(i, j) = -w * (q[j] - scaled_(i, j)) / spec_.lengthscales[j];
    }
    return;
  }
  const bool m32 = spec_.family == KernelFamily::matern32;
  const double c = m32 ? kSqrt3 : kSqrt5;
  for (Index i = 0; i < n; ++i) {
    double sum_abs = 0.0, prod = 1.0;
    for (Index j = 0; j < d; ++j) {
      const double a = std::fabs(q[j] - scaled_(i, j));
      sum_abs += a;
      prod *= m32 ? (1.0 + c * a) : (1.0 + c * a + (5.0 / 3.0) * a * a);
    }
    const double k = s2 * prod * std::exp(-c * sum_abs);
    for (Index j = 0; j < d; ++j) {
      const double u = q[j] - scaled_(i, j);
      const double a = std::fabs(u);
      if (m32) {
        out(i, j) = -3.0 * (u / spec_.lengthscales[j]) * k / (1.0 + c * a);
      } else {
        const double f = 1.0 + c * a + (5.0 / 3.0) * a * a;
        out(i, j) = -(5.0 / 3.0) * (u / spec_.lengthscales[j]) * (1.0 + c * a) * k / f;
      }
    }
  }
}

Matrix DesignCache::kernel_matrix() const {
  const Index n = scaled_.rows();
  Matrix K(n, n);
  Vector row;
  for (Index i = 0; i < n; ++i) {
    Vector xi = scaled_.row(i).transpose().cwiseProduct(spec_.lengthscales);
    cross_cov(xi, row);
    K.row(i) = row.transpose();
  }
  // exact symmetry for the factorizations downstream
  K = 0.5 * (K + K.transpose()).eval();
  return K;
}

}  // namespace profex
