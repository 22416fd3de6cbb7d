#include "profex/gp.hpp"

#include "profex/doe.hpp"
#include "profex/optimize.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace profex {

double cholesky_with_jitter(Matrix K, double scale, Eigen::LLT<Matrix>& llt, double rel_start,
                            double rel_max) {
  double jitter = rel_start * scale;
  K.diagonal().array() += jitter;
  llt.compute(K);
  while (llt.info() != Eigen::Success) {
    const double bump = jitter * 9.0;  // ladder: 1e-10, 1e-9, ... relative
    jitter *= 10.0;
    if (jitter > rel_max * scale * (1.0 + 1e-12))
      throw NumericError("Cholesky failed after the jitter ladder was exhausted");
    K.diagonal().array() += bump;
    llt.compute(K);
  }
  return jitter;
}

namespace {

void check_unit_box(const Matrix& X) {
  require((X.array() >= -1e-9).all() && (X.array() <= 1.0 + 1e-9).all(),
          "GpModel: design must be pre-normalized to the unit hyper-rectangle");
}

void check_distinct(const Matrix& X) {
  for (Index i = 0; i < X.rows(); ++i)
    for (Index j = i + 1; j < X.rows(); ++j)
      if ((X.row(i) - X.row(j)).squaredNorm() == 0.0)
        throw ModelError("GpModel: design points must be pairwise distinct");
}

}  // namespace

GpModel::GpModel(Matrix X, Vector y, KernelSpec spec, TrendBasis trend)
    : X_(std::move(X)), y_(std::move(y)), kernel_(std::move(spec)), trend_(std::move(trend)) {
  kernel_.validate();
  require(X_.rows() == y_.size(), "GpModel: design/observation size mismatch");
  require(X_.cols() == kernel_.dim(), "GpModel: design/kernel dimension mismatch");
  require(X_.rows() >= trend_.size(), "GpModel: need n >= m training points");
  check_unit_box(X_);
  check_distinct(X_);

  cache_ = DesignCache(X_, kernel_);
  H_ = trend_.design_matrix(X_);

  Eigen::ColPivHouseholderQR<Matrix> qr(H_);
  if (qr.rank() < H_.cols()) throw ModelError("GpModel: trend design matrix is rank-deficient");

  jitter_ = cholesky_with_jitter(cache_.kernel_matrix(), kernel_.variance, llt_);
  KinvH_ = llt_.solve(H_);
  Matrix gram = H_.transpose() * KinvH_;
  gram = 0.5 * (gram + gram.transpose()).eval();
  Eigen::LLT<Matrix> gram_llt(gram);
  if (gram_llt.info() != Eigen::Success)
    throw ModelError("GpModel: trend normal equations are singular");
  KHinv_ = gram_llt.solve(Matrix::Identity(H_.cols(), H_.cols()));
  chat_ = gram_llt.solve(KinvH_.transpose() * y_);
  alpha_ = llt_.solve(y_ - H_ * chat_);
}

double GpModel::posterior_mean(const Vector& x) const {
  return trend_.eval(x).dot(chat_) + cache_.cross_cov(x).dot(alpha_);
}

Vector GpModel::posterior_mean_grad(const Vector& x) const {
  Matrix dk;
  cache_.cross_cov_grad(x, dk);  // n x d
  return trend_.grad(x).transpose() * chat_ + dk.transpose() * alpha_;
}

double GpModel::posterior_cov(const Vector& x, const Vector& x2) const {
  const Vector kx = cache_.cross_cov(x);
  const Vector kx2 = (&x == &x2) ? kx : cache_.cross_cov(x2);
  const Vector w = llt_.solve(kx2);
  const Vector lam_x = trend_.eval(x) - KinvH_.transpose() * kx;
  const Vector lam_x2 = (&x == &x2) ? lam_x : Vector(trend_.eval(x2) - KinvH_.transpose() * kx2);
  return kernel_eval(kernel_, x, x2) - kx.dot(w) + lam_x.dot(KHinv_ * lam_x2);
}

double GpModel::posterior_var(const Vector& x) const {
  return std::max(0.0, posterior_cov(x, x));
}

ConcentratedLik concentrated_nll(const Matrix& X, const Vector& y, KernelFamily family,
                                 KernelStructure structure, const TrendBasis& trend,
                                 const Vector& log_ell) {
  const Index n = X.rows();
  KernelSpec spec{family, structure, log_ell.array().exp().matrix(), 1.0};
  DesignCache cache(X, spec);
  Eigen::LLT<Matrix> llt;
  cholesky_with_jitter(cache.kernel_matrix(), 1.0, llt, 1e-10, 1e-4);

  const Matrix H = trend.design_matrix(X);
  const Matrix KinvH = llt.solve(H);
  Matrix gram = H.transpose() * KinvH;
  gram = 0.5 * (gram + gram.transpose()).eval();
  Eigen::LLT<Matrix> gram_llt(gram);
  if (gram_llt.info() != Eigen::Success)
    throw ModelError("concentrated_nll: trend normal equations are singular");
  const Vector chat = gram_llt.solve(KinvH.transpose() * y);
  const Vector resid = y - H * chat;
  const double rss = resid.dot(llt.solve(resid));
  const double var = std::max(rss / static_cast<double>(n), 1e-30);

  double log_det = 0.0;
  for (Index i = 0; i < n; ++i) log_det += 2.0 * std::log(llt.matrixL()(i, i));
  return {0.5 * static_cast<double>(n) * std::log(var) + 0.5 * log_det, var};
}

GpModel fit_gp(const Matrix& X, const Vector& y, KernelFamily family,
               KernelStructure structure, const TrendBasis& trend, const FitConfig& cfg) {
  check_unit_box(X);
  const Index d = X.cols();
  require(cfg.n_starts >= 1, "fit_gp: n_starts must be >= 1");

  CounterRng rng(cfg.seed, derive_stream(0xf17, 0));
  Matrix starts01 = latin_hypercube(cfg.n_starts, d, rng);
  const double lo = cfg.start_log_ell_lo, hi = cfg.start_log_ell_hi;

  BoxDomain box(Vector::Constant(d, cfg.bound_log_ell_lo),
                Vector::Constant(d, cfg.bound_log_ell_hi));
  Objective nll = [&](const Vector& th) {
    try {
      return concentrated_nll(X, y, family, structure, trend, th).nll;
    } catch (const NumericError&) {
      return 1e100;  // factorization failure prices the candidate out
    }
  };

  LbfgsConfig ocfg;
  ocfg.max_iter = cfg.max_iter;
  ocfg.pg_tol = 1e-7;

  Vector best_theta;
  double best_nll = std::numeric_limits<double>::infinity();
  for (int s = 0; s < cfg.n_starts; ++s) {
    Vector theta0 = (lo + (hi - lo) * starts01.row(s).transpose().array()).matrix();
    OptResult r = lbfgsb_minimize(nll, nullptr, box, theta0, ocfg);
    if (r.f < best_nll - 1e-10 || best_theta.size() == 0) {
      best_nll = r.f;
      best_theta = r.x;
    }
  }

  const ConcentratedLik at_best =
      concentrated_nll(X, y, family, structure, trend, best_theta);
  KernelSpec spec{family, structure, best_theta.array().exp().matrix(), at_best.variance};
  return GpModel(X, y, spec, trend);
}

double q2(const GpModel& model, const Matrix& Xtest, const Vector& ytest) {
  require(ytest.size() >= 2, "q2: need at least 2 test values");
  require(Xtest.rows() == ytest.size(), "q2: test size mismatch");
  const double mean = ytest.mean();
  const double denom = (ytest.array() - mean).square().sum();
  if (denom <= 0.0) throw std::invalid_argument("q2: zero test variance, metric undefined");
  double num = 0.0;
  for (Index i = 0; i < ytest.size(); ++i) {
    const double e = model.posterior_mean(Xtest.row(i).transpose()) - ytest[i];
    num += e * e;
  }
  return 1.0 - num / denom;
}

double loo_q2(const GpModel& model) {
  // Virtual cross-validation: e_i = (Q y)_i / Q_ii with
  // Q = K^-1 - K^-1 H (H^T K^-1 H)^-1 H^T K^-1.
  const Vector& y = model.observations();
  const Index n = y.size();
  require(n >= 3, "loo_q2: need at least 3 points");
  const Matrix I = Matrix::Identity(n, n);
  const Matrix Kinv = model.solve_kernel(I);
  const Matrix Q = Kinv - model.kinv_trend() * model.trend_gram_inv() *
                               model.kinv_trend().transpose();
  const Vector Qy = Q * y;
  double num = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double e = Qy[i] / Q(i, i);
    num += e * e;
  }
  const double mean = y.mean();
  const double denom = (y.array() - mean).square().sum();
  if (denom <= 0.0) throw std::invalid_argument("loo_q2: zero observation variance");
  return 1.0 - num / denom;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

void save_model(const GpModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_model: cannot open " + path);
  out << "profex-model v1\n";
  out << "kernel " << family_name(model.kernel().family) << ' '
      << structure_name(model.kernel().structure) << '\n';
  out << "dim " << model.dim() << '\n';
  out << "lengthscales";
  for (Index j = 0; j < model.dim(); ++j) out << ' ' << fmt(model.kernel().lengthscales[j]);
  out << '\n';
  out << "variance " << fmt(model.kernel().variance) << '\n';
  out << "trend " << model.trend().size();
  for (const auto& t : model.trend().terms()) out << ' ' << t.name();
  out << '\n';
  out << "coeffs";
  for (Index j = 0; j < model.trend_coefficients().size(); ++j)
    out << ' ' << fmt(model.trend_coefficients()[j]);
  out << '\n';
  out << "n " << model.n() << '\n';
  out << "design\n";
  for (Index i = 0; i < model.n(); ++i) {
    for (Index j = 0; j < model.dim(); ++j) out << (j ? " " : "") << fmt(model.design()(i, j));
    out << '\n';
  }
  out << "observations\n";
  for (Index i = 0; i < model.n(); ++i) out << fmt(model.observations()[i]) << '\n';
  if (!out) throw std::runtime_error("save_model: write failed for " + path);
}

GpModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_model: cannot open " + path);
  std::string line, word;

  auto expect_line = [&](const std::string& what) {
    if (!std::getline(in, line)) throw std::runtime_error("load_model: truncated at " + what);
    return std::istringstream(line);
  };

  {
    auto is = expect_line("header");
    std::string magic, version;
    is >> magic >> version;
    if (magic != "profex-model" || version != "v1")
      throw std::runtime_error("load_model: unsupported format in " + path);
  }
  KernelSpec spec;
  {
    auto is = expect_line("kernel");
    std::string fam, str;
    is >> word >> fam >> str;
    spec.family = family_from_name(fam);
    spec.structure = structure_from_name(str);
  }
  Index d = 0;
  {
    auto is = expect_line("dim");
    is >> word >> d;
  }
  {
    auto is = expect_line("lengthscales");
    is >> word;
    spec.lengthscales.resize(d);
    for (Index j = 0; j < d; ++j) is >> spec.lengthscales[j];
  }
  {
    auto is = expect_line("variance");
    is >> word >> spec.variance;
  }
  std::vector<TrendTerm> terms;
  {
    auto is = expect_line("trend");
    Index m = 0;
    is >> word >> m;
    for (Index j = 0; j < m; ++j) {
      std::string tok;
      is >> tok;
      terms.push_back(TrendTerm::parse(tok));
    }
  }
  {
    auto is = expect_line("coeffs");  // recomputed from data; kept for audit
    (void)is;
  }
  Index n = 0;
  {
    auto is = expect_line("n");
    is >> word >> n;
  }
  expect_line("design");
  Matrix X(n, d);
  for (Index i = 0; i < n; ++i) {
    auto is = expect_line("design row");
    for (Index j = 0; j < d; ++j) is >> X(i, j);
  }
  expect_line("observations");
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    auto is = expect_line("observation");
    is >> y[i];
  }
  return GpModel(std::move(X), std::move(y), std::move(spec), TrendBasis(std::move(terms)));
}

}  // namespace profex
