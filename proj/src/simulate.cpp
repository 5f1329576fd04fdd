#include "fmridesign/simulate.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "fmridesign/error.hpp"
#include "fmridesign/kernels.hpp"

namespace fmridesign {
namespace {

constexpr int kBlockReplicates = 1024;

// Inverse of a symmetric information matrix; SingularSystem when its
// numerical rank falls short.
Eigen::MatrixXd invert_information(const Eigen::MatrixXd& m) {
  const int k = static_cast<int>(m.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double top = ev.cwiseAbs().maxCoeff();
  int rank = 0;
  for (int i = 0; i < k; ++i) {
    if (ev(i) > kEigenClampTolerance * top) ++rank;
  }
  if (top == 0.0) rank = 0;
  if (rank < k) {
    throw SingularSystem("information matrix is singular: rank " + std::to_string(rank) +
                             " of " + std::to_string(k),
                         rank);
  }
  return m.llt().solve(Eigen::MatrixXd::Identity(k, k));
}

Eigen::MatrixXd dense_x(const BinaryDesign& d, int k) {
  return model_matrix(d, k).dense().cast<double>();
}

void check_truth(const GroundTruth& truth, bool two_stimulus) {
  if (truth.k() < 1) throw_invalid("ground truth needs K >= 1");
  if (two_stimulus) {
    if (!truth.h2) throw_invalid("two-stimulus model needs h2");
    if (truth.h2->size() != truth.h.size()) throw_invalid("h1 and h2 differ in length");
  } else if (truth.h2) {
    throw_invalid("h2 given for a single-stimulus design");
  }
}

void check_noise_length(const NoiseSpec& noise, int n) {
  if (auto len = noise.length(); len && *len != n) {
    throw_invalid("compound noise spec has length " + std::to_string(*len) +
                  " but the design has length " + std::to_string(n));
  }
}

// Projection pieces of the two-stimulus fit: Q spans [j, E], R = (I - QQ^T) F.
struct ContrastPieces {
  Eigen::MatrixXd q;
  Eigen::MatrixXd f;
  Eigen::MatrixXd r;
  Eigen::MatrixXd g;  // M_u^{-1} R^T
};

ContrastPieces contrast_pieces(const TernaryStimulusDesign& u, int k) {
  const TernaryComponents c = ternary_components(u, k);
  const int n = u.length();
  Eigen::MatrixXd a(n, k + 1);
  a.col(0).setOnes();
  a.rightCols(k) = c.e;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  int rank = 0;
  while (rank < sv.size() && sv(rank) > kProjectorRankTolerance * sv(0)) ++rank;
  ContrastPieces p;
  p.q = svd.matrixU().leftCols(rank);
  p.f = c.f;
  p.r = c.f - p.q * (p.q.transpose() * c.f);
  Eigen::MatrixXd mu = p.r.transpose() * p.r;
  mu = 0.5 * (mu + mu.transpose());
  p.g = invert_information(mu) * p.r.transpose();
  return p;
}

struct Moments {
  int count = 0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd m2;  // sum of outer products of deviations

  explicit Moments(int k = 0) : mean(Eigen::VectorXd::Zero(k)), m2(Eigen::MatrixXd::Zero(k, k)) {}

  void add(const Eigen::VectorXd& x) {
    ++count;
    const Eigen::VectorXd delta = x - mean;
    mean += delta / count;
    m2.noalias() += delta * (x - mean).transpose();
  }

  void merge(const Moments& o) {
    if (o.count == 0) return;
    const double na = count, nb = o.count, nn = na + nb;
    const Eigen::VectorXd delta = o.mean - mean;
    mean += delta * (nb / nn);
    m2 += o.m2 + delta * delta.transpose() * (na * nb / nn);
    count += o.count;
  }
};

// Runs `replicates` estimates in fixed-size blocks; blocks are merged in
// index order so the result is independent of the thread count.
template <typename Estimate>
MonteCarloResult run_blocks(int k, const MonteCarloOptions& options, Estimate&& estimate,
                            const Eigen::MatrixXd& theory) {
  if (options.replicates < 2) throw_invalid("Monte Carlo needs at least 2 replicates");
  if (options.threads < 1) throw_invalid("threads must be >= 1");
  const int blocks = (options.replicates + kBlockReplicates - 1) / kBlockReplicates;
  std::vector<Moments> partial(static_cast<std::size_t>(blocks), Moments(k));
  const int workers = std::min(options.threads, blocks);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));

  auto work = [&](int w) {
    try {
      Eigen::VectorXd est(k);
      for (int b = w; b < blocks; b += workers) {
        const int lo = b * kBlockReplicates;
        const int hi = std::min(options.replicates, lo + kBlockReplicates);
        Moments& m = partial[static_cast<std::size_t>(b)];
        for (int r = lo; r < hi; ++r) {
          estimate(static_cast<std::uint64_t>(r), est);
          m.add(est);
        }
      }
    } catch (...) {
      errors[static_cast<std::size_t>(w)] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  Moments total(k);
  for (const auto& m : partial) total.merge(m);

  MonteCarloResult res;
  res.replicates = total.count;
  res.mean = total.mean;
  res.covariance = total.m2 / (total.count - 1.0);
  res.theory = theory;
  const double scale = theory.cwiseAbs().maxCoeff();
  const Eigen::MatrixXd diff = res.covariance - theory;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      // theory entries that vanish are measured against the largest entry
      double denom = std::abs(theory(i, j));
      if (denom <= 1e-12 * scale) denom = scale;
      res.max_relative_error = std::max(res.max_relative_error, std::abs(diff(i, j)) / denom);
    }
  }
  res.frobenius_error = diff.norm();
  return res;
}

}  // namespace

std::string_view noise_kind_name(NoiseKind k) noexcept {
  return k == NoiseKind::iid ? "iid" : "compound";
}

NoiseKind parse_noise_kind(std::string_view name) {
  if (name == "iid") return NoiseKind::iid;
  if (name == "compound") return NoiseKind::compound;
  throw_invalid("unknown noise kind '" + std::string(name) + "'");
}

NoiseSpec NoiseSpec::iid(double sigma2) {
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) throw_invalid("sigma^2 must be finite and >= 0");
  NoiseSpec s;
  s.sigma2_ = sigma2;
  return s;
}

NoiseSpec NoiseSpec::compound(double sigma2, double alpha, Eigen::VectorXd beta) {
  NoiseSpec s = iid(sigma2);
  if (beta.size() < 1) throw_invalid("compound noise needs a non-empty beta");
  s.kind_ = NoiseKind::compound;
  s.alpha_ = alpha;
  s.beta_ = std::move(beta);
  const int n = static_cast<int>(s.beta_.size());
  const Eigen::VectorXd j = Eigen::VectorXd::Ones(n);
  const Eigen::MatrixXd v = alpha * Eigen::MatrixXd::Identity(n, n) + s.beta_ * j.transpose() +
                            j * s.beta_.transpose();
  Eigen::LLT<Eigen::MatrixXd> llt(v);
  if (llt.info() != Eigen::Success) {
    throw_invalid("compound noise covariance alpha I + beta j^T + j beta^T is not positive definite");
  }
  s.chol_ = llt.matrixL();
  return s;
}

NoiseSpec NoiseSpec::compound_default(int n, double sigma2) {
  if (n < 1) throw_invalid("N must be >= 1");
  return compound(sigma2, 1.0, Eigen::VectorXd::Constant(n, 0.1 / n));
}

NoiseSpec NoiseSpec::of_kind(NoiseKind kind, int n, double sigma2) {
  return kind == NoiseKind::iid ? iid(sigma2) : compound_default(n, sigma2);
}

std::optional<int> NoiseSpec::length() const {
  if (kind_ == NoiseKind::iid) return std::nullopt;
  return static_cast<int>(beta_.size());
}

Eigen::MatrixXd NoiseSpec::shape(int n) const {
  check_noise_length(*this, n);
  if (kind_ == NoiseKind::iid) return Eigen::MatrixXd::Identity(n, n);
  return chol_ * chol_.transpose();
}

void NoiseSpec::add_noise(Eigen::VectorXd& y, std::mt19937_64& rng) const {
  check_noise_length(*this, static_cast<int>(y.size()));
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(y.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
  const double sd = std::sqrt(sigma2_);
  if (kind_ == NoiseKind::iid) {
    y += sd * z;
  } else {
    y += sd * (chol_.triangularView<Eigen::Lower>() * z).eval();
  }
}

Eigen::VectorXd GroundTruth::zeta() const {
  if (!h2) throw_invalid("zeta needs h2");
  return h - *h2;
}

std::mt19937_64 replicate_engine(std::uint64_t seed, std::uint64_t replicate) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replicate),
                    static_cast<std::uint32_t>(replicate >> 32)};
  return std::mt19937_64(seq);
}

Eigen::VectorXd generate_responses(const BinaryDesign& d, const GroundTruth& truth,
                                   const NoiseSpec& noise, std::uint64_t seed,
                                   std::uint64_t replicate) {
  check_truth(truth, false);
  Eigen::VectorXd y =
      Eigen::VectorXd::Constant(d.length(), truth.gamma) + dense_x(d, truth.k()) * truth.h;
  auto rng = replicate_engine(seed, replicate);
  noise.add_noise(y, rng);
  return y;
}

Eigen::VectorXd generate_responses(const TernaryStimulusDesign& u, const GroundTruth& truth,
                                   const NoiseSpec& noise, std::uint64_t seed,
                                   std::uint64_t replicate) {
  check_truth(truth, true);
  const TernaryComponents c = ternary_components(u, truth.k());
  Eigen::VectorXd y = Eigen::VectorXd::Constant(u.length(), truth.gamma) +
                      c.x1.dense().cast<double>() * truth.h +
                      c.x2.dense().cast<double>() * *truth.h2;
  auto rng = replicate_engine(seed, replicate);
  noise.add_noise(y, rng);
  return y;
}

Eigen::MatrixXd ols_operator(const BinaryDesign& d, int k) {
  const Eigen::MatrixXd x = dense_x(d, k);
  const Eigen::RowVectorXd colmean = x.colwise().mean();
  const Eigen::MatrixXd xc = x.rowwise() - colmean;
  const Eigen::MatrixXd mb = info_matrix(as_int8(d), k).to_real();
  return invert_information(mb) * xc.transpose();
}

Eigen::MatrixXd ols_operator(const TernaryStimulusDesign& u, int k) {
  return contrast_pieces(u, k).g;
}

OlsFit ols_fit(const Eigen::VectorXd& y, const BinaryDesign& d, int k) {
  const int n = d.length();
  if (y.size() != n) throw_invalid("response length does not match the design");
  const Eigen::MatrixXd x = dense_x(d, k);
  OlsFit fit;
  fit.estimate = ols_operator(d, k) * y;
  const Eigen::VectorXd xh = x * fit.estimate;
  const double gamma = (y - xh).mean();
  const Eigen::VectorXd resid = (y - xh).array() - gamma;
  fit.residual_dof = n - k - 1;
  fit.residual_variance =
      fit.residual_dof > 0 ? resid.squaredNorm() / fit.residual_dof : std::nan("");
  return fit;
}

OlsFit ols_fit(const Eigen::VectorXd& y, const TernaryStimulusDesign& u, int k) {
  const int n = u.length();
  if (y.size() != n) throw_invalid("response length does not match the design");
  const ContrastPieces p = contrast_pieces(u, k);
  OlsFit fit;
  fit.estimate = p.g * y;
  Eigen::VectorXd resid = y - p.f * fit.estimate;
  resid -= p.q * (p.q.transpose() * resid);
  fit.residual_dof = n - static_cast<int>(p.q.cols()) - k;
  fit.residual_variance =
      fit.residual_dof > 0 ? resid.squaredNorm() / fit.residual_dof : std::nan("");
  return fit;
}

MonteCarloResult monte_carlo(const BinaryDesign& d, const GroundTruth& truth,
                             const NoiseSpec& noise, const MonteCarloOptions& options) {
  check_truth(truth, false);
  const int n = d.length();
  const int k = truth.k();
  check_noise_length(noise, n);
  const Eigen::MatrixXd g = ols_operator(d, k);
  const Eigen::MatrixXd mb = info_matrix(as_int8(d), k).to_real();
  const Eigen::LLT<Eigen::MatrixXd> llt(mb);
  const Eigen::VectorXd mu =
      Eigen::VectorXd::Constant(n, truth.gamma) + dense_x(d, k) * truth.h;
  std::vector<double> s(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = d[i];

  // X^T (y - mean(y)) is a circular correlation of the design with y.
  auto estimate = [&](std::uint64_t r, Eigen::VectorXd& out) {
    thread_local std::vector<double> yc, xty;
    auto rng = replicate_engine(options.seed, r);
    Eigen::VectorXd y = mu;
    noise.add_noise(y, rng);
    const double ybar = y.mean();
    yc.resize(static_cast<std::size_t>(n));
    xty.resize(static_cast<std::size_t>(k));
    for (int i = 0; i < n; ++i) yc[static_cast<std::size_t>(i)] = y(i) - ybar;
    kernels::circular_correlation(std::span<const double>(s), std::span<const double>(yc),
                                  std::span<double>(xty));
    out = llt.solve(Eigen::Map<const Eigen::VectorXd>(xty.data(), k));
  };
  return run_blocks(k, options, estimate, g * noise.covariance(n) * g.transpose());
}

MonteCarloResult monte_carlo(const TernaryStimulusDesign& u, const GroundTruth& truth,
                             const NoiseSpec& noise, const MonteCarloOptions& options) {
  check_truth(truth, true);
  const int n = u.length();
  const int k = truth.k();
  check_noise_length(noise, n);
  const Eigen::MatrixXd g = ols_operator(u, k);
  const TernaryComponents c = ternary_components(u, k);
  const Eigen::VectorXd mu = Eigen::VectorXd::Constant(n, truth.gamma) +
                             c.x1.dense().cast<double>() * truth.h +
                             c.x2.dense().cast<double>() * *truth.h2;
  auto estimate = [&](std::uint64_t r, Eigen::VectorXd& out) {
    auto rng = replicate_engine(options.seed, r);
    Eigen::VectorXd y = mu;
    noise.add_noise(y, rng);
    out.noalias() = g * y;
  };
  return run_blocks(k, options, estimate, g * noise.covariance(n) * g.transpose());
}

Eigen::MatrixXd gls_information(const BinaryDesign& d, int k, const NoiseSpec& noise) {
  const int n = d.length();
  const Eigen::MatrixXd x = dense_x(d, k);
  const Eigen::LLT<Eigen::MatrixXd> llt(noise.shape(n));
  const Eigen::MatrixXd wx = llt.solve(x);
  const Eigen::VectorXd wj = llt.solve(Eigen::VectorXd::Ones(n));
  const double jwj = wj.sum();
  const Eigen::VectorXd xwj = x.transpose() * wj;
  Eigen::MatrixXd info = x.transpose() * wx - xwj * xwj.transpose() / jwj;
  return 0.5 * (info + info.transpose());
}

std::vector<EfficiencyRow> efficiency_report(const std::vector<BinaryDesign>& designs, int k,
                                             const CriterionSpec& criterion, NoiseKind noise) {
  if (criterion.kind == CriterionKind::ms) {
    throw_invalid("efficiency needs a scalar criterion, not (M,S)");
  }
  std::vector<EfficiencyRow> rows;
  double best = kInfinity;
  for (const auto& d : designs) {
    EfficiencyRow row;
    row.n = d.length();
    try {
      const Eigen::MatrixXd g = ols_operator(d, k);
      const Eigen::MatrixXd cov =
          g * NoiseSpec::of_kind(noise, row.n).shape(row.n) * g.transpose();
      const Eigen::MatrixXd info = invert_information(0.5 * (cov + cov.transpose()));
      row.value = evaluate(criterion, eigenvalues(0.5 * (info + info.transpose())));
    } catch (const SingularSystem&) {
      row.value = kInfinity;
    }
    if (std::isfinite(row.value) && !(row.value > 0.0)) {
      throw_invalid("efficiency needs a criterion with positive values; got " +
                    std::to_string(row.value) + " for " + criterion.name);
    }
    best = std::min(best, row.value);
    rows.push_back(row);
  }
  for (auto& row : rows) {
    row.efficiency = std::isfinite(row.value) ? best / row.value : 0.0;
  }
  return rows;
}

}  // namespace fmridesign
