#pragma once

// Monte-Carlo validation of the linear model
//
//   y = gamma j + X_d h + e                       (one stimulus type)
//   y = gamma j + X_1 h_1 + X_2 h_2 + e            (two stimulus types)
//
// with e ~ N(0, sigma^2 V), V = I (iid) or V = alpha I + beta j^T + j beta^T
// (compound). Estimation is ordinary least squares with an intercept.
//
// Random streams: replicate r of a run seeded with s draws from a
// std::mt19937_64 seeded by seed_seq{lo(s), hi(s), lo(r), hi(r)} (32-bit
// halves), so every replicate is reproducible on its own and results do not
// depend on the number of worker threads.

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "fmridesign/criteria.hpp"
#include "fmridesign/design.hpp"

namespace fmridesign {

enum class NoiseKind { iid, compound };

std::string_view noise_kind_name(NoiseKind k) noexcept;
NoiseKind parse_noise_kind(std::string_view name);

class NoiseSpec {
 public:
  static NoiseSpec iid(double sigma2);
  // Throws InvalidArgument unless alpha I + beta j^T + j beta^T is positive definite.
  static NoiseSpec compound(double sigma2, double alpha, Eigen::VectorXd beta);
  // alpha = 1, beta = 0.1 j / N.
  static NoiseSpec compound_default(int n, double sigma2 = 1.0);
  // iid or compound_default for length n.
  static NoiseSpec of_kind(NoiseKind kind, int n, double sigma2 = 1.0);

  NoiseKind kind() const noexcept { return kind_; }
  double sigma2() const noexcept { return sigma2_; }
  double alpha() const noexcept { return alpha_; }
  const Eigen::VectorXd& beta() const noexcept { return beta_; }
  // Length the spec is tied to; empty for iid.
  std::optional<int> length() const;

  // V and sigma^2 V for a series of length n.
  Eigen::MatrixXd shape(int n) const;
  Eigen::MatrixXd covariance(int n) const { return sigma2_ * shape(n); }

  // Adds a draw of e to y.
  void add_noise(Eigen::VectorXd& y, std::mt19937_64& rng) const;

 private:
  NoiseKind kind_ = NoiseKind::iid;
  double sigma2_ = 1.0;
  double alpha_ = 1.0;
  Eigen::VectorXd beta_;
  Eigen::MatrixXd chol_;  // lower Cholesky factor of V (compound only)
};

struct GroundTruth {
  double gamma = 0.0;
  Eigen::VectorXd h;                  // h, or h_1 in the two-stimulus model
  std::optional<Eigen::VectorXd> h2;  // two-stimulus model only

  int k() const noexcept { return static_cast<int>(h.size()); }
  // zeta = h_1 - h_2
  Eigen::VectorXd zeta() const;
};

// The engine for replicate `replicate` of a run seeded with `seed`.
std::mt19937_64 replicate_engine(std::uint64_t seed, std::uint64_t replicate);

Eigen::VectorXd generate_responses(const BinaryDesign& d, const GroundTruth& truth,
                                   const NoiseSpec& noise, std::uint64_t seed,
                                   std::uint64_t replicate = 0);
Eigen::VectorXd generate_responses(const TernaryStimulusDesign& u, const GroundTruth& truth,
                                   const NoiseSpec& noise, std::uint64_t seed,
                                   std::uint64_t replicate = 0);

struct OlsFit {
  Eigen::VectorXd estimate;  // h-hat, or zeta-hat for the two-stimulus model
  double residual_variance = 0.0;
  int residual_dof = 0;
};

// Throws SingularSystem (carrying the rank found) when the information
// matrix is singular.
OlsFit ols_fit(const Eigen::VectorXd& y, const BinaryDesign& d, int k);
OlsFit ols_fit(const Eigen::VectorXd& y, const TernaryStimulusDesign& u, int k);

// K x N matrix G with estimate = G y.
Eigen::MatrixXd ols_operator(const BinaryDesign& d, int k);
Eigen::MatrixXd ols_operator(const TernaryStimulusDesign& u, int k);

struct MonteCarloOptions {
  int replicates = 100000;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct MonteCarloResult {
  int replicates = 0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;  // unbiased sample covariance of the estimates
  Eigen::MatrixXd theory;      // exact OLS covariance G (sigma^2 V) G^T
  // max over entries of |empirical - theory| / |theory|
  double max_relative_error = 0.0;
  // Frobenius norm of empirical - theory
  double frobenius_error = 0.0;
};

MonteCarloResult monte_carlo(const BinaryDesign& d, const GroundTruth& truth,
                             const NoiseSpec& noise, const MonteCarloOptions& options);
MonteCarloResult monte_carlo(const TernaryStimulusDesign& u, const GroundTruth& truth,
                             const NoiseSpec& noise, const MonteCarloOptions& options);

// GLS information for h with gamma profiled out:
// X^T W X - X^T W j (j^T W j)^{-1} j^T W X, W = V^{-1}. Exploratory.
Eigen::MatrixXd gls_information(const BinaryDesign& d, int k, const NoiseSpec& noise);

struct EfficiencyRow {
  int n = 0;
  double value = kInfinity;  // criterion on the OLS information (G V G^T)^{-1}
  double efficiency = 0.0;   // best value / value; 0 for singular designs
};

// Designs may differ in length; compound noise uses the default spec for
// each length. Needs a criterion with positive values (Phi_p, type-1 1/x).
std::vector<EfficiencyRow> efficiency_report(const std::vector<BinaryDesign>& designs, int k,
                                             const CriterionSpec& criterion, NoiseKind noise);

}  // namespace fmridesign
