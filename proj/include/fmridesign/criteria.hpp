#pragma once

// Optimality criteria on information matrices. Smaller is better for every
// scalar criterion; singular matrices score +infinity.

#include <Eigen/Core>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "fmridesign/design.hpp"

namespace fmridesign {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Eigenvalues within this fraction of the largest are treated as zero.
inline constexpr double kEigenClampTolerance = 1e-10;

/// Eigenvalues sorted descending, each >= 0 after clamping.
struct Spectrum {
  std::vector<double> values;

  int size() const noexcept { return static_cast<int>(values.size()); }
  double largest() const { return values.front(); }
  double smallest() const { return values.back(); }
  bool singular() const;
};

Spectrum eigenvalues(const Eigen::MatrixXd& m);
Spectrum eigenvalues(const ScaledInfoMatrix& m);

// Phi_p of Kiefer's family: |M|^{-1/K} at p = 0, [tr(M^{-p})/K]^{1/p} for
// 0 < p < inf, and 1/lambda_min at p = inf. A-optimality is p = 1 and carries
// the 1/K normalization, i.e. tr(M^{-1})/K.
double phi_p(const Spectrum& s, double p);
double phi_p(const Eigen::MatrixXd& m, double p);
double phi_p(const ScaledInfoMatrix& m, double p);

using SpectralFunction = std::function<double(double)>;

// sum_i f(lambda_i); +inf as soon as any eigenvalue is zero.
double type1_value(const Spectrum& s, const SpectralFunction& f);
double type1_value(const Eigen::MatrixXd& m, const SpectralFunction& f);

namespace spectral {
inline double inverse(double x) { return 1.0 / x; }
inline double neg_log(double x) { return -std::log(x); }
}  // namespace spectral

enum class CriterionKind { phi_p, type1, ms };

struct CriterionSpec {
  CriterionKind kind = CriterionKind::phi_p;
  double p = 1.0;
  SpectralFunction f;  // type1 only
  std::string name;    // for reports

  static CriterionSpec phi(double p);
  static CriterionSpec type1(SpectralFunction f, std::string name);
  static CriterionSpec ms();
};

// Parses "phi0", "phi1", "phi2", "phiinf", "phi:<p>", "A", "D", "E",
// "type1:inverse", "type1:neglog", "ms".
CriterionSpec parse_criterion(const std::string& text);

// Scalar value of a phi_p or type1 criterion.
double evaluate(const CriterionSpec& c, const Spectrum& s);

enum class MsOrdering { better, worse, tie, incomparable };

std::string_view ms_ordering_name(MsOrdering o) noexcept;

// (M,S) comparison of M1 against M2: larger trace wins; on exactly equal
// traces the smaller tr(M^2) wins.
MsOrdering ms_compare(const ScaledInfoMatrix& m1, const ScaledInfoMatrix& m2);
MsOrdering ms_compare(const Eigen::MatrixXd& m1, const Eigen::MatrixXd& m2);

}  // namespace fmridesign
