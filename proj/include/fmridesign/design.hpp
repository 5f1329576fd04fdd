#pragma once

// Circulant model matrices and information matrices.
//
// For a design sequence s of length N, the model matrix is
// X = [s, Us, ..., U^{K-1}s] with U the circular down-shift, so that
// X(n, k) = s[(n - k) mod N]. The information matrix for the HRF in the model
// y = gamma j + X h + e is M_b = X^T (I - J/N) X; the raw matrix is M = X^T X.
//
// Information matrices of integer-valued sequences are held exactly as
// integers scaled by N (N * M_b), so structural identities compare exactly.

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fmridesign/sequence.hpp"

namespace fmridesign {

using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// d~ in {-1, +1}^N, the chemical-balance form of a binary design.
class SignedDesign {
 public:
  explicit SignedDesign(std::vector<std::int8_t> entries);
  int length() const noexcept { return static_cast<int>(entries_.size()); }
  std::span<const std::int8_t> entries() const noexcept { return entries_; }
  friend bool operator==(const SignedDesign&, const SignedDesign&) = default;

 private:
  std::vector<std::int8_t> entries_;
};

/// d-bar in {-1, 0, +1}^N.
class SignedTernaryDesign {
 public:
  explicit SignedTernaryDesign(std::vector<std::int8_t> entries);
  int length() const noexcept { return static_cast<int>(entries_.size()); }
  std::span<const std::int8_t> entries() const noexcept { return entries_; }
  int count_zeros() const noexcept;
  friend bool operator==(const SignedTernaryDesign&, const SignedTernaryDesign&) = default;

 private:
  std::vector<std::int8_t> entries_;
};

/// u in {0, 1, 2}^N: u_n = q > 0 presents a stimulus of type q at time n.
class TernaryStimulusDesign {
 public:
  explicit TernaryStimulusDesign(std::vector<std::uint8_t> entries);
  static TernaryStimulusDesign parse(std::string_view symbols);

  int length() const noexcept { return static_cast<int>(entries_.size()); }
  std::span<const std::uint8_t> entries() const noexcept { return entries_; }
  bool has_zero() const noexcept;
  std::string to_string() const;
  friend bool operator==(const TernaryStimulusDesign&, const TernaryStimulusDesign&) = default;

 private:
  std::vector<std::uint8_t> entries_;
};

enum class TernaryLift {
  j_plus_d,         // u = j + d:  0 -> 1, 1 -> 2
  two_j_minus_d,    // u = 2j - d: 0 -> 2, 1 -> 1
};

SignedDesign to_signed(const BinaryDesign& d, int sign = +1);
// Inverse of to_signed for the given sign: d = (j - sign * d~) / 2.
BinaryDesign from_signed(const SignedDesign& s, int sign = +1);

SignedTernaryDesign signed_from_ternary(const TernaryStimulusDesign& u);
TernaryStimulusDesign ternary_from_signed(const SignedTernaryDesign& dbar);
TernaryStimulusDesign lift_to_ternary(const BinaryDesign& d, TernaryLift variant);

/// N x K circulant-column matrix; only constructible through model_matrix so
/// the circulant structure is an invariant.
class ModelMatrix {
 public:
  int rows() const noexcept { return static_cast<int>(source_.size()); }
  int cols() const noexcept { return cols_; }
  std::span<const std::int8_t> source() const noexcept { return source_; }
  // Dense N x K realization.
  IntMatrix dense() const;
  std::int64_t operator()(int row, int col) const;

 private:
  friend ModelMatrix model_matrix(std::span<const std::int8_t> seq, int k);
  std::vector<std::int8_t> source_;
  int cols_ = 0;
};

ModelMatrix model_matrix(std::span<const std::int8_t> seq, int k);
ModelMatrix model_matrix(const BinaryDesign& d, int k);
ModelMatrix model_matrix(const SignedDesign& d, int k);
ModelMatrix model_matrix(const SignedTernaryDesign& d, int k);

enum class InfoKind { biased, raw };

/// A K x K information matrix stored exactly as `scaled / divisor`.
struct ScaledInfoMatrix {
  IntMatrix scaled;
  std::int64_t divisor = 1;
  InfoKind kind = InfoKind::biased;

  int dim() const noexcept { return static_cast<int>(scaled.rows()); }
  Eigen::MatrixXd to_real() const;
  // Exact trace as a fraction scaled_trace / divisor.
  std::int64_t scaled_trace() const { return scaled.trace(); }
};

// Same rational matrix, regardless of divisor.
bool same_matrix(const ScaledInfoMatrix& a, const ScaledInfoMatrix& b);

// N * M_b (biased) or N * M (raw), with divisor N.
ScaledInfoMatrix info_matrix(const ModelMatrix& x, InfoKind kind = InfoKind::biased);
// Same, straight from the sequence without materializing X.
ScaledInfoMatrix info_matrix(std::span<const std::int8_t> seq, int k,
                             InfoKind kind = InfoKind::biased);

std::vector<std::int8_t> as_int8(const BinaryDesign& d);

struct TernaryComponents {
  ModelMatrix x1;     // from delta_1 (indicator of u_n == 1)
  ModelMatrix x2;     // from delta_2
  Eigen::MatrixXd e;  // (X1 + X2) / 2
  Eigen::MatrixXd f;  // (X1 - X2) / 2
};

TernaryComponents ternary_components(const TernaryStimulusDesign& u, int k);

// Relative singular-value cutoff used when projecting onto span[j, E_u].
inline constexpr double kProjectorRankTolerance = 1e-8;

// M_u = F^T (I - P) F with P the orthogonal projector onto span[j, E_u].
Eigen::MatrixXd contrast_info(const TernaryStimulusDesign& u, int k);

// For u without zeros, M_u = X_dbar^T (I - J/N) X_dbar / 4 exactly; returned
// with divisor 4N. Empty when u contains a zero.
std::optional<ScaledInfoMatrix> contrast_info_exact(const TernaryStimulusDesign& u, int k);

}  // namespace fmridesign
