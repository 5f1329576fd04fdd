#include "fmridesign/design.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cctype>
#include <numeric>

#include "fmridesign/error.hpp"
#include "fmridesign/kernels.hpp"

namespace fmridesign {
namespace {

void check_k(int n, int k) {
  if (k < 1 || k > n) {
    throw_invalid("K must satisfy 1 <= K <= N (K = " + std::to_string(k) +
                  ", N = " + std::to_string(n) + ")");
  }
}

std::vector<std::int8_t> indicator(const TernaryStimulusDesign& u, std::uint8_t q) {
  std::vector<std::int8_t> out(static_cast<std::size_t>(u.length()));
  const auto e = u.entries();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = e[i] == q ? 1 : 0;
  return out;
}

}  // namespace

SignedDesign::SignedDesign(std::vector<std::int8_t> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw_invalid("design must have at least one time point");
  for (auto v : entries_) {
    if (v != 1 && v != -1) throw_invalid("signed design entries must be -1 or +1");
  }
}

SignedTernaryDesign::SignedTernaryDesign(std::vector<std::int8_t> entries)
    : entries_(std::move(entries)) {
  if (entries_.empty()) throw_invalid("design must have at least one time point");
  for (auto v : entries_) {
    if (v < -1 || v > 1) throw_invalid("signed ternary entries must be in {-1, 0, 1}");
  }
}

int SignedTernaryDesign::count_zeros() const noexcept {
  return static_cast<int>(std::count(entries_.begin(), entries_.end(), std::int8_t{0}));
}

TernaryStimulusDesign::TernaryStimulusDesign(std::vector<std::uint8_t> entries)
    : entries_(std::move(entries)) {
  if (entries_.empty()) throw_invalid("design must have at least one time point");
  for (auto v : entries_) {
    if (v > 2) throw_invalid("ternary stimulus entries must be in {0, 1, 2}");
  }
}

TernaryStimulusDesign TernaryStimulusDesign::parse(std::string_view symbols) {
  std::vector<std::uint8_t> out;
  for (char c : symbols) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    if (c < '0' || c > '2') {
      throw_invalid(std::string("ternary design symbol must be 0, 1 or 2, got '") + c + "'");
    }
    out.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return TernaryStimulusDesign(std::move(out));
}

bool TernaryStimulusDesign::has_zero() const noexcept {
  return std::find(entries_.begin(), entries_.end(), std::uint8_t{0}) != entries_.end();
}

std::string TernaryStimulusDesign::to_string() const {
  std::string s(entries_.size(), '0');
  for (std::size_t i = 0; i < entries_.size(); ++i) s[i] = static_cast<char>('0' + entries_[i]);
  return s;
}

SignedDesign to_signed(const BinaryDesign& d, int sign) {
  if (sign != 1 && sign != -1) throw_invalid("sign must be +1 or -1");
  std::vector<std::int8_t> out(static_cast<std::size_t>(d.length()));
  for (int i = 0; i < d.length(); ++i) {
    out[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(sign * (1 - 2 * d[i]));
  }
  return SignedDesign(std::move(out));
}

BinaryDesign from_signed(const SignedDesign& s, int sign) {
  if (sign != 1 && sign != -1) throw_invalid("sign must be +1 or -1");
  std::vector<std::uint8_t> out(static_cast<std::size_t>(s.length()));
  const auto e = s.entries();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>((1 - sign * e[i]) / 2);
  }
  return BinaryDesign(std::move(out));
}

SignedTernaryDesign signed_from_ternary(const TernaryStimulusDesign& u) {
  static constexpr std::int8_t map[3] = {0, 1, -1};
  std::vector<std::int8_t> out(static_cast<std::size_t>(u.length()));
  const auto e = u.entries();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = map[e[i]];
  return SignedTernaryDesign(std::move(out));
}

TernaryStimulusDesign ternary_from_signed(const SignedTernaryDesign& dbar) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(dbar.length()));
  const auto e = dbar.entries();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = e[i] == 0 ? 0 : (e[i] == 1 ? 1 : 2);
  }
  return TernaryStimulusDesign(std::move(out));
}

TernaryStimulusDesign lift_to_ternary(const BinaryDesign& d, TernaryLift variant) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(d.length()));
  for (int i = 0; i < d.length(); ++i) {
    out[static_cast<std::size_t>(i)] = variant == TernaryLift::j_plus_d
                                           ? static_cast<std::uint8_t>(1 + d[i])
                                           : static_cast<std::uint8_t>(2 - d[i]);
  }
  return TernaryStimulusDesign(std::move(out));
}

IntMatrix ModelMatrix::dense() const {
  IntMatrix x(rows(), cols_);
  for (int r = 0; r < rows(); ++r) {
    for (int c = 0; c < cols_; ++c) x(r, c) = (*this)(r, c);
  }
  return x;
}

std::int64_t ModelMatrix::operator()(int row, int col) const {
  const int n = rows();
  return source_[static_cast<std::size_t>(((row - col) % n + n) % n)];
}

ModelMatrix model_matrix(std::span<const std::int8_t> seq, int k) {
  check_k(static_cast<int>(seq.size()), k);
  ModelMatrix x;
  x.source_.assign(seq.begin(), seq.end());
  x.cols_ = k;
  return x;
}

std::vector<std::int8_t> as_int8(const BinaryDesign& d) {
  return std::vector<std::int8_t>(d.bits().begin(), d.bits().end());
}

ModelMatrix model_matrix(const BinaryDesign& d, int k) { return model_matrix(as_int8(d), k); }
ModelMatrix model_matrix(const SignedDesign& d, int k) { return model_matrix(d.entries(), k); }
ModelMatrix model_matrix(const SignedTernaryDesign& d, int k) {
  return model_matrix(d.entries(), k);
}

Eigen::MatrixXd ScaledInfoMatrix::to_real() const {
  return scaled.cast<double>() / static_cast<double>(divisor);
}

bool same_matrix(const ScaledInfoMatrix& a, const ScaledInfoMatrix& b) {
  if (a.dim() != b.dim()) return false;
  for (int i = 0; i < a.dim(); ++i) {
    for (int j = 0; j < a.dim(); ++j) {
      if (static_cast<__int128>(a.scaled(i, j)) * b.divisor !=
          static_cast<__int128>(b.scaled(i, j)) * a.divisor) {
        return false;
      }
    }
  }
  return true;
}

// X^T X is Toeplitz with entries R(|i-j|), R the periodic autocorrelation of
// the source, and every column of X sums to S = sum(seq). Hence
// N * M_b(i, j) = N * R(|i-j|) - S^2.
ScaledInfoMatrix info_matrix(std::span<const std::int8_t> seq, int k, InfoKind kind) {
  const int n = static_cast<int>(seq.size());
  check_k(n, k);
  std::vector<std::int64_t> autocorr(static_cast<std::size_t>(k));
  kernels::circular_correlation(seq, seq, autocorr);
  const std::int64_t sum = std::accumulate(seq.begin(), seq.end(), std::int64_t{0});
  const std::int64_t centering = kind == InfoKind::biased ? sum * sum : 0;

  ScaledInfoMatrix m{IntMatrix(k, k), n, kind};
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      m.scaled(i, j) = n * autocorr[static_cast<std::size_t>(std::abs(i - j))] - centering;
    }
  }
  return m;
}

ScaledInfoMatrix info_matrix(const ModelMatrix& x, InfoKind kind) {
  return info_matrix(x.source(), x.cols(), kind);
}

TernaryComponents ternary_components(const TernaryStimulusDesign& u, int k) {
  check_k(u.length(), k);
  TernaryComponents c{model_matrix(indicator(u, 1), k), model_matrix(indicator(u, 2), k), {}, {}};
  const Eigen::MatrixXd x1 = c.x1.dense().cast<double>();
  const Eigen::MatrixXd x2 = c.x2.dense().cast<double>();
  c.e = (x1 + x2) / 2.0;
  c.f = (x1 - x2) / 2.0;
  return c;
}

Eigen::MatrixXd contrast_info(const TernaryStimulusDesign& u, int k) {
  const TernaryComponents c = ternary_components(u, k);
  const int n = u.length();

  Eigen::MatrixXd a(n, k + 1);
  a.col(0).setOnes();
  a.rightCols(k) = c.e;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double cutoff = kProjectorRankTolerance * sv(0);
  int rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;

  const Eigen::MatrixXd q = svd.matrixU().leftCols(rank);
  const Eigen::MatrixXd resid = c.f - q * (q.transpose() * c.f);
  Eigen::MatrixXd m = resid.transpose() * resid;
  // Rounding residue of a projection that removes all of F.
  if (m.norm() <= 1e-10 * std::max(1.0, (c.f.transpose() * c.f).norm())) m.setZero();
  return (m + m.transpose()) / 2.0;
}

std::optional<ScaledInfoMatrix> contrast_info_exact(const TernaryStimulusDesign& u, int k) {
  if (u.has_zero()) return std::nullopt;
  ScaledInfoMatrix m = info_matrix(signed_from_ternary(u).entries(), k, InfoKind::biased);
  m.divisor *= 4;
  return m;
}

}  // namespace fmridesign
