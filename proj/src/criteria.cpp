#include "fmridesign/criteria.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "fmridesign/error.hpp"

namespace fmridesign {
namespace {

Spectrum clamp_sorted(std::vector<double> raw) {
  std::sort(raw.begin(), raw.end(), std::greater<>());
  double scale = 0.0;
  for (double v : raw) scale = std::max(scale, std::abs(v));
  const double tol = kEigenClampTolerance * scale;
  for (double& v : raw) {
    if (std::abs(v) <= tol) {
      v = 0.0;
    } else if (v < 0.0) {
      throw_invalid("information matrix is not nonnegative definite (eigenvalue " +
                    std::to_string(v) + ")");
    }
  }
  return Spectrum{std::move(raw)};
}

std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw_invalid("matrix must be square and non-empty");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw_invalid("matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw DesignError("symmetric eigensolver failed");
  const auto& ev = solver.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

void check_p(double p) {
  if (!(p >= 0.0)) throw_invalid("criterion parameter p must be >= 0");
}

}  // namespace

bool Spectrum::singular() const { return values.empty() || values.back() == 0.0; }

Spectrum eigenvalues(const Eigen::MatrixXd& m) { return clamp_sorted(symmetric_eigenvalues(m)); }

Spectrum eigenvalues(const ScaledInfoMatrix& m) {
  // Decompose the exact integer matrix, then rescale.
  std::vector<double> raw = symmetric_eigenvalues(m.scaled.cast<double>());
  for (double& v : raw) v /= static_cast<double>(m.divisor);
  return clamp_sorted(std::move(raw));
}

double phi_p(const Spectrum& s, double p) {
  check_p(p);
  if (s.singular()) return kInfinity;
  const double k = static_cast<double>(s.size());
  if (p == 0.0) {
    double log_sum = 0.0;
    for (double v : s.values) log_sum += std::log(v);
    return std::exp(-log_sum / k);
  }
  if (std::isinf(p)) return 1.0 / s.smallest();
  if (p == 1.0) {
    double sum = 0.0;
    for (double v : s.values) sum += 1.0 / v;
    return sum / k;
  }
  double sum = 0.0;
  for (double v : s.values) sum += std::pow(v, -p);
  return std::pow(sum / k, 1.0 / p);
}

double phi_p(const Eigen::MatrixXd& m, double p) {
  check_p(p);
  return phi_p(eigenvalues(m), p);
}

double phi_p(const ScaledInfoMatrix& m, double p) {
  check_p(p);
  return phi_p(eigenvalues(m), p);
}

double type1_value(const Spectrum& s, const SpectralFunction& f) {
  if (s.singular()) return kInfinity;
  double sum = 0.0;
  for (double v : s.values) sum += f(v);
  return sum;
}

double type1_value(const Eigen::MatrixXd& m, const SpectralFunction& f) {
  return type1_value(eigenvalues(m), f);
}

CriterionSpec CriterionSpec::phi(double p) {
  check_p(p);
  std::string name;
  if (std::isinf(p)) {
    name = "phi_inf";
  } else {
    name = "phi_" + std::to_string(p);
    name.erase(name.find_last_not_of('0') + 1);
    if (name.back() == '.') name.pop_back();
  }
  return CriterionSpec{CriterionKind::phi_p, p, {}, name};
}

CriterionSpec CriterionSpec::type1(SpectralFunction f, std::string name) {
  return CriterionSpec{CriterionKind::type1, 0.0, std::move(f), "type1_" + name};
}

CriterionSpec CriterionSpec::ms() { return CriterionSpec{CriterionKind::ms, 0.0, {}, "ms"}; }

CriterionSpec parse_criterion(const std::string& text) {
  if (text == "A" || text == "phi1") return CriterionSpec::phi(1.0);
  if (text == "D" || text == "phi0") return CriterionSpec::phi(0.0);
  if (text == "E" || text == "phiinf" || text == "phi:inf") return CriterionSpec::phi(kInfinity);
  if (text == "phi2") return CriterionSpec::phi(2.0);
  if (text.rfind("phi:", 0) == 0) {
    double p = 0.0;
    try {
      p = std::stod(text.substr(4));
    } catch (const std::exception&) {
      throw_invalid("cannot parse criterion parameter in '" + text + "'");
    }
    return CriterionSpec::phi(p);
  }
  if (text == "type1:inverse") return CriterionSpec::type1(spectral::inverse, "inverse");
  if (text == "type1:neglog") return CriterionSpec::type1(spectral::neg_log, "neglog");
  if (text == "ms") return CriterionSpec::ms();
  throw_invalid("unknown criterion '" + text + "'");
}

double evaluate(const CriterionSpec& c, const Spectrum& s) {
  switch (c.kind) {
    case CriterionKind::phi_p:
      return phi_p(s, c.p);
    case CriterionKind::type1:
      if (!c.f) throw_invalid("type1 criterion requires a spectral function");
      return type1_value(s, c.f);
    case CriterionKind::ms:
      break;
  }
  throw_invalid("(M,S) is an ordering, not a scalar criterion");
}

std::string_view ms_ordering_name(MsOrdering o) noexcept {
  switch (o) {
    case MsOrdering::better:
      return "better";
    case MsOrdering::worse:
      return "worse";
    case MsOrdering::tie:
      return "tie";
    case MsOrdering::incomparable:
      break;
  }
  return "incomparable";
}

MsOrdering ms_compare(const ScaledInfoMatrix& m1, const ScaledInfoMatrix& m2) {
  if (m1.dim() != m2.dim()) throw_invalid("(M,S) comparison needs matrices of equal dimension");
  using i128 = __int128;
  const i128 t1 = static_cast<i128>(m1.scaled_trace()) * m2.divisor;
  const i128 t2 = static_cast<i128>(m2.scaled_trace()) * m1.divisor;
  if (t1 > t2) return MsOrdering::better;
  if (t1 < t2) return MsOrdering::worse;

  auto trace_of_square = [](const ScaledInfoMatrix& m) {
    i128 s = 0;
    for (int i = 0; i < m.dim(); ++i) {
      for (int j = 0; j < m.dim(); ++j) s += static_cast<i128>(m.scaled(i, j)) * m.scaled(j, i);
    }
    return s;
  };
  const i128 d1 = m1.divisor;
  const i128 d2 = m2.divisor;
  const i128 s1 = trace_of_square(m1) * d2 * d2;
  const i128 s2 = trace_of_square(m2) * d1 * d1;
  if (s1 < s2) return MsOrdering::better;
  if (s1 > s2) return MsOrdering::worse;
  return MsOrdering::tie;
}

MsOrdering ms_compare(const Eigen::MatrixXd& m1, const Eigen::MatrixXd& m2) {
  if (m1.rows() != m2.rows() || m1.cols() != m2.cols()) {
    throw_invalid("(M,S) comparison needs matrices of equal dimension");
  }
  if (!m1.allFinite() || !m2.allFinite()) return MsOrdering::incomparable;
  const double t1 = m1.trace();
  const double t2 = m2.trace();
  if (t1 > t2) return MsOrdering::better;
  if (t1 < t2) return MsOrdering::worse;
  const double s1 = (m1 * m1).trace();
  const double s2 = (m2 * m2).trace();
  if (s1 < s2) return MsOrdering::better;
  if (s1 > s2) return MsOrdering::worse;
  return MsOrdering::tie;
}

}  // namespace fmridesign
