#include "arpid/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

namespace arpid::oracle {

namespace {

// Volumes below this fraction of the row-norm product are analytically zero.
constexpr double kZeroVolume = 1e-14;

void normalize(SubsetDistribution& dist) {
  double total = 0.0;
  for (const auto& [subset, w] : dist.probs) total += w;
  if (!(total > 0.0)) throw Error(ErrorKind::DegenerateDistribution, "every size-k subset has zero mass");
  for (auto& [subset, w] : dist.probs) w /= total;
}

DenseMatrix rows_of(const DenseMatrix& M, const Subset& rows) { return M(rows, Eigen::all); }

}  // namespace

double SubsetDistribution::prob(const Subset& s) const {
  auto it = probs.find(s);
  return it == probs.end() ? 0.0 : it->second;
}

std::uint64_t binomial(Index m, Index k) {
  if (k < 0 || k > m) return 0;
  k = std::min(k, m - k);
  std::uint64_t result = 1;
  for (Index i = 1; i <= k; ++i) {
    const auto num = static_cast<std::uint64_t>(m - k + i);
    if (result > std::numeric_limits<std::uint64_t>::max() / num) return std::numeric_limits<std::uint64_t>::max();
    result = result * num / static_cast<std::uint64_t>(i);
  }
  return result;
}

void for_each_subset(Index m, Index k, const std::function<void(const Subset&)>& visit) {
  if (k < 0 || k > m) throw Error(ErrorKind::InvalidParam, "for_each_subset: need 0 <= k <= m");
  if (binomial(m, k) > kMaxSubsets) {
    throw Error(ErrorKind::TooLarge, "C(" + std::to_string(m) + "," + std::to_string(k) + ") exceeds the enumeration guard");
  }
  Subset s(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) s[static_cast<std::size_t>(i)] = i;
  while (true) {
    visit(s);
    Index i = k - 1;
    while (i >= 0 && s[static_cast<std::size_t>(i)] == m - k + i) --i;
    if (i < 0) return;
    ++s[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < k; ++j) s[static_cast<std::size_t>(j)] = s[static_cast<std::size_t>(j - 1)] + 1;
  }
}

SubsetDistribution enumerate_volume_probs(const DenseMatrix& B, Index k) {
  if (k < 1 || k > std::min(B.rows(), B.cols())) throw Error(ErrorKind::InvalidParam, "enumerate_volume_probs: bad k");
  SubsetDistribution dist{B.rows(), k, {}};
  for_each_subset(B.rows(), k, [&](const Subset& t) {
    const DenseMatrix rows = rows_of(B, t);
    double norm_product = 1.0;
    for (Index i = 0; i < k; ++i) norm_product *= rows.row(i).norm();
    double vol_sq;
    if (B.cols() == k) {
      const double det = rows.partialPivLu().determinant();
      if (std::abs(det) <= kZeroVolume * norm_product) return;
      vol_sq = det * det;
    } else {
      vol_sq = (rows * rows.transpose()).partialPivLu().determinant();
      if (!(vol_sq > 0.0) || std::sqrt(vol_sq) <= kZeroVolume * norm_product) return;
    }
    dist.probs.emplace(t, vol_sq);
  });
  normalize(dist);
  return dist;
}

SubsetDistribution enumerate_kdpp_probs(const DenseMatrix& H, Index k) {
  if (H.rows() != H.cols()) throw Error(ErrorKind::DimensionMismatch, "enumerate_kdpp_probs: H must be square");
  if (k < 1 || k > H.rows()) throw Error(ErrorKind::InvalidParam, "enumerate_kdpp_probs: bad k");
  const double scale = H.norm();
  if ((H - H.transpose()).norm() > 1e-12 * scale) throw Error(ErrorKind::NotPSD, "enumerate_kdpp_probs: H is not symmetric");
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(H, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10 * scale) throw Error(ErrorKind::NotPSD, "enumerate_kdpp_probs: negative eigenvalue");

  SubsetDistribution dist{H.rows(), k, {}};
  for_each_subset(H.rows(), k, [&](const Subset& t) {
    const DenseMatrix minor = H(t, t);
    double diag_product = 1.0;
    for (Index i = 0; i < k; ++i) diag_product *= minor(i, i);
    const double det = minor.partialPivLu().determinant();
    if (!(det > 0.0) || det < kZeroVolume * kZeroVolume * diag_product) return;
    dist.probs.emplace(t, det);
  });
  normalize(dist);
  return dist;
}

double total_variation(const SubsetDistribution& p, const std::map<Subset, double>& q) {
  double sum = 0.0;
  for (const auto& [s, pv] : p.probs) {
    auto it = q.find(s);
    sum += std::abs(pv - (it == q.end() ? 0.0 : it->second));
  }
  for (const auto& [s, qv] : q) {
    if (!p.probs.contains(s)) sum += std::abs(qv);
  }
  return 0.5 * sum;
}

double total_variation(const SubsetDistribution& p, const SubsetDistribution& q) { return total_variation(p, q.probs); }

std::map<Subset, double> empirical(const std::vector<Subset>& samples) {
  std::map<Subset, double> freq;
  if (samples.empty()) return freq;
  const double w = 1.0 / static_cast<double>(samples.size());
  for (Subset s : samples) {
    std::sort(s.begin(), s.end());
    freq[s] += w;
  }
  return freq;
}

ExpectationPair expected_type1_error(const DenseMatrix& A, const DenseMatrix& Q) {
  if (A.rows() != Q.rows()) throw Error(ErrorKind::DimensionMismatch, "expected_type1_error: A and Q row counts differ");
  const Index k = Q.cols();
  const auto dist = enumerate_volume_probs(Q, k);
  ExpectationPair out;
  for (const auto& [t, p] : dist.probs) {
    const DenseMatrix coeffs = rows_of(Q, t).partialPivLu().solve(rows_of(A, t));
    out.lhs += p * (A - Q * coeffs).squaredNorm();
  }
  out.rhs = static_cast<double>(k + 1) * (A - Q * (Q.transpose() * A)).squaredNorm();
  return out;
}

DenseMatrix expected_type1_coefficients(const DenseMatrix& A, const DenseMatrix& Q) {
  if (A.rows() != Q.rows()) throw Error(ErrorKind::DimensionMismatch, "expected_type1_coefficients: row counts differ");
  const auto dist = enumerate_volume_probs(Q, Q.cols());
  DenseMatrix mean = DenseMatrix::Zero(Q.cols(), A.cols());
  for (const auto& [t, p] : dist.probs) mean += p * rows_of(Q, t).partialPivLu().solve(rows_of(A, t));
  return mean;
}

ActiveRegressionReport check_active_regression(const DenseMatrix& X, const Vector& y) {
  if (X.rows() != y.size()) throw Error(ErrorKind::DimensionMismatch, "check_active_regression: X and y sizes differ");
  const Index k = X.cols();
  Eigen::ColPivHouseholderQR<DenseMatrix> qr(X);
  qr.setThreshold(kRankTol);
  if (qr.rank() < k) throw Error(ErrorKind::RankDeficient, "check_active_regression: X is not full column rank");

  ActiveRegressionReport report;
  report.true_beta = qr.solve(y);
  report.rhs_err = static_cast<double>(k + 1) * (X * report.true_beta - y).squaredNorm();
  report.expected_beta = Vector::Zero(k);

  const auto dist = enumerate_volume_probs(X, k);
  for (const auto& [t, p] : dist.probs) {
    const Vector beta = rows_of(X, t).partialPivLu().solve(Vector(y(t)));
    report.expected_beta += p * beta;
    report.lhs_err += p * (X * beta - y).squaredNorm();
  }
  return report;
}

OptimalityInstance optimality_instance(Index k) {
  if (k < 1) throw Error(ErrorKind::InvalidParam, "optimality_instance: k must be positive");
  OptimalityInstance inst{DenseMatrix::Zero(k + 1, k), Vector::Ones(k + 1)};
  for (Index i = 0; i < k; ++i) {
    inst.X(i, i) = 1.0;
    inst.X(i + 1, i) = -1.0;
  }
  return inst;
}

OptimalityReport optimality_report(Index k) {
  const auto inst = optimality_instance(k);
  OptimalityReport report;
  const double expected_subset = static_cast<double>((k + 1) * (k + 1));
  const double expected_optimum = static_cast<double>(k + 1);

  bool ok = true;
  for_each_subset(k + 1, k, [&](const Subset& t) {
    const Vector beta = rows_of(inst.X, t).partialPivLu().solve(Vector(inst.y(t)));
    const double r = (inst.X * beta - inst.y).squaredNorm();
    report.subset_residuals.push_back(r);
    ok = ok && std::abs(r - expected_subset) <= 1e-10 * expected_subset;
  });
  const Vector best = inst.X.colPivHouseholderQr().solve(inst.y);
  report.optimum = (inst.X * best - inst.y).squaredNorm();
  ok = ok && std::abs(report.optimum - expected_optimum) <= 1e-10 * expected_optimum;
  report.passed = ok;
  return report;
}

bool check_optimality(Index k) { return optimality_report(k).passed; }

}  // namespace arpid::oracle
