#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "arpid/common.hpp"

namespace arpid::oracle {

// Brute-force ground truth by enumerating every size-k subset. Desk-scale only:
// everything here refuses inputs with more than kMaxSubsets subsets.

inline constexpr std::uint64_t kMaxSubsets = 1'000'000;

using Subset = std::vector<Index>;  // sorted, 0-based

struct SubsetDistribution {
  Index m = 0;
  Index k = 0;
  std::map<Subset, double> probs;  // zero-mass subsets are omitted

  double prob(const Subset& s) const;
};

/// C(m, k), saturating at UINT64_MAX.
std::uint64_t binomial(Index m, Index k);

/// Calls `visit` on every size-k subset of {0..m-1} in lexicographic order.
/// Throws TooLarge above kMaxSubsets.
void for_each_subset(Index m, Index k, const std::function<void(const Subset&)>& visit);

/// P{T} proportional to the squared k-volume of B(T,:) (|det| when B has k
/// columns, sqrt(det(B(T,:) B(T,:)^T)) otherwise).
SubsetDistribution enumerate_volume_probs(const DenseMatrix& B, Index k);

/// P{T} proportional to det H(T,T) for symmetric psd H. Throws NotPSD.
SubsetDistribution enumerate_kdpp_probs(const DenseMatrix& H, Index k);

/// sum_T |p(T) - q(T)| / 2 over the union of supports.
double total_variation(const SubsetDistribution& p, const std::map<Subset, double>& q);
double total_variation(const SubsetDistribution& p, const SubsetDistribution& q);

/// Normalized histogram of sampled subsets (each sample sorted first).
std::map<Subset, double> empirical(const std::vector<Subset>& samples);

struct ExpectationPair {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// lhs = E_{T ~ VS_k(Q)} ||A - Q Q(T,:)^{-1} A(T,:)||_F^2 by enumeration,
/// rhs = (k+1) ||(I - Q Q^T) A||_F^2. Q must be orthonormal.
ExpectationPair expected_type1_error(const DenseMatrix& A, const DenseMatrix& Q);

/// E_{T ~ VS_k(Q)} Q(T,:)^{-1} A(T,:) by enumeration, which equals Q^T A.
DenseMatrix expected_type1_coefficients(const DenseMatrix& A, const DenseMatrix& Q);

struct ActiveRegressionReport {
  Vector expected_beta;  // E_T X(T,:)^{-1} y(T)
  Vector true_beta;      // X^+ y
  double lhs_err = 0.0;  // E_T ||X beta_T - y||^2
  double rhs_err = 0.0;  // (k+1) ||(I - X X^+) y||^2
};

/// Volume-sampled active regression on full-column-rank X (m x k).
ActiveRegressionReport check_active_regression(const DenseMatrix& X, const Vector& y);

struct OptimalityInstance {
  DenseMatrix X;  // (k+1) x k differences basis, X^T y = 0
  Vector y;       // all ones
};

OptimalityInstance optimality_instance(Index k);

struct OptimalityReport {
  std::vector<double> subset_residuals;  // ||X beta_T - y||^2, one per subset
  double optimum = 0.0;                  // min_beta ||X beta - y||^2
  bool passed = false;
};

/// Every size-k subset of the instance should cost exactly (k+1)^2 against an
/// optimum of k+1. Checked to 1e-10 relative.
OptimalityReport optimality_report(Index k);
bool check_optimality(Index k);

}  // namespace arpid::oracle
