#pragma once

#include <cstdint>
#include <string_view>

#include "arpid/common.hpp"
#include "arpid/samplers.hpp"

namespace arpid {

/// How the interpolation matrix W is formed once the pivots S are known.
///   Type1: W = Q Q(S,:)^{-1}              (cheapest)
///   Type2: W = A A(S,:)^+                 (row-span projection, most accurate)
///   OSID:  W = (A Phi)(A(S,:) Phi)^+      (sketched Type2, Phi of width ~c*k)
enum class Variant { Type1, Type2, OSID };

enum class PivotSampler { Rejection, Sequential };

std::string_view to_string(Variant v);

struct ArpConfig {
  Index k = 1;
  Index zeta = 4;
  double oversample = 2.0;
  Variant variant = Variant::Type1;
  PivotSampler sampler = PivotSampler::Rejection;
  int max_rounds = 64;
  std::uint64_t seed = 0;
};

struct InterpolativeDecomposition {
  PivotSet pivots;
  DenseMatrix W;  // m x effective_rank, columns follow pivot order
  Variant variant = Variant::Type1;
  Index effective_rank = 0;
  // Set when a pseudoinverse had to fall back to the truncated SVD.
  bool pinv_fallback = false;
  ArpConfig config;
};

/// Orthonormal basis of range(A * Omega) for a fresh SparseStack Omega. k is
/// rounded up to a multiple of zeta for the embedding and the basis is cut back
/// to at most k columns; a narrower result signals a rank-deficient sketch.
DenseMatrix rangefinder(const DenseMatrix& A, Index k, Index zeta, Rng& rng);
DenseMatrix rangefinder(const SparseMatrix& A, Index k, Index zeta, Rng& rng);

/// Row subset of A (rows indexed by `rows`, in that order) as a dense matrix.
DenseMatrix select_rows(const DenseMatrix& A, const std::vector<Index>& rows);
DenseMatrix select_rows(const SparseMatrix& A, const std::vector<Index>& rows);

/// W = Q Q(S,:)^{-1} from the factorization Q^T(:,S) = U R, as U^T Q^T followed
/// by a triangular solve with R.
DenseMatrix type1_interpolation(const DenseMatrix& Q, const HouseholderQR& qr_of_selected);

/// Adaptive randomized pivoting: rangefinder, volume-sampled pivots, then W per
/// cfg.variant. Draws from `rng` in a fixed order: Omega, pivots, Phi. The
/// overloads without a generator seed one from cfg.seed.
InterpolativeDecomposition arp_decompose(const DenseMatrix& A, const ArpConfig& cfg, Rng& rng);
InterpolativeDecomposition arp_decompose(const SparseMatrix& A, const ArpConfig& cfg, Rng& rng);
InterpolativeDecomposition arp_decompose(const DenseMatrix& A, const ArpConfig& cfg);
InterpolativeDecomposition arp_decompose(const SparseMatrix& A, const ArpConfig& cfg);

/// W for fixed pivots with a Type2 or OSID rule; shared by the baselines.
DenseMatrix projection_interpolation(const DenseMatrix& A, const std::vector<Index>& pivots, bool* fallback = nullptr);
DenseMatrix projection_interpolation(const SparseMatrix& A, const std::vector<Index>& pivots, bool* fallback = nullptr);
DenseMatrix osid_interpolation(const DenseMatrix& A, const std::vector<Index>& pivots, Index width, Index zeta,
                               Rng& rng, bool* fallback = nullptr);
DenseMatrix osid_interpolation(const SparseMatrix& A, const std::vector<Index>& pivots, Index width, Index zeta,
                               Rng& rng, bool* fallback = nullptr);

/// ||A - W A(S,:)||_F, streamed over column blocks of A.
double residual_fro(const DenseMatrix& A, const InterpolativeDecomposition& id);
double residual_fro(const SparseMatrix& A, const InterpolativeDecomposition& id);
double residual_fro(const DenseMatrix& A, const DenseMatrix& W, const std::vector<Index>& pivots);
double residual_fro(const SparseMatrix& A, const DenseMatrix& W, const std::vector<Index>& pivots);

}  // namespace arpid
