#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace arpid {

// Dense matrices are column-major throughout (Eigen's default); seeded runs
// depend on that layout for bit reproducibility.
using DenseMatrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;  // compressed sparse column
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

using Rng = std::mt19937_64;

// Relative threshold used by every triangular-diagonal rank test.
inline constexpr double kRankTol = 1e-12;

enum class ErrorKind {
  EmptyMatrix,
  DimensionMismatch,
  RankDeficient,
  RankDeficientUpdate,
  InvalidSparsity,
  NotOrthonormal,
  MaxRoundsExceeded,
  DegenerateDistribution,
  TooLarge,
  NotPSD,
  InvalidParam,
  FileNotFound,
  ParseError,
  RaggedTable,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Uniform double in [0, 1) from the top 53 bits of one generator draw.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform integer in [0, n). Plain modulo reduction; n is always tiny compared
/// to 2^64 here so the bias is far below anything a test can see.
inline std::int64_t uniform_index(Rng& rng, std::int64_t n) {
  return static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(n));
}

/// SplitMix64 finalizer, used to derive independent seeds from a master seed.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for a named sub-stream of `master`. Tags are hashed with FNV-1a so the
/// mapping does not depend on the standard library's std::hash.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t index = 0);

}  // namespace arpid
