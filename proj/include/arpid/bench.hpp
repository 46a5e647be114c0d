#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "arpid/common.hpp"

namespace arpid::bench {

// ---------------------------------------------------------------------------
// Test matrices

/// Row i (1-based) is i^{-2} times a row of iid standard normals.
DenseMatrix gen_decay_dense(Index m, Index n, Rng& rng);

/// Each column gets nnz_per_col distinct uniformly placed rows with standard
/// normal values; row i is then scaled by i^{-2}. Throws InvalidParam if
/// nnz_per_col > m.
SparseMatrix gen_decay_sparse(Index m, Index n, Index nnz_per_col, Rng& rng);

/// Inverse-distance kernel between a g x g grid on [0,1)^2 (sources) and the
/// same grid shifted to [1,2) x [0,1). Points are ordered with the second
/// coordinate fastest.
DenseMatrix gen_kernel(Index grid_side);

/// GEO series-matrix table, returned transposed (samples x probes). A shape
/// other than 107 x 22283 is reported through `warning`, not as an error.
DenseMatrix load_geo_series_matrix(const std::filesystem::path& path, std::string* warning = nullptr);
DenseMatrix parse_geo_series_matrix(std::istream& in, std::string* warning = nullptr);

// ---------------------------------------------------------------------------
// Matrix specifications

enum class MatrixKind { DenseDecay, SparseDecay, Kernel, GeoFile, File };

struct MatrixSpec {
  MatrixKind kind = MatrixKind::Kernel;
  Index m = 0;
  Index n = 0;
  Index nnz_per_col = 30;
  Index grid_side = 40;
  std::filesystem::path path;
  std::uint64_t seed = 0;

  /// "kind:key=value,..." such as "kernel:g=40", "dense-decay:m=2000,n=2000",
  /// "sparse-decay:m=100000,n=2000,nnz=30", "geo:GSE10072.txt", "file:A.mtx".
  /// Omitted sizes take the desk-scale defaults, or the full-scale ones.
  static MatrixSpec parse(const std::string& text, std::uint64_t default_seed, bool full_scale = false);

  /// Comma-free label used in result files.
  std::string describe() const;
};

using TestMatrix = std::variant<DenseMatrix, SparseMatrix>;

TestMatrix build_matrix(const MatrixSpec& spec);

/// Matrix Market I/O for the `file` kind and the `gen` subcommand.
void save_matrix(const TestMatrix& A, const std::filesystem::path& path);
TestMatrix load_matrix(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Benchmarks

/// The five row-ID methods compared by the harness.
///   ARP      adaptive randomized pivoting, W = Q Q(S,:)^{-1}
///   ProjARP  same pivots, W = A A(S,:)^+            (alias: OptARP)
///   SkARP    same pivots, OSID interpolation matrix
///   SkQR     column-pivoted QR on (A Omega)^T, OSID interpolation matrix
///   RPQR     sequential randomly pivoted QR on A^T, W = A A(S,:)^+
enum class Method { ARP, ProjARP, SkARP, SkQR, RPQR };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);
const std::vector<Method>& all_methods();

struct BenchmarkRecord {
  std::string method;
  std::string matrix;
  Index m = 0;
  Index n = 0;
  Index k = 0;
  std::uint64_t seed = 0;
  double rel_fro_error = 0.0;  // NaN marks a failed run
  double wall_time_s = 0.0;
  Index effective_rank = 0;

  bool failed() const;
  friend bool operator==(const BenchmarkRecord& a, const BenchmarkRecord& b);
};

struct MethodOptions {
  Index zeta = 4;
  double oversample = 2.0;
};

struct MethodOutcome {
  std::vector<Index> pivots;
  DenseMatrix W;
  Index effective_rank = 0;
};

/// Run one method. Every method draws from `rng` for its sketches and pivots;
/// ARP, ProjARP and SkARP draw the rangefinder and pivots in the same order, so
/// a shared seed gives them the same pivot set.
MethodOutcome run_method(Method method, const TestMatrix& A, Index k, const MethodOptions& opts, Rng& rng);

/// Generator seed for one benchmark cell. The method is deliberately not part
/// of the key so that the ARP variants compared in one trial share pivots.
std::uint64_t cell_seed(std::uint64_t trial_seed, Index k);

double frobenius_norm(const TestMatrix& A);
double relative_residual(const TestMatrix& A, const MethodOutcome& out);

struct BenchOptions {
  std::vector<Method> methods;
  std::vector<Index> ks;
  std::vector<std::uint64_t> seeds;
  MethodOptions method;
  // Timing runs repeat each cell and keep the median wall time.
  bool timing = false;
  int timing_repeats = 3;
};

/// Every (method, k, seed) cell, sorted by method, k, seed. Failures become
/// records with a NaN error; they are reported on `log` when given.
std::vector<BenchmarkRecord> run_bench(const MatrixSpec& spec, const TestMatrix& A, const BenchOptions& opts,
                                       std::ostream* log = nullptr);

inline constexpr std::string_view kCsvHeader = "method,matrix,m,n,k,seed,rel_fro_error,wall_time_s,effective_rank";

void write_csv(std::ostream& out, const std::vector<BenchmarkRecord>& records);
std::vector<BenchmarkRecord> read_csv(std::istream& in);

/// {"matrix": ..., "summary": {method: {k: {mean, min, max, trials, failures}}}}
std::string summary_json(const std::vector<BenchmarkRecord>& records);

/// Shortest decimal string that parses back to exactly `x`.
std::string format_double(double x);

}  // namespace arpid::bench
