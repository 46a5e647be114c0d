#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <unsupported/Eigen/SparseExtra>

#include "arpid/bench.hpp"

namespace arpid::bench {

DenseMatrix gen_decay_dense(Index m, Index n, Rng& rng) {
  if (m < 1 || n < 1) throw Error(ErrorKind::InvalidParam, "gen_decay_dense: m and n must be positive");
  std::normal_distribution<double> normal;
  DenseMatrix A(m, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < m; ++i) A(i, j) = normal(rng);
  }
  for (Index i = 0; i < m; ++i) A.row(i) /= static_cast<double>((i + 1) * (i + 1));
  return A;
}

SparseMatrix gen_decay_sparse(Index m, Index n, Index nnz_per_col, Rng& rng) {
  if (m < 1 || n < 1 || nnz_per_col < 1) throw Error(ErrorKind::InvalidParam, "gen_decay_sparse: sizes must be positive");
  if (nnz_per_col > m) throw Error(ErrorKind::InvalidParam, "gen_decay_sparse: more nonzeros per column than rows");
  std::normal_distribution<double> normal;
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(n * nnz_per_col));
  std::vector<Index> rows;
  std::unordered_set<Index> chosen;
  for (Index j = 0; j < n; ++j) {
    // Floyd's algorithm: a uniform nnz-subset of {0..m-1} in O(nnz) draws.
    chosen.clear();
    rows.clear();
    for (Index r = m - nnz_per_col; r < m; ++r) {
      const Index t = uniform_index(rng, r + 1);
      const Index pick = chosen.contains(t) ? r : t;
      chosen.insert(pick);
      rows.push_back(pick);
    }
    std::sort(rows.begin(), rows.end());
    for (Index i : rows) {
      const double scale = 1.0 / static_cast<double>((i + 1) * (i + 1));
      entries.emplace_back(i, j, scale * normal(rng));
    }
  }
  SparseMatrix A(m, n);
  A.setFromTriplets(entries.begin(), entries.end());
  return A;
}

DenseMatrix gen_kernel(Index grid_side) {
  if (grid_side < 1) throw Error(ErrorKind::InvalidParam, "gen_kernel: grid side must be positive");
  const Index g = grid_side;
  const Index n = g * g;
  const double h = 1.0 / static_cast<double>(g);
  DenseMatrix A(n, n);
  for (Index q = 0; q < n; ++q) {
    const double y0 = 1.0 + static_cast<double>(q / g) * h;
    const double y1 = static_cast<double>(q % g) * h;
    for (Index p = 0; p < n; ++p) {
      const double dx = static_cast<double>(p / g) * h - y0;
      const double dy = static_cast<double>(p % g) * h - y1;
      A(p, q) = 1.0 / std::sqrt(dx * dx + dy * dy);
    }
  }
  return A;
}

// ---------------------------------------------------------------------------
// GEO series matrix

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

std::string_view unquote(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

}  // namespace

DenseMatrix parse_geo_series_matrix(std::istream& in, std::string* warning) {
  std::string line;
  std::size_t line_no = 0;
  bool in_table = false;
  bool finished = false;
  std::size_t width = 0;
  std::vector<std::vector<double>> probes;  // one row of values per probe

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.starts_with("!series_matrix_table_begin")) {
      in_table = true;
      continue;
    }
    if (line.starts_with("!series_matrix_table_end")) {
      finished = in_table;
      break;
    }
    if (!in_table || line.empty() || line.front() == '!') continue;

    const auto fields = split_tabs(line);
    if (width == 0) {
      if (fields.size() < 2) throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": no sample columns");
      width = fields.size();
      continue;
    }
    if (fields.size() != width) {
      throw Error(ErrorKind::RaggedTable, "line " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                                              " fields, found " + std::to_string(fields.size()));
    }
    std::vector<double> values(width - 1);
    for (std::size_t c = 1; c < width; ++c) {
      const std::string_view text = unquote(fields[c]);
      const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), values[c - 1]);
      if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty() || !std::isfinite(values[c - 1])) {
        throw Error(ErrorKind::ParseError,
                    "line " + std::to_string(line_no) + ": cannot parse '" + std::string(text) + "' as a number");
      }
    }
    probes.push_back(std::move(values));
  }
  if (!finished) throw Error(ErrorKind::ParseError, "series matrix table markers missing or unterminated");
  if (width == 0) throw Error(ErrorKind::ParseError, "series matrix table is empty");

  const auto samples = static_cast<Index>(width - 1);
  const auto n_probes = static_cast<Index>(probes.size());
  DenseMatrix A(samples, n_probes);
  for (Index p = 0; p < n_probes; ++p) {
    for (Index s = 0; s < samples; ++s) A(s, p) = probes[static_cast<std::size_t>(p)][static_cast<std::size_t>(s)];
  }
  if (warning && (samples != 107 || n_probes != 22283)) {
    *warning = "series matrix has shape " + std::to_string(samples) + "x" + std::to_string(n_probes) +
               " (samples x probes); GSE10072 is 107x22283";
  }
  return A;
}

DenseMatrix load_geo_series_matrix(const std::filesystem::path& path, std::string* warning) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FileNotFound, path.string());
  return parse_geo_series_matrix(in, warning);
}

// ---------------------------------------------------------------------------
// Matrix specifications

MatrixSpec MatrixSpec::parse(const std::string& text, std::uint64_t default_seed, bool full_scale) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);

  MatrixSpec spec;
  spec.seed = default_seed;
  if (kind == "geo" || kind == "file") {
    spec.kind = kind == "geo" ? MatrixKind::GeoFile : MatrixKind::File;
    if (rest.empty()) throw Error(ErrorKind::InvalidParam, "matrix spec '" + text + "' needs a path");
    spec.path = rest;
    return spec;
  }
  if (kind == "dense-decay") {
    spec.kind = MatrixKind::DenseDecay;
    spec.m = spec.n = full_scale ? 10'000 : 2'000;
  } else if (kind == "sparse-decay") {
    spec.kind = MatrixKind::SparseDecay;
    spec.m = full_scale ? 1'000'000 : 100'000;
    spec.n = full_scale ? 10'000 : 2'000;
  } else if (kind == "kernel") {
    spec.kind = MatrixKind::Kernel;
    spec.grid_side = full_scale ? 100 : 40;
  } else {
    throw Error(ErrorKind::InvalidParam, "unknown matrix kind '" + kind + "'");
  }

  std::stringstream params(rest);
  std::string item;
  while (std::getline(params, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::InvalidParam, "matrix parameter '" + item + "' is not key=value");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
      throw Error(ErrorKind::InvalidParam, "matrix parameter '" + item + "' is not an integer");
    }
    if (key == "m") spec.m = static_cast<Index>(v);
    else if (key == "n") spec.n = static_cast<Index>(v);
    else if (key == "nnz") spec.nnz_per_col = static_cast<Index>(v);
    else if (key == "g") spec.grid_side = static_cast<Index>(v);
    else if (key == "seed") spec.seed = v;
    else throw Error(ErrorKind::InvalidParam, "unknown matrix parameter '" + key + "'");
  }
  const bool sized = spec.kind == MatrixKind::Kernel ? spec.grid_side > 0 : (spec.m > 0 && spec.n > 0);
  if (!sized || spec.nnz_per_col < 1) throw Error(ErrorKind::InvalidParam, "matrix parameters must be positive");
  return spec;
}

std::string MatrixSpec::describe() const {
  const auto dims = std::to_string(m) + "x" + std::to_string(n);
  switch (kind) {
    case MatrixKind::DenseDecay: return "dense-decay/" + dims + "/seed" + std::to_string(seed);
    case MatrixKind::SparseDecay:
      return "sparse-decay/" + dims + "/nnz" + std::to_string(nnz_per_col) + "/seed" + std::to_string(seed);
    case MatrixKind::Kernel: return "kernel/g" + std::to_string(grid_side);
    case MatrixKind::GeoFile: return "geo/" + path.filename().string();
    case MatrixKind::File: return "file/" + path.filename().string();
  }
  return "unknown";
}

TestMatrix build_matrix(const MatrixSpec& spec) {
  Rng rng(derive_seed(spec.seed, "matrix"));
  switch (spec.kind) {
    case MatrixKind::DenseDecay: return gen_decay_dense(spec.m, spec.n, rng);
    case MatrixKind::SparseDecay: return gen_decay_sparse(spec.m, spec.n, spec.nnz_per_col, rng);
    case MatrixKind::Kernel: return gen_kernel(spec.grid_side);
    case MatrixKind::GeoFile: return load_geo_series_matrix(spec.path);
    case MatrixKind::File: return load_matrix(spec.path);
  }
  throw Error(ErrorKind::InvalidParam, "unknown matrix kind");
}

void save_matrix(const TestMatrix& A, const std::filesystem::path& path) {
  const SparseMatrix sparse =
      std::holds_alternative<SparseMatrix>(A) ? std::get<SparseMatrix>(A) : std::get<DenseMatrix>(A).sparseView(0.0, 0.0);
  if (!Eigen::saveMarket(sparse, path.string())) throw Error(ErrorKind::FileNotFound, "cannot write " + path.string());
}

TestMatrix load_matrix(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error(ErrorKind::FileNotFound, path.string());
  SparseMatrix A;
  if (!Eigen::loadMarket(A, path.string())) throw Error(ErrorKind::ParseError, "cannot read Matrix Market file " + path.string());
  const double fill = static_cast<double>(A.nonZeros()) / static_cast<double>(std::max<Index>(1, A.rows() * A.cols()));
  if (fill > 0.25) return DenseMatrix(A);
  return A;
}

}  // namespace arpid::bench
