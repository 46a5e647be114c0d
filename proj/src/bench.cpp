#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <Eigen/QR>
#include "json.hpp"

#include "arpid/arp.hpp"
#include "arpid/bench.hpp"
#include "arpid/samplers.hpp"
#include "arpid/sketch.hpp"

namespace arpid::bench {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::ARP: return "ARP";
    case Method::ProjARP: return "ProjARP";
    case Method::SkARP: return "SkARP";
    case Method::SkQR: return "SkQR";
    case Method::RPQR: return "RPQR";
  }
  return "Unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : all_methods()) {
    if (to_string(m) == name) return m;
  }
  if (name == "OptARP") return Method::ProjARP;
  throw Error(ErrorKind::InvalidParam, "unknown method '" + std::string(name) + "'");
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods{Method::ARP, Method::ProjARP, Method::SkARP, Method::SkQR, Method::RPQR};
  return methods;
}

bool BenchmarkRecord::failed() const { return std::isnan(rel_fro_error); }

bool operator==(const BenchmarkRecord& a, const BenchmarkRecord& b) {
  const auto same = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
  return a.method == b.method && a.matrix == b.matrix && a.m == b.m && a.n == b.n && a.k == b.k && a.seed == b.seed &&
         same(a.rel_fro_error, b.rel_fro_error) && same(a.wall_time_s, b.wall_time_s) &&
         a.effective_rank == b.effective_rank;
}

std::uint64_t cell_seed(std::uint64_t trial_seed, Index k) {
  return derive_seed(trial_seed, "cell", static_cast<std::uint64_t>(k));
}

namespace {

// The RPQR baseline works on a dense copy of A^T; refuse beyond this size.
constexpr Index kMaxDenseEntries = 50'000'000;

template <typename MatrixA>
MethodOutcome run_on(Method method, const MatrixA& A, Index k, const MethodOptions& opts, Rng& rng) {
  MethodOutcome out;
  const auto osid_width = [&](Index rank) {
    return static_cast<Index>(std::llround(opts.oversample * static_cast<double>(rank)));
  };
  switch (method) {
    case Method::ARP:
    case Method::ProjARP:
    case Method::SkARP: {
      ArpConfig cfg;
      cfg.k = k;
      cfg.zeta = opts.zeta;
      cfg.oversample = opts.oversample;
      cfg.variant = method == Method::ARP ? Variant::Type1 : method == Method::ProjARP ? Variant::Type2 : Variant::OSID;
      auto id = arp_decompose(A, cfg, rng);
      out.pivots = id.pivots.indices();
      out.W = std::move(id.W);
      out.effective_rank = id.effective_rank;
      break;
    }
    case Method::SkQR: {
      if (k > std::min(A.rows(), A.cols())) throw Error(ErrorKind::InvalidParam, "SkQR: k exceeds min(m, n)");
      const auto omega = sparsestack_new(A.cols(), round_up_to_multiple(k, opts.zeta), opts.zeta, rng);
      const DenseMatrix sketch_t = apply_right(A, omega).transpose();
      Eigen::ColPivHouseholderQR<DenseMatrix> cpqr(sketch_t);
      cpqr.setThreshold(kRankTol);
      const Index rank = std::min(k, cpqr.rank());
      if (rank == 0) throw Error(ErrorKind::RankDeficient, "SkQR: sketch is numerically zero");
      const auto& perm = cpqr.colsPermutation().indices();
      out.pivots.assign(perm.data(), perm.data() + rank);
      out.W = osid_interpolation(A, out.pivots, osid_width(rank), opts.zeta, rng);
      out.effective_rank = rank;
      break;
    }
    case Method::RPQR: {
      if (A.rows() * A.cols() > kMaxDenseEntries) {
        throw Error(ErrorKind::InvalidParam, "RPQR baseline needs a dense copy of A; matrix is too large");
      }
      const DenseMatrix At = DenseMatrix(A).transpose();
      out.pivots = rpqr_sequential(At, k, rng).indices();
      out.W = projection_interpolation(A, out.pivots);
      out.effective_rank = k;
      break;
    }
  }
  return out;
}

std::string quote_csv(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  return fields;
}

template <typename T>
T parse_number(const std::string& text, std::size_t line_no) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::ParseError, "csv line " + std::to_string(line_no) + ": bad number '" + text + "'");
  }
  return value;
}

std::size_t method_rank(const std::string& name) {
  const auto& methods = all_methods();
  for (std::size_t i = 0; i < methods.size(); ++i) {
    if (to_string(methods[i]) == name) return i;
  }
  return methods.size();
}

}  // namespace

MethodOutcome run_method(Method method, const TestMatrix& A, Index k, const MethodOptions& opts, Rng& rng) {
  return std::visit([&](const auto& mat) { return run_on(method, mat, k, opts, rng); }, A);
}

double frobenius_norm(const TestMatrix& A) {
  return std::visit([](const auto& mat) { return mat.norm(); }, A);
}

double relative_residual(const TestMatrix& A, const MethodOutcome& out) {
  const double num = std::visit([&](const auto& mat) { return residual_fro(mat, out.W, out.pivots); }, A);
  return num / frobenius_norm(A);
}

std::vector<BenchmarkRecord> run_bench(const MatrixSpec& spec, const TestMatrix& A, const BenchOptions& opts,
                                       std::ostream* log) {
  using Clock = std::chrono::steady_clock;
  const Index rows = std::visit([](const auto& mat) { return static_cast<Index>(mat.rows()); }, A);
  const Index cols = std::visit([](const auto& mat) { return static_cast<Index>(mat.cols()); }, A);
  const std::string label = spec.describe();
  const int repeats = opts.timing ? std::max(1, opts.timing_repeats) : 1;

  std::vector<BenchmarkRecord> records;
  for (Method method : opts.methods) {
    for (Index k : opts.ks) {
      for (std::uint64_t seed : opts.seeds) {
        BenchmarkRecord rec{std::string(to_string(method)), label, rows, cols, k, seed, 0.0, 0.0, 0};
        std::vector<double> times;
        try {
          for (int r = 0; r < repeats; ++r) {
            Rng rng(cell_seed(seed, k));
            const auto start = Clock::now();
            const MethodOutcome out = run_method(method, A, k, opts.method, rng);
            times.push_back(std::chrono::duration<double>(Clock::now() - start).count());
            if (r == 0) {
              rec.rel_fro_error = relative_residual(A, out);
              rec.effective_rank = out.effective_rank;
            }
          }
          std::nth_element(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(times.size() / 2), times.end());
          rec.wall_time_s = std::max(times[times.size() / 2], 1e-9);
        } catch (const std::exception& e) {
          rec.rel_fro_error = std::nan("");
          rec.wall_time_s = times.empty() ? 1e-9 : std::max(times.front(), 1e-9);
          rec.effective_rank = 0;
          if (log) *log << "failed: " << rec.method << " k=" << k << " seed=" << seed << ": " << e.what() << '\n';
        }
        records.push_back(std::move(rec));
      }
    }
  }
  std::sort(records.begin(), records.end(), [](const BenchmarkRecord& a, const BenchmarkRecord& b) {
    return std::tuple(method_rank(a.method), a.method, a.k, a.seed) <
           std::tuple(method_rank(b.method), b.method, b.k, b.seed);
  });
  return records;
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const std::vector<BenchmarkRecord>& records) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << quote_csv(r.method) << ',' << quote_csv(r.matrix) << ',' << r.m << ',' << r.n << ',' << r.k << ','
        << r.seed << ',' << format_double(r.rel_fro_error) << ',' << format_double(r.wall_time_s) << ','
        << r.effective_rank << '\n';
  }
}

std::vector<BenchmarkRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw Error(ErrorKind::ParseError, "csv: missing or wrong header");
  std::vector<BenchmarkRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 9) throw Error(ErrorKind::RaggedTable, "csv line " + std::to_string(line_no) + ": expected 9 fields");
    BenchmarkRecord r;
    r.method = f[0];
    r.matrix = f[1];
    r.m = parse_number<Index>(f[2], line_no);
    r.n = parse_number<Index>(f[3], line_no);
    r.k = parse_number<Index>(f[4], line_no);
    r.seed = parse_number<std::uint64_t>(f[5], line_no);
    r.rel_fro_error = parse_number<double>(f[6], line_no);
    r.wall_time_s = parse_number<double>(f[7], line_no);
    r.effective_rank = parse_number<Index>(f[8], line_no);
    records.push_back(std::move(r));
  }
  return records;
}

std::string summary_json(const std::vector<BenchmarkRecord>& records) {
  nlohmann::ordered_json doc;
  doc["matrix"] = records.empty() ? "" : records.front().matrix;
  auto& summary = doc["summary"];
  summary = nlohmann::ordered_json::object();

  struct Stats {
    double sum = 0.0, min = INFINITY, max = -INFINITY;
    int trials = 0, failures = 0;
  };
  std::vector<std::pair<std::pair<std::string, Index>, Stats>> cells;
  for (const auto& r : records) {
    const auto key = std::pair(r.method, r.k);
    if (cells.empty() || cells.back().first != key) cells.push_back({key, Stats{}});
    Stats& s = cells.back().second;
    if (r.failed()) {
      ++s.failures;
      continue;
    }
    ++s.trials;
    s.sum += r.rel_fro_error;
    s.min = std::min(s.min, r.rel_fro_error);
    s.max = std::max(s.max, r.rel_fro_error);
  }
  for (const auto& [key, s] : cells) {
    nlohmann::ordered_json entry;
    if (s.trials > 0) {
      entry["mean"] = s.sum / s.trials;
      entry["min"] = s.min;
      entry["max"] = s.max;
    } else {
      entry["mean"] = entry["min"] = entry["max"] = nullptr;
    }
    entry["trials"] = s.trials;
    entry["failures"] = s.failures;
    summary[key.first][std::to_string(key.second)] = entry;
  }
  return doc.dump(2);
}

}  // namespace arpid::bench
