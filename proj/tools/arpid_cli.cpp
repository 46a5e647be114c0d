// arpid: row interpolative decompositions by adaptive randomized pivoting.
//
//   arpid decompose --matrix kernel:g=40 --k 60 --method SkARP --seed 7
//   arpid bench     --matrix kernel:g=40 --k 20,40,60 --method ARP,ProjARP --trials 10 --out results.csv
//   arpid verify    --seed 1
//   arpid gen       --matrix dense-decay:m=500,n=300 --out A.mtx
//
// All randomness flows from --seed. Trial t of a benchmark uses seed + t as its
// trial seed; each (k, trial) cell seeds its generator with
// derive_seed(trial seed, "cell", k), and a generated test matrix uses
// derive_seed(matrix seed, "matrix").

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "arpid/bench.hpp"
#include "arpid/verify.hpp"

namespace {

using namespace arpid;

std::vector<bench::Method> parse_methods(const std::string& list) {
  std::vector<bench::Method> out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item == "all") return bench::all_methods();
    if (!item.empty()) out.push_back(bench::parse_method(item));
  }
  if (out.empty()) throw Error(ErrorKind::InvalidParam, "no methods given");
  return out;
}

std::vector<Index> parse_ks(const std::string& list) {
  std::vector<Index> out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(std::stoll(item));
  }
  for (Index k : out) {
    if (k < 1) throw Error(ErrorKind::InvalidParam, "k must be positive");
  }
  if (out.empty()) throw Error(ErrorKind::InvalidParam, "no k values given");
  return out;
}

struct Common {
  std::string matrix = "kernel";
  std::uint64_t seed = 0;
  Index zeta = 4;
  double oversample = 2.0;
  bool full_scale = false;
};

bench::MatrixSpec load_spec(const Common& c, bench::TestMatrix& A) {
  auto spec = bench::MatrixSpec::parse(c.matrix, c.seed, c.full_scale);
  if (spec.kind == bench::MatrixKind::GeoFile) {
    std::string warning;
    A = bench::load_geo_series_matrix(spec.path, &warning);
    if (!warning.empty()) std::cerr << "warning: " << warning << '\n';
  } else {
    A = bench::build_matrix(spec);
  }
  return spec;
}

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--matrix", c.matrix, "dense-decay | sparse-decay | kernel | geo:PATH | file:PATH, with optional :key=value,...")
      ->capture_default_str();
  cmd->add_option("--seed", c.seed, "master seed")->capture_default_str();
  cmd->add_option("--zeta", c.zeta, "SparseStack row sparsity")->capture_default_str();
  cmd->add_option("--oversample", c.oversample, "OSID oversampling factor c")->capture_default_str();
  cmd->add_flag("--full-scale", c.full_scale, "use the large default matrix sizes");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Row interpolative decompositions by adaptive randomized pivoting"};
  app.require_subcommand(1);

  Common dec;
  std::string dec_method = "ARP";
  Index dec_k = 20;
  std::string dec_out;
  auto* decompose = app.add_subcommand("decompose", "compute one interpolative decomposition");
  add_common(decompose, dec);
  decompose->add_option("--k", dec_k, "target rank")->capture_default_str();
  decompose->add_option("--method", dec_method, "ARP | ProjARP | SkARP | SkQR | RPQR")->capture_default_str();
  decompose->add_option("--out", dec_out, "write pivots and error as JSON here");

  Common bch;
  std::string bch_methods = "all";
  std::string bch_ks = "20,40,60,80,100,120";
  int trials = 10;
  bool timing = false;
  std::string bch_out = "results.csv";
  auto* benchcmd = app.add_subcommand("bench", "compare methods over ranks and trials");
  add_common(benchcmd, bch);
  benchcmd->add_option("--k", bch_ks, "comma-separated ranks")->capture_default_str();
  benchcmd->add_option("--method", bch_methods, "comma-separated methods or 'all'")->capture_default_str();
  benchcmd->add_option("--trials", trials, "trials per (method, k)")->capture_default_str()->check(CLI::PositiveNumber);
  benchcmd->add_flag("--timing", timing, "report the median wall time of 3 repeats per cell");
  benchcmd->add_option("--out", bch_out, "CSV output; the JSON summary goes next to it")->capture_default_str();

  verify::VerifyOptions vopts;
  auto* verifycmd = app.add_subcommand("verify", "run the enumeration and sampling checks");
  verifycmd->add_option("--seed", vopts.master_seed, "master seed")->capture_default_str();
  verifycmd->add_option("--samples", vopts.samples, "samples per distributional check")->capture_default_str();
  verifycmd->add_option("--mutate-acceptance", vopts.acceptance_slack,
                        "add this slack to the rejection test (smoke-tests the suite)")
      ->group("");

  Common gen;
  std::string gen_out;
  auto* gencmd = app.add_subcommand("gen", "write a test matrix in Matrix Market format");
  add_common(gencmd, gen);
  gencmd->add_option("--out", gen_out, "output path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*decompose) {
      bench::TestMatrix A;
      const auto spec = load_spec(dec, A);
      const auto method = bench::parse_method(dec_method);
      Rng rng(bench::cell_seed(dec.seed, dec_k));
      const auto out = bench::run_method(method, A, dec_k, {dec.zeta, dec.oversample}, rng);
      const double err = bench::relative_residual(A, out);
      nlohmann::ordered_json doc;
      doc["method"] = std::string(bench::to_string(method));
      doc["matrix"] = spec.describe();
      doc["k"] = dec_k;
      doc["seed"] = dec.seed;
      doc["effective_rank"] = out.effective_rank;
      doc["rel_fro_error"] = err;
      doc["pivots"] = out.pivots;
      if (dec_out.empty()) {
        std::cout << doc.dump(2) << '\n';
      } else {
        std::ofstream(dec_out) << doc.dump(2) << '\n';
        std::cout << bench::to_string(method) << " k=" << dec_k << " rel_fro_error=" << bench::format_double(err) << '\n';
      }
      return 0;
    }

    if (*benchcmd) {
      bench::TestMatrix A;
      const auto spec = load_spec(bch, A);
      bench::BenchOptions opts;
      opts.methods = parse_methods(bch_methods);
      opts.ks = parse_ks(bch_ks);
      for (int t = 0; t < trials; ++t) opts.seeds.push_back(bch.seed + static_cast<std::uint64_t>(t));
      opts.method = {bch.zeta, bch.oversample};
      opts.timing = timing;
      const auto records = bench::run_bench(spec, A, opts, &std::cerr);

      std::ofstream csv(bch_out);
      if (!csv) throw Error(ErrorKind::FileNotFound, "cannot write " + bch_out);
      bench::write_csv(csv, records);
      std::filesystem::path json_path(bch_out);
      json_path.replace_extension(".json");
      std::ofstream(json_path) << bench::summary_json(records) << '\n';
      std::size_t failed = 0;
      for (const auto& r : records) failed += r.failed() ? 1 : 0;
      std::cout << records.size() << " records (" << failed << " failed) -> " << bch_out << ", " << json_path.string()
                << '\n';
      return 0;
    }

    if (*verifycmd) {
      const auto results = verify::run_checks(vopts);
      return verify::print_report(std::cout, results) ? 0 : 1;
    }

    if (*gencmd) {
      bench::TestMatrix A;
      load_spec(gen, A);
      bench::save_matrix(A, gen_out);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
