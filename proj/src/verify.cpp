#include "arpid/verify.hpp"

#include <array>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>

#include "arpid/arp.hpp"
#include "arpid/bench.hpp"
#include "arpid/linalg.hpp"
#include "arpid/oracle.hpp"
#include "arpid/samplers.hpp"
#include "arpid/sketch.hpp"

namespace arpid::verify {

namespace {

using oracle::Subset;

std::string sci(double x) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(2) << x;
  return s.str();
}

CheckResult make(std::string name, bool ok, std::string detail) { return {std::move(name), ok, std::move(detail)}; }

// m, k, n drawn from small fixed menus so every instance stays enumerable.
struct SmallShape {
  Index m, k, n;
};

SmallShape shape_for(Rng& rng, std::initializer_list<Index> ms, Index max_k, std::initializer_list<Index> ns) {
  const auto pick = [&](std::initializer_list<Index> menu) {
    return *(menu.begin() + uniform_index(rng, static_cast<std::int64_t>(menu.size())));
  };
  return {pick(ms), 1 + uniform_index(rng, max_k), pick(ns)};
}

std::vector<Subset> sample_rejection(const DenseMatrix& Q, long count, Rng& rng, double slack) {
  RejectionConfig cfg;
  cfg.rejection.acceptance_slack = slack;
  std::vector<Subset> out;
  out.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) out.push_back(rejection_rpqr(Q, rng, cfg).pivots.sorted());
  return out;
}

std::vector<Subset> sample_sequential(const DenseMatrix& Q, long count, Rng& rng) {
  const DenseMatrix Qt = Q.transpose();
  std::vector<Subset> out;
  out.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) out.push_back(rpqr_sequential(Qt, Q.cols(), rng).sorted());
  return out;
}

// Pearson goodness-of-fit p-value of the samples against `dist`; zero if any
// sample falls outside the support.
double chi_square_pvalue(const oracle::SubsetDistribution& dist, const std::vector<Subset>& samples) {
  std::map<Subset, double> counts;
  for (const auto& s : samples) counts[s] += 1.0;
  const auto n = static_cast<double>(samples.size());
  double stat = 0.0;
  for (const auto& [s, c] : counts) {
    if (dist.prob(s) == 0.0) return 0.0;
  }
  for (const auto& [s, p] : dist.probs) {
    const double expected = n * p;
    const auto it = counts.find(s);
    const double observed = it == counts.end() ? 0.0 : it->second;
    stat += (observed - expected) * (observed - expected) / expected;
  }
  const auto df = static_cast<double>(dist.probs.size() - 1);
  if (df < 1.0) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(df), stat));
}

// Textbook triple loop, summing in increasing inner index.
DenseMatrix naive_product(const DenseMatrix& A, const DenseMatrix& B) {
  DenseMatrix C = DenseMatrix::Zero(A.rows(), B.cols());
  for (Index j = 0; j < B.cols(); ++j) {
    for (Index i = 0; i < A.rows(); ++i) {
      double s = 0.0;
      for (Index l = 0; l < A.cols(); ++l) s += A(i, l) * B(l, j);
      C(i, j) = s;
    }
  }
  return C;
}

}  // namespace

std::vector<CheckResult> run_checks(const VerifyOptions& opts) {
  std::vector<CheckResult> results;
  const auto seed = [&](std::string_view tag) { return derive_seed(opts.master_seed, tag); };

  {
    Rng rng(seed("vs-kdpp"));
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      const auto sh = shape_for(rng, {4, 5, 6, 7}, 3, {3, 4});
      const DenseMatrix B = gaussian_matrix(sh.m, std::max(sh.k, sh.n), rng);
      const auto vs = oracle::enumerate_volume_probs(B, sh.k);
      const auto dpp = oracle::enumerate_kdpp_probs(B * B.transpose(), sh.k);
      oracle::for_each_subset(sh.m, sh.k, [&](const Subset& s) {
        worst = std::max(worst, std::abs(vs.prob(s) - dpp.prob(s)));
      });
    }
    results.push_back(make("volume sampling equals k-DPP on the Gram matrix", worst <= 1e-12, "max |dp| = " + sci(worst)));
  }
  {
    Rng rng(seed("right-invariance"));
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      const auto sh = shape_for(rng, {4, 5, 6, 7}, 3, {1});
      const DenseMatrix X = gaussian_matrix(sh.m, sh.k, rng);
      const auto a = oracle::enumerate_volume_probs(X, sh.k);
      const auto b = oracle::enumerate_volume_probs(orth(X), sh.k);
      oracle::for_each_subset(sh.m, sh.k, [&](const Subset& s) { worst = std::max(worst, std::abs(a.prob(s) - b.prob(s))); });
    }
    results.push_back(make("volume sampling is right-invariant", worst <= 1e-10, "max |dp| = " + sci(worst)));
  }
  {
    Rng rng(seed("type1-identity"));
    double worst = 0.0;
    double worst_unbiased = 0.0;
    for (int t = 0; t < 20; ++t) {
      const auto sh = shape_for(rng, {6, 7, 8}, 3, {3, 5});
      const DenseMatrix Q = orth(gaussian_matrix(sh.m, sh.k, rng));
      const DenseMatrix A = gaussian_matrix(sh.m, sh.n, rng);
      const auto pair = oracle::expected_type1_error(A, Q);
      worst = std::max(worst, std::abs(pair.lhs - pair.rhs) / pair.rhs);
      const DenseMatrix target = Q.transpose() * A;
      worst_unbiased = std::max(worst_unbiased, (oracle::expected_type1_coefficients(A, Q) - target).norm() / target.norm());
    }
    results.push_back(make("E||A - A1||^2 = (k+1)||(I-QQ^T)A||^2", worst <= 1e-10, "max rel err = " + sci(worst)));
    results.push_back(make("E Q(S,:)^{-1} A(S,:) = Q^T A", worst_unbiased <= 1e-10, "max rel err = " + sci(worst_unbiased)));
  }
  {
    Rng rng(seed("active-regression"));
    double worst_beta = 0.0;
    double worst_err = 0.0;
    for (int t = 0; t < 20; ++t) {
      const auto sh = shape_for(rng, {4, 5, 6, 7}, 3, {1});
      const DenseMatrix X = gaussian_matrix(sh.m, sh.k, rng);
      const Vector y = gaussian_matrix(sh.m, 1, rng).col(0);
      const auto rep = oracle::check_active_regression(X, y);
      worst_beta = std::max(worst_beta, (rep.expected_beta - rep.true_beta).norm() / rep.true_beta.norm());
      worst_err = std::max(worst_err, std::abs(rep.lhs_err - rep.rhs_err) / rep.rhs_err);
    }
    results.push_back(make("volume-sampled regression is unbiased", worst_beta <= 1e-10, "max rel err = " + sci(worst_beta)));
    results.push_back(make("E||X b_S - y||^2 = (k+1) min_b ||X b - y||^2", worst_err <= 1e-10, "max rel err = " + sci(worst_err)));
  }
  {
    bool ok = true;
    for (Index k = 1; k <= 8; ++k) ok = ok && oracle::check_optimality(k);
    results.push_back(make("(k+1) factor is attained, k = 1..8", ok, ok ? "all subsets cost (k+1)^2" : "mismatch"));
  }
  {
    Rng rng(seed("sampler-distribution"));
    const DenseMatrix Q = orth(gaussian_matrix(6, 2, rng));
    const auto exact = oracle::enumerate_volume_probs(Q, 2);
    Rng rej_rng(seed("sampler-rejection"));
    Rng seq_rng(seed("sampler-sequential"));
    const auto rej = sample_rejection(Q, opts.samples, rej_rng, opts.acceptance_slack);
    const auto seq = sample_sequential(Q, opts.samples, seq_rng);
    const auto rej_freq = oracle::empirical(rej);
    const auto seq_freq = oracle::empirical(seq);
    const double tv_rej = oracle::total_variation(exact, rej_freq);
    const double tv_seq = oracle::total_variation(exact, seq_freq);
    oracle::SubsetDistribution seq_dist{6, 2, seq_freq};
    const double tv_cross = oracle::total_variation(seq_dist, rej_freq);
    results.push_back(make("rejection sampler matches VS_2 (TV < 0.01)", tv_rej < 0.01, "TV = " + sci(tv_rej)));
    results.push_back(make("sequential RPQR matches VS_2 (TV < 0.01)", tv_seq < 0.01, "TV = " + sci(tv_seq)));
    results.push_back(make("samplers agree (TV < 0.015)", tv_cross < 0.015, "TV = " + sci(tv_cross)));
    const double p_rej = chi_square_pvalue(exact, rej);
    const double p_seq = chi_square_pvalue(exact, seq);
    results.push_back(make("rejection sampler chi-square (p > 1e-3)", p_rej > 1e-3, "p = " + sci(p_rej)));
    results.push_back(make("sequential RPQR chi-square (p > 1e-3)", p_seq > 1e-3, "p = " + sci(p_seq)));
  }
  {
    Rng rng(seed("multinomial"));
    Vector scores(3);
    scores << 2.0, 1.0, 1.0;
    const Index draws = 100'000;
    const auto picks = leverage_multinomial(scores, draws, rng);
    std::array<double, 3> freq{};
    for (Index p : picks) freq[static_cast<std::size_t>(p)] += 1.0 / static_cast<double>(draws);
    const double dev = std::max({std::abs(freq[0] - 0.5), std::abs(freq[1] - 0.25), std::abs(freq[2] - 0.25)});
    results.push_back(make("leverage multinomial frequencies", dev <= 0.01, "max dev = " + sci(dev)));
  }
  {
    Rng rng(seed("sparsestack"));
    bool ok = true;
    for (int t = 0; t < 20 && ok; ++t) {
      const Index zeta = 1 + uniform_index(rng, 4);
      const Index k = zeta * (1 + uniform_index(rng, 5));
      const Index n = 1 + uniform_index(rng, 40);
      const auto emb = sparsestack_new(n, k, zeta, static_cast<std::uint64_t>(rng()));
      const DenseMatrix omega = materialize(emb);
      const double v = 1.0 / std::sqrt(static_cast<double>(zeta));
      for (Index i = 0; i < n; ++i) {
        for (Index blk = 0; blk < zeta; ++blk) {
          const auto seg = omega.row(i).segment(blk * (k / zeta), k / zeta);
          ok = ok && (seg.array() != 0.0).count() == 1 && std::abs(seg.cwiseAbs().maxCoeff() - v) == 0.0;
        }
        ok = ok && std::abs(omega.row(i).squaredNorm() - 1.0) <= 1e-15;
      }
      const DenseMatrix A = gaussian_matrix(3, n, rng);
      ok = ok && (apply_right(A, emb).array() == naive_product(A, omega).array()).all();
    }
    results.push_back(make("SparseStack structure and implicit product", ok, ok ? "20 embeddings" : "violation"));
  }
  {
    Rng rng(seed("ordering"));
    const DenseMatrix A = bench::gen_kernel(10);
    bool interp_ok = true;
    bool order_ok = true;
    for (int t = 0; t < 10; ++t) {
      ArpConfig cfg;
      cfg.k = 15;
      cfg.seed = static_cast<std::uint64_t>(rng());
      cfg.variant = Variant::Type1;
      const auto type1 = arp_decompose(A, cfg);
      cfg.variant = Variant::Type2;
      const auto type2 = arp_decompose(A, cfg);
      cfg.variant = Variant::OSID;
      const auto osid = arp_decompose(A, cfg);
      order_ok = order_ok && type1.pivots == type2.pivots &&
                 residual_fro(A, type2) <= residual_fro(A, type1) + 1e-12 * A.norm();
      for (const auto* id : {&type1, &type2, &osid}) {
        const DenseMatrix ws = id->W(id->pivots.indices(), Eigen::all);
        interp_ok = interp_ok && (ws - DenseMatrix::Identity(ws.rows(), ws.cols())).norm() <= 1e-10;
      }
    }
    results.push_back(make("projection residual <= Type1 residual", order_ok, "kernel g=10, k=15, 10 seeds"));
    results.push_back(make("W(S,:) = I for every variant", interp_ok, "kernel g=10, k=15, 10 seeds"));
  }
  return results;
}

bool print_report(std::ostream& out, const std::vector<CheckResult>& results) {
  std::size_t width = 0;
  for (const auto& r : results) width = std::max(width, r.name.size());
  bool all = true;
  for (const auto& r : results) {
    out << (r.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(static_cast<int>(width)) << r.name << "  "
        << r.detail << '\n';
    all = all && r.passed;
  }
  std::size_t passed = 0;
  for (const auto& r : results) passed += r.passed ? 1 : 0;
  out << passed << '/' << results.size() << " checks passed\n";
  return all;
}

}  // namespace arpid::verify
