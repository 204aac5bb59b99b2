// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.h"
#include "sparse_polyak/cli/csv.h"
#include "sparse_polyak/core.h"
#include "sparse_polyak/datagen.h"
#include "sparse_polyak/metrics.h"
#include "sparse_polyak/objectives.h"
#include "sparse_polyak/random.h"
#include "sparse_polyak/solver.h"

namespace sp = sparse_polyak;
using sp::DenseMatrix;
using sp::DenseVector;
using sp::Index;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kSeeds = 10;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  if (v.size() % 2 == 1) return v[m];
  if (v[m - 1] == v[m]) return v[m];
  return 0.5 * (v[m - 1] + v[m]);
}

double iters_or_inf(const std::optional<std::size_t>& it) {
  return it ? static_cast<double>(*it) : kInf;
}

std::vector<double> to_std(const DenseVector& v) { return {v.data(), v.data() + v.size()}; }

std::vector<double> row_major(const DenseMatrix& a) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(a.size()));
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) out.push_back(a(i, j));
  }
  return out;
}

// ---------------------------------------------------------------------------
// 1. hard_threshold against exhaustive support enumeration.

Outcome projection_oracle() {
  sp::Rng rng(101);
  int bad = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto d = static_cast<Index>(1 + rng.uniform_below(10));
    const std::size_t s = 1 + rng.uniform_below(std::min<std::uint64_t>(4, d));
    DenseVector x(d);
    for (Index i = 0; i < d; ++i) {
      // Every third vector has small integer entries, so ties are common.
      x[i] = trial % 3 == 0 ? static_cast<double>(static_cast<int>(rng.uniform_below(7)) - 3)
                            : rng.normal();
    }
    const DenseVector v = sp::hard_threshold(x, s);
    const oracle::BestSparse best = oracle::best_sparse_approximation(to_std(x), s, 1e-12);

    oracle::KahanSum dist;
    for (Index i = 0; i < d; ++i) dist.add((x[i] - v[i]) * (x[i] - v[i]));
    std::vector<std::size_t> kept;
    for (Index i = 0; i < d; ++i) {
      if (v[i] != 0.0) kept.push_back(static_cast<std::size_t>(i));
    }
    // Zero entries of x may sit on the chosen support; complete it from the
    // argmin set before comparing.
    bool member = false;
    for (const auto& set : best.argmin) {
      bool covers = true;
      for (std::size_t k : kept) covers = covers && std::count(set.begin(), set.end(), k);
      bool copied = true;
      for (std::size_t k : set) copied = copied && v[static_cast<Index>(k)] == x[static_cast<Index>(k)];
      member = member || (covers && copied);
    }
    if (!member || dist.value() > best.min_dist_sq + 1e-12 || kept.size() > s) ++bad;
  }
  return {bad == 0, std::to_string(200 - bad) + "/200 vectors attain the exhaustive minimum"};
}

// ---------------------------------------------------------------------------
// 2. Eckart-Young against a Jacobi SVD.

Outcome eckart_young() {
  sp::Rng rng(202);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto rows = static_cast<Index>(2 + rng.uniform_below(9));
    const auto cols = static_cast<Index>(2 + rng.uniform_below(9));
    const auto s = static_cast<Index>(
        1 + rng.uniform_below(std::min<std::uint64_t>(3, std::min(rows, cols) - 1)));
    DenseMatrix a(rows, cols);
    for (Index i = 0; i < rows; ++i) {
      for (Index j = 0; j < cols; ++j) a(i, j) = rng.normal();
    }
    const DenseMatrix p = sp::rank_project(a, s);
    oracle::KahanSum resid;
    for (Index i = 0; i < rows; ++i) {
      for (Index j = 0; j < cols; ++j) resid.add((a(i, j) - p(i, j)) * (a(i, j) - p(i, j)));
    }
    const std::vector<double> sv = oracle::jacobi_singular_values(
        row_major(a), static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
    oracle::KahanSum tail;
    for (std::size_t i = static_cast<std::size_t>(s); i < sv.size(); ++i) tail.add(sv[i] * sv[i]);
    worst = std::max(worst, std::abs(resid.value() - tail.value()) / tail.value());
  }
  return {worst <= 1e-8, "max relative deviation " + fmt("%.2e", worst) + " (tolerance 1e-8)"};
}

// ---------------------------------------------------------------------------
// 3. Analytic gradients against central differences.

Outcome gradient_check() {
  sp::Rng rng(303);
  double worst = 0.0;
  for (int kind = 0; kind < 3; ++kind) {
    for (int point = 0; point < 20; ++point) {
      Index d = static_cast<Index>(2 + rng.uniform_below(24));
      Index rows = d, cols = 1;
      if (kind == 2) {
        rows = static_cast<Index>(2 + rng.uniform_below(4));
        cols = static_cast<Index>(2 + rng.uniform_below(4));
        d = rows * cols;
      }
      const auto n = static_cast<Index>(5 + rng.uniform_below(30));
      DenseMatrix x(n, d);
      for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < d; ++j) x(i, j) = rng.normal();
      }
      DenseVector y(n);
      for (Index i = 0; i < n; ++i) {
        y[i] = kind == 1 ? static_cast<double>(rng.uniform_below(2)) : rng.normal();
      }
      DenseVector theta(d);
      for (Index j = 0; j < d; ++j) theta[j] = 0.5 * rng.normal();

      const std::vector<double> xs = row_major(x), ys = to_std(y);
      const auto nn = static_cast<std::size_t>(n), dd = static_cast<std::size_t>(d);
      std::function<double(const std::vector<double>&)> f;
      std::optional<sp::ProblemInstance> p;
      if (kind == 0) {
        p = sp::ProblemInstance::least_squares(x, y);
        f = [&](const std::vector<double>& t) { return oracle::least_squares_value(xs, nn, dd, ys, t); };
      } else if (kind == 1) {
        p = sp::ProblemInstance::logistic(x, y);
        f = [&](const std::vector<double>& t) { return oracle::logistic_value(xs, nn, dd, ys, t); };
      } else {
        p = sp::ProblemInstance::matrix_regression(x, y, rows, cols);
        f = [&](const std::vector<double>& t) { return oracle::least_squares_value(xs, nn, dd, ys, t); };
      }
      const std::vector<double> fd = oracle::central_difference(f, to_std(theta), 1e-6);
      const DenseVector g = sp::gradient(*p, theta);
      oracle::KahanSum diff, norm;
      for (Index j = 0; j < d; ++j) {
        const double e = fd[static_cast<std::size_t>(j)] - g[j];
        diff.add(e * e);
        norm.add(g[j] * g[j]);
      }
      worst = std::max(worst, std::sqrt(diff.value()) / std::sqrt(norm.value()));
    }
  }
  return {worst < 1e-5, "max relative error " + fmt("%.2e", worst) + " over 60 points (tolerance 1e-5)"};
}

// ---------------------------------------------------------------------------
// Shared experiment pieces.

sp::GenSpec base_spec(Index d, Index s_star, sp::ModelKind model, double noise,
                      std::uint64_t seed) {
  sp::GenSpec spec;
  spec.d = d;
  spec.s_star = s_star;
  spec.alpha = 5.0;
  spec.omega = 0.5;
  spec.noise_var = noise;
  spec.model = model;
  spec.seed = seed;
  return spec;
}

sp::RunTrace run_fixed(const sp::GeneratedInstance& inst, const sp::GenSpec& spec, std::size_t s,
                       std::size_t iters) {
  sp::SolverConfig cfg;
  cfg.s = s;
  cfg.max_iters = iters;
  cfg.step_rule = sp::StepRule::fixed(sp::theory_bounds(spec, s).fixed_step);
  return sp::run_iht(inst.problem, DenseVector::Zero(inst.problem.dim()), cfg,
                     inst.truth.theta_star);
}

sp::RunTrace run_polyak(const sp::GeneratedInstance& inst, const sp::StepRule& rule,
                        std::size_t s, std::size_t iters, double tol_f = 0.0) {
  sp::SolverConfig cfg;
  cfg.s = s;
  cfg.max_iters = iters;
  cfg.f_hat = inst.truth.f_star;
  cfg.tol_f = tol_f;
  cfg.step_rule = rule;
  return sp::run_iht(inst.problem, DenseVector::Zero(inst.problem.dim()), cfg,
                     inst.truth.theta_star);
}

// ---------------------------------------------------------------------------
// 4. Fixed step against Sparse Polyak at d = 1000.

constexpr Index kD4 = 1000;
constexpr Index kSStar4 = 60;
constexpr std::size_t kS4 = 140;
constexpr std::size_t kLongRun4 = 800;
constexpr std::size_t kPolyakIters4 = 400;

struct Fig2Seed {
  double threshold = 0.0;
  double fixed_iters = kInf;
  double sp_iters = kInf;
  std::string csv;
};

Fig2Seed fig2_seed(sp::ModelKind model, std::uint64_t seed) {
  const sp::GenSpec spec = base_spec(kD4, kSStar4, model, 0.25, seed);
  const sp::GeneratedInstance inst = sp::generate(spec, kS4);
  const sp::RunTrace fixed = run_fixed(inst, spec, kS4, kLongRun4);
  Fig2Seed out;
  out.threshold = sp::long_run_threshold(fixed.records.back().f_value, inst.truth.f_star);
  const sp::RunTrace polyak =
      run_polyak(inst, sp::StepRule::sparse_polyak(), kS4, kPolyakIters4, out.threshold);
  out.fixed_iters = iters_or_inf(sp::iters_to_threshold(fixed, out.threshold, inst.truth.f_star));
  out.sp_iters = iters_or_inf(sp::iters_to_threshold(polyak, out.threshold, inst.truth.f_star));

  std::ostringstream csv;
  const sp::cli::TruthRef truth{&inst.truth.theta_star, &inst.truth.support_star};
  sp::cli::write_trace_header(csv, true);
  sp::cli::write_trace_rows(csv, "fixed", seed, fixed, truth);
  sp::cli::write_trace_rows(csv, "sparse_polyak", seed, polyak, truth);
  out.csv = csv.str();
  return out;
}

struct Fig2Result {
  std::vector<Fig2Seed> linear, logistic;
};

Fig2Result fig2_runs() {
  Fig2Result r;
  for (int k = 0; k < kSeeds; ++k) {
    r.linear.push_back(fig2_seed(sp::ModelKind::kLeastSquares, 4000 + k));
    r.logistic.push_back(fig2_seed(sp::ModelKind::kLogistic, 4000 + k));
  }
  return r;
}

Outcome fixed_vs_adaptive(const Fig2Result& r) {
  auto medians = [](const std::vector<Fig2Seed>& v) {
    std::vector<double> f, s;
    for (const Fig2Seed& x : v) {
      f.push_back(x.fixed_iters);
      s.push_back(x.sp_iters);
    }
    return std::pair{median(f), median(s)};
  };
  const auto [lin_fixed, lin_sp] = medians(r.linear);
  const auto [log_fixed, log_sp] = medians(r.logistic);
  const bool pass = lin_sp <= 1.5 * lin_fixed && log_sp <= log_fixed && std::isfinite(lin_sp) &&
                    std::isfinite(log_sp);
  return {pass, "median iterations linear SP " + fmt("%g", lin_sp) + " vs fixed " +
                    fmt("%g", lin_fixed) + " (<= 1.5x), logistic SP " + fmt("%g", log_sp) +
                    " vs fixed " + fmt("%g", log_fixed) + " (<= 1x)"};
}

// ---------------------------------------------------------------------------
// 5 and 6. Dimension sweep.

constexpr Index kSStar5 = 6;
constexpr std::size_t kS5 = 14;
constexpr std::size_t kLongRun5 = 600;
constexpr std::size_t kPolyakIters5 = 3000;
const std::vector<Index> kSweep = {500, 1000, 2000};

struct SweepPoint {
  Index d = 0;
  Index n = 0;
  double sp_median = kInf;
  double cp_median = kInf;
  double err_median = 0.0;
};

std::vector<SweepPoint> sweep_runs() {
  std::vector<SweepPoint> points;
  for (Index d : kSweep) {
    std::vector<double> sp_iters, cp_iters, errs;
    SweepPoint pt;
    pt.d = d;
    for (int k = 0; k < kSeeds; ++k) {
      const sp::GenSpec spec =
          base_spec(d, kSStar5, sp::ModelKind::kLeastSquares, 0.25, 5000 + k);
      const sp::GeneratedInstance inst = sp::generate(spec, kS5);
      pt.n = inst.problem.samples();
      const sp::RunTrace fixed = run_fixed(inst, spec, kS5, kLongRun5);
      const double thr = sp::long_run_threshold(fixed.records.back().f_value, inst.truth.f_star);
      const sp::RunTrace sparse =
          run_polyak(inst, sp::StepRule::sparse_polyak(), kS5, kPolyakIters5);
      const sp::RunTrace classical =
          run_polyak(inst, sp::StepRule::classical_polyak(), kS5, kPolyakIters5, thr);
      sp_iters.push_back(iters_or_inf(sp::iters_to_threshold(sparse, thr, inst.truth.f_star)));
      cp_iters.push_back(iters_or_inf(sp::iters_to_threshold(classical, thr, inst.truth.f_star)));
      errs.push_back(sp::estimation_error(sparse.final_theta, inst.truth.theta_star));
    }
    pt.sp_median = median(sp_iters);
    pt.cp_median = median(cp_iters);
    pt.err_median = median(errs);
    points.push_back(pt);
  }
  return points;
}

Outcome rate_invariance(const std::vector<SweepPoint>& pts) {
  const SweepPoint& first = pts.front();
  const SweepPoint& last = pts.back();
  bool sp_flat = std::isfinite(first.sp_median);
  std::string detail = "SP medians";
  for (const SweepPoint& p : pts) {
    const double ratio = p.sp_median / first.sp_median;
    sp_flat = sp_flat && ratio >= 0.75 && ratio <= 1.33;
    detail += " " + fmt("%g", p.sp_median);
  }
  detail += ", CP medians";
  for (const SweepPoint& p : pts) detail += " " + fmt("%g", p.cp_median);
  const bool cp_grows = last.cp_median >= 1.5 * first.cp_median;
  const bool cp_slower = last.cp_median >= 2.0 * last.sp_median;
  return {sp_flat && cp_grows && cp_slower,
          detail + " (SP ratio to smallest d in [0.75, 1.33]: " + (sp_flat ? "yes" : "no") +
              ", CP +50% over d: " + (cp_grows ? "yes" : "no") +
              ", CP >= 2x SP at largest d: " + (cp_slower ? "yes" : "no") + ")"};
}

Outcome precision_scaling(const std::vector<SweepPoint>& pts) {
  double lo = kInf, hi = 0.0;
  std::string detail = "median err / (s log d / n):";
  for (const SweepPoint& p : pts) {
    const double rate =
        static_cast<double>(kS5) * std::log(static_cast<double>(p.d)) / static_cast<double>(p.n);
    const double ratio = p.err_median / rate;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    detail += " " + fmt("%.4g", ratio);
  }
  return {hi <= 3.0 * lo, detail + " (max/min " + fmt("%.3g", hi / lo) + " <= 3)"};
}

// ---------------------------------------------------------------------------
// 7. Support recovery on noiseless data.

constexpr std::size_t kIters7 = 250;

Outcome support_recovery() {
  int ok = 0;
  std::string notes;
  for (int k = 0; k < kSeeds; ++k) {
    const sp::GenSpec spec =
        base_spec(kD4, kSStar4, sp::ModelKind::kLeastSquares, 0.0, 7000 + k);
    const sp::GeneratedInstance inst = sp::generate(spec, kS4);
    const sp::RunTrace trace = run_polyak(inst, sp::StepRule::sparse_polyak(), kS4, kIters7);
    const auto& recs = trace.records;
    std::optional<std::size_t> first;
    for (std::size_t t = 0; t < recs.size(); ++t) {
      if (recs[t].f_value - inst.truth.f_star < 1e-8) {
        first = t;
        break;
      }
    }
    bool good = first.has_value() && recs.back().t == kIters7;
    for (std::size_t t = first.value_or(recs.size()); good && t < recs.size(); ++t) {
      good = recs[t].support.includes(inst.truth.support_star);
      if (t > *first) good = good && *recs[t].error_to_ref <= *recs[t - 1].error_to_ref + 1e-12;
    }
    ok += good;
    if (!good) notes += " seed " + std::to_string(spec.seed) + " failed;";
  }
  return {ok == kSeeds, std::to_string(ok) + "/10 seeds keep S* and a non-increasing error" + notes};
}

// ---------------------------------------------------------------------------
// 8. Adaptive lower bound against the oracle run.

constexpr std::size_t kInnerT8 = 200;
constexpr std::size_t kOuterK8 = 5;

Outcome adaptive_parity() {
  int gap_ok = 0, mono_ok = 0;
  std::vector<double> gaps_ad, gaps_1;
  for (int k = 0; k < kSeeds; ++k) {
    const sp::GenSpec spec =
        base_spec(kD4, kSStar4, sp::ModelKind::kLeastSquares, 0.25, 4000 + k);
    const sp::GeneratedInstance inst = sp::generate(spec, kS4);
    const double f_star = inst.truth.f_star;

    sp::AdaptiveConfig acfg;
    acfg.f_tilde_1 = 0.0;
    acfg.inner_T = kInnerT8;
    acfg.outer_K = kOuterK8;
    acfg.s = kS4;
    const sp::AdaptiveResult ad =
        sp::run_adaptive(inst.problem, DenseVector::Zero(inst.problem.dim()), acfg);
    const sp::RunTrace alg1 = run_polyak(inst, sp::StepRule::sparse_polyak(), kS4,
                                         kOuterK8 * (kInnerT8 + 1) - 1);

    const double gap_ad = ad.f_bar - f_star;
    const double gap_1 = sp::value(inst.problem, alg1.final_theta) - f_star;
    gaps_ad.push_back(gap_ad);
    gaps_1.push_back(gap_1);
    gap_ok += gap_ad <= 2.0 * std::abs(gap_1);
    bool mono = true;
    for (std::size_t e = 1; e < ad.epoch_best.size(); ++e) {
      mono = mono && ad.epoch_best[e] <= ad.epoch_best[e - 1];
    }
    mono_ok += mono;
  }
  return {gap_ok == kSeeds && mono_ok == kSeeds,
          "f - f* median adaptive " + fmt("%.3g", median(gaps_ad)) + " (max " +
              fmt("%.3g", *std::max_element(gaps_ad.begin(), gaps_ad.end())) + "), oracle " +
              fmt("%.3g", median(gaps_1)) + "; adaptive <= 2 |oracle| on " +
              std::to_string(gap_ok) + "/10, monotone epochs on " + std::to_string(mono_ok) +
              "/10"};
}

// ---------------------------------------------------------------------------
// 9. 2s-thresholded denominator on the logistic instances of (4).

Outcome glm_two_s(const Fig2Result& r) {
  std::vector<double> two_s, base;
  for (int k = 0; k < kSeeds; ++k) {
    const sp::GenSpec spec = base_spec(kD4, kSStar4, sp::ModelKind::kLogistic, 0.25, 4000 + k);
    const sp::GeneratedInstance inst = sp::generate(spec, kS4);
    const double thr = r.logistic[static_cast<std::size_t>(k)].threshold;
    const sp::RunTrace trace =
        run_polyak(inst, sp::StepRule::sparse_polyak_2s(), kS4, kPolyakIters4, thr);
    two_s.push_back(iters_or_inf(sp::iters_to_threshold(trace, thr, inst.truth.f_star)));
    base.push_back(r.logistic[static_cast<std::size_t>(k)].sp_iters);
  }
  const double m2 = median(two_s), m1 = median(base);
  const bool all_reach =
      std::all_of(two_s.begin(), two_s.end(), [](double v) { return std::isfinite(v); });
  return {all_reach && m2 <= 2.0 * m1,
          "median iterations 2s " + fmt("%g", m2) + " vs s " + fmt("%g", m1) +
              " (<= 2x), all seeds reach the threshold: " + (all_reach ? "yes" : "no")};
}

// ---------------------------------------------------------------------------
// 10. Repeat (4) and compare trace CSVs byte for byte.

Outcome determinism(const Fig2Result& first) {
  const Fig2Result again = fig2_runs();
  int same = 0;
  for (int k = 0; k < kSeeds; ++k) {
    same += first.linear[static_cast<std::size_t>(k)].csv == again.linear[static_cast<std::size_t>(k)].csv;
    same += first.logistic[static_cast<std::size_t>(k)].csv ==
            again.logistic[static_cast<std::size_t>(k)].csv;
  }
  return {same == 2 * kSeeds, std::to_string(same) + "/20 trace CSVs identical"};
}

// ---------------------------------------------------------------------------

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

bool report(int id, const char* name, double budget_s, const Outcome& o, double seconds) {
  const bool in_time = seconds < budget_s;
  const bool pass = o.pass && in_time;
  std::printf("[%s] %2d %s: %s; %.1fs (budget %.0fs)\n", pass ? "PASS" : "FAIL", id, name,
              o.detail.c_str(), seconds, budget_s);
  std::fflush(stdout);
  return pass;
}

}  // namespace

int main() {
  bool all = true;
  {
    Timer t;
    const Outcome o = projection_oracle();
    all &= report(1, "projection oracle equivalence", 1, o, t.seconds());
  }
  {
    Timer t;
    const Outcome o = eckart_young();
    all &= report(2, "Eckart-Young", 1, o, t.seconds());
  }
  {
    Timer t;
    const Outcome o = gradient_check();
    all &= report(3, "gradient correctness", 1, o, t.seconds());
  }
  Timer t4;
  const Fig2Result fig2 = fig2_runs();
  all &= report(4, "fixed vs sparse Polyak", 120, fixed_vs_adaptive(fig2), t4.seconds());
  {
    Timer t;
    const std::vector<SweepPoint> pts = sweep_runs();
    const double secs = t.seconds();
    all &= report(5, "rate invariance", 300, rate_invariance(pts), secs);
    all &= report(6, "statistical precision scaling", 300, precision_scaling(pts), secs);
  }
  {
    Timer t;
    const Outcome o = support_recovery();
    all &= report(7, "support recovery", 60, o, t.seconds());
  }
  {
    Timer t;
    const Outcome o = adaptive_parity();
    all &= report(8, "adaptive lower bound parity", 120, o, t.seconds());
  }
  {
    Timer t;
    const Outcome o = glm_two_s(fig2);
    all &= report(9, "2s variant on logistic", 60, o, t.seconds());
  }
  {
    Timer t;
    const Outcome o = determinism(fig2);
    all &= report(10, "determinism", 60, o, t.seconds());
  }
  std::printf("%s\n", all ? "all acceptance criteria passed" : "some acceptance criteria FAILED");
  return all ? 0 : 1;
}
