// Acceptance harness: one PASS/FAIL line per criterion.
// Usage: manialign_acceptance <manialign cli> <unit test binary> <scratch dir>

#include "manialign/alignment.hpp"
#include "manialign/baselines.hpp"
#include "manialign/eigsolve.hpp"
#include "manialign/graphs.hpp"
#include "manialign/protocol.hpp"
#include "manialign/synth.hpp"
#include "test_util.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace manialign;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// 1. Cholesky reduction against the Jacobi oracle.
void eigensolver_oracle() {
  const auto t0 = Clock::now();
  double worst_rel = 0.0;
  double worst_res = 0.0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Index n = 2 + static_cast<Index>(s % 31);
    const auto a = testutil::random_spd(n, 5000 + s);
    const auto b = testutil::random_spd(n, 6000 + s);
    const double ridge = eigsolve::default_ridge(b);
    const auto fast = eigsolve::solve_gep(a, b, static_cast<std::size_t>(n), ridge);
    const auto ref = eigsolve::solve_gep_oracle(a, b, ridge);
    Matrix bt = b.dense();
    bt.diagonal().array() += ridge;
    const double anorm = a.dense().norm();
    for (Index i = 0; i < n; ++i) {
      worst_rel = std::max(worst_rel, std::abs(fast.eigenvalues(i) - ref.eigenvalues(i)) /
                                          std::abs(ref.eigenvalues(i)));
      const Vector v = fast.eigenvectors.col(i);
      worst_res = std::max(worst_res, (a.dense() * v - fast.eigenvalues(i) * (bt * v)).norm() / anorm);
    }
  }
  const double secs = seconds_since(t0);
  report(1, worst_rel <= 1e-8 && worst_res <= 1e-6 && secs < 5.0,
         fmt("50 SPD pairs, max rel eigenvalue error %.2e (<= 1e-8), max residual/||A||_F %.2e (<= 1e-6), %.2f s (< 5)",
             worst_rel, worst_res, secs));
}

// Sum over ordered pairs of w_ij ||F^T x_i - F^T x_j||^2.
double literal_double_sum(const graphs::SparseSym& w, const Matrix& x, const Matrix& f) {
  const Matrix z = f.transpose() * x;
  double s = 0.0;
  for (std::size_t i = 0; i < w.order(); ++i)
    for (std::size_t j = 0; j < w.order(); ++j) {
      if (i == j) continue;
      const double wij = w.weight(i, j);
      if (wij != 0.0) s += wij * (z.col(static_cast<Index>(i)) - z.col(static_cast<Index>(j))).squaredNorm();
    }
  return s;
}

// 2. Trace forms against the literal double sums. Ordered pairs count each
// edge twice, so the sum equals twice the trace.
void laplacian_identity() {
  std::mt19937_64 rng(77);
  double worst = 0.0;
  for (std::uint64_t t = 0; t < 30; ++t) {
    const std::size_t n1 = 4 + rng() % 12;
    const std::size_t n2 = 4 + rng() % 11;
    const std::size_t n = n1 + n2;
    const Index d1 = 1 + static_cast<Index>(rng() % 4);
    const Index d2 = 1 + static_cast<Index>(rng() % 4);
    const Matrix x1 = testutil::gaussian(static_cast<Index>(n1), d1, 100 + t);
    const Matrix x2 = testutil::gaussian(static_cast<Index>(n2), d2, 200 + t);
    Matrix x = Matrix::Zero(d1 + d2, static_cast<Index>(n));
    x.block(0, 0, d1, static_cast<Index>(n1)) = x1.transpose();
    x.block(d1, static_cast<Index>(n1), d2, static_cast<Index>(n2)) = x2.transpose();
    const Matrix f = testutil::gaussian(d1 + d2, 1 + static_cast<Index>(rng() % 3), 300 + t);
    std::vector<int> labels(n);
    std::vector<std::size_t> dom(n);
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = rng() % 4 == 0 ? graphs::kNoLabel : static_cast<int>(rng() % 3);
      dom[i] = i < n1 ? 0 : 1;
    }
    labels[0] = 0;
    labels[n1] = 1;
    const std::size_t k = 1 + rng() % 3;
    const auto g1 = graphs::knn_graph(x1, k);
    const auto g2 = graphs::knn_graph(x2, k);
    graphs::SparseSym wg(n);
    for (const auto& e : g1.edges()) wg.add(e.i, e.j, e.weight);
    for (const auto& e : g2.edges()) wg.add(e.i + n1, e.j + n1, e.weight);
    const auto lg = graphs::label_graphs(labels, dom);
    const std::pair<const graphs::SparseSym*, SymMatrix> terms[] = {
        {&wg, graphs::assemble_block_geo({g1, g2}, n)},
        {&lg.sim, graphs::laplacian(lg.sim)},
        {&lg.dis, graphs::laplacian(lg.dis)}};
    for (const auto& [w, l] : terms) {
      const double tr = (f.transpose() * x * l.dense() * x.transpose() * f).trace();
      const double lit = literal_double_sum(*w, x, f);
      worst = std::max(worst, std::abs(lit - 2.0 * tr) / std::max(1.0, std::abs(lit)));
    }
  }
  report(2, worst <= 1e-8,
         fmt("30 trials x GEO/SIM/DIS, max |double sum - 2 trace| relative %.2e (<= 1e-8)", worst));
}

std::vector<int> keep_every(const std::vector<int>& y, std::size_t step) {
  std::vector<int> out(y.size(), kUnlabeled);
  for (std::size_t i = 0; i < y.size(); i += step) out[i] = y[i];
  return out;
}

// 3. Primal SSMA and dual linear KEMA on the two-domain multiview data.
void primal_dual_correspondence() {
  auto spec = synth::default_spec(synth::Archetype::MultiviewManifold);
  spec.domains = 2;
  spec.samples_per_domain = 150;
  spec.seed = 3;
  auto out = synth::generate(spec);
  for (auto& d : out.data.domains) d.labels = keep_every(d.labels, 5);
  alignment::FitConfig primal;
  primal.mode = alignment::Mode::PrimalSsma;
  primal.p = 3;
  alignment::FitConfig dual = primal;
  dual.mode = alignment::Mode::DualKema;
  dual.kernels = {kernels::KernelSpec::linear()};
  const auto ms = alignment::fit(out.data, primal);
  const auto mk = alignment::fit(out.data, dual);
  const Matrix zs = alignment::transform_all(ms, out.data).coordinates;
  const Matrix zk = alignment::transform_all(mk, out.data).coordinates;
  const double corr =
      testutil::distance_correlation(testutil::pairwise_distances(zs), testutil::pairwise_distances(zk));
  auto cross = [&](const alignment::AlignmentModel& m) {
    const Matrix r = alignment::transform(m, 0, out.data.domains[0].features).coordinates;
    const Matrix q = alignment::transform(m, 1, out.data.domains[1].features).coordinates;
    return testutil::onenn_accuracy(r, out.truth[0], q, out.truth[1]);
  };
  const double nn_s = cross(ms);
  const double nn_k = cross(mk);
  report(3, corr >= 0.999 && std::abs(nn_s - nn_k) <= 0.02,
         fmt("distance correlation %.6f (>= 0.999), cross-domain 1-NN SSMA %.4f vs KEMA-linear %.4f (|diff| <= 0.02)",
             corr, nn_s, nn_k));
}

// 4. Transfer accuracy on the three-domain multiview data.
void alignment_efficacy() {
  const auto t0 = Clock::now();
  auto spec = synth::default_spec(synth::Archetype::MultiviewManifold);
  spec.seed = 1;
  auto cfg = protocol::default_experiment(synth::Archetype::MultiviewManifold);
  cfg.methods = {protocol::Method::NoAdaptation, protocol::Method::KemaRbf};
  cfg.seed = 1;
  const auto r = protocol::run_experiment(spec, cfg, 10);
  const double secs = seconds_since(t0);
  const double kema = r.get(protocol::Method::KemaRbf).mean_oa;
  const double none = r.get(protocol::Method::NoAdaptation).mean_oa;
  report(4, kema >= 0.90 && kema >= none + 0.15 && secs < 60.0,
         fmt("M = 3, 20/5 labels per class, 10 reps: KEMA-rbf OA %.4f (>= 0.90), no adaptation %.4f (gain >= 0.15), "
             "%.1f s (< 60)",
             kema, none, secs));
}

// 5. Shadow attenuation with gamma distortion.
void nonlinearity_advantage() {
  auto spec = synth::default_spec(synth::Archetype::ShadowAttenuation);
  spec.seed = 1;
  auto cfg = protocol::default_experiment(synth::Archetype::ShadowAttenuation);
  cfg.methods = {protocol::Method::HistogramMatching, protocol::Method::Ssma, protocol::Method::KemaRbf};
  cfg.seed = 1;
  const auto r = protocol::run_experiment(spec, cfg, 10);
  const double kema = r.get(protocol::Method::KemaRbf).mean_oa;
  const double ssma = r.get(protocol::Method::Ssma).mean_oa;
  const double hm = r.get(protocol::Method::HistogramMatching).mean_oa;
  report(5, kema >= ssma + 0.10 && kema >= hm + 0.05,
         fmt("gamma %.1f, 10 seeds: KEMA-rbf %.4f, SSMA %.4f (gap >= 0.10), histogram matching %.4f (gap >= 0.05)",
             spec.gamma, kema, ssma, hm));
}

// 6. Ties-only alignment with no target labels.
void semantic_ties() {
  auto spec = synth::default_spec(synth::Archetype::ColocatedTies);
  spec.seed = 1;
  auto cfg = protocol::default_experiment(synth::Archetype::ColocatedTies);
  cfg.methods = {protocol::Method::Kcca, protocol::Method::KemaRbf, protocol::Method::TargetOracle};
  cfg.seed = 1;
  const auto r = protocol::run_experiment(spec, cfg, 10);
  const double kema = r.get(protocol::Method::KemaRbf).mean_oa;
  const double kcca = r.get(protocol::Method::Kcca).mean_oa;
  const double oracle = r.get(protocol::Method::TargetOracle).mean_oa;
  report(6, kema >= oracle - 0.05 && kema >= kcca,
         fmt("0 target labels, 10 reps: KEMA-rbf %.4f, target-trained %.4f (within 0.05), kCCA %.4f (KEMA >= kCCA)",
             kema, oracle, kcca));
}

// 7. Histogram matching Kolmogorov distance.
void histogram_ks() {
  std::mt19937_64 rng(31);
  std::lognormal_distribution<double> ln(0.0, 0.8);
  std::normal_distribution<double> nd(2.0, 0.5);
  std::vector<double> src(5000), ref(5000);
  for (auto& x : src) x = ln(rng);
  for (auto& x : ref) x = nd(rng);
  bool ok = true;
  std::string detail = "lognormal -> normal, n = 5000:";
  for (std::size_t bins : {64, 256}) {
    const auto t = baselines::match_band(src, ref, bins);
    std::vector<double> m(src.size());
    for (std::size_t i = 0; i < src.size(); ++i) m[i] = t.apply(src[i]);
    const double ks = baselines::ks_distance(m, ref);
    const double bound = 2.0 / static_cast<double>(bins);
    ok = ok && ks <= bound;
    detail += fmt(" bins %.0f KS %.5f (<= %.5f);", static_cast<double>(bins), ks, bound);
  }
  report(7, ok, detail);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_quiet(const std::string& cmd, const fs::path& log) {
  return std::system((cmd + " > \"" + log.string() + "\" 2>&1").c_str());
}

// 8. CLI fit determinism.
void fit_determinism(const std::string& cli, const fs::path& dir) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "run.json");
    cfg << R"({"mode": "kema", "p": 6, "seed": 4})" << "\n";
  }
  const fs::path log = dir / "log.txt";
  const std::string q = "\"" + cli + "\"";
  bool ok = run_quiet(q + " synth --archetype multiview --seed 2 --samples 150 --out \"" + (dir / "data").string() + "\"",
                      log) == 0;
  const std::string fit = q + " fit --config \"" + (dir / "run.json").string() + "\" --manifest \"" +
                          (dir / "data" / "manifest.json").string() + "\" --out ";
  ok = ok && run_quiet(fit + "\"" + (dir / "a.json").string() + "\"", log) == 0;
  ok = ok && run_quiet(fit + "\"" + (dir / "b.json").string() + "\"", log) == 0;
  const std::string a = ok ? slurp(dir / "a.json") : "";
  const std::string b = ok ? slurp(dir / "b.json") : "";
  ok = ok && !a.empty() && a == b;
  report(8, ok, fmt("two fits of the same config and seed: %.0f and %.0f bytes, identical: ", static_cast<double>(a.size()),
                    static_cast<double>(b.size())) + (ok ? "yes" : "no"));
}

// 9. Module property suites (permutation invariance, PSD checks, block
// partition counts, kappa <= OA, monotone Rayleigh ratios, ...).
void property_suites(const std::string& unit, const fs::path& dir) {
  fs::create_directories(dir);
  const fs::path log = dir / "unit.txt";
  const int rc = run_quiet("\"" + unit + "\"", log);
  std::string tail;
  std::ifstream in(log);
  for (std::string line; std::getline(in, line);)
    if (line.find("test cases:") != std::string::npos) tail = line;
  report(9, rc == 0, "unit and property suites: " + (tail.empty() ? std::string("no summary") : tail));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 4) {
    std::fprintf(stderr, "usage: %s <manialign cli> <unit test binary> <scratch dir>\n", argv[0]);
    return 2;
  }
  const std::string cli = argv[1];
  const std::string unit = argv[2];
  const fs::path scratch = argv[3];
  const std::function<void()> steps[] = {eigensolver_oracle,
                                         laplacian_identity,
                                         primal_dual_correspondence,
                                         alignment_efficacy,
                                         nonlinearity_advantage,
                                         semantic_ties,
                                         histogram_ks,
                                         [&] { fit_determinism(cli, scratch / "determinism"); },
                                         [&] { property_suites(unit, scratch); }};
  int id = 1;
  for (const auto& step : steps) {
    try {
      step();
    } catch (const std::exception& e) {
      report(id, false, std::string("exception: ") + e.what());
    }
    ++id;
  }
  std::printf("%d of 9 criteria passed\n", 9 - failures);
  return failures == 0 ? 0 : 1;
}
