// Acceptance suite: runs every release criterion end to end and prints one
// pass/fail line per criterion. Exit code is the number of failed criteria.
//
// The suite is synthetic-oracle based: every expected value is produced by an
// independent construction (closed forms, brute-force recomputation, finite
// differences, controlled generative geometry), never by the code under test.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "../helpers.hpp"
#include "mads/mads.hpp"

using namespace mads;

namespace {

int g_failures = 0;

struct check_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& what) {
  if (!cond) throw check_failure(what);
}

void run_criterion(int id, const std::string& name, const std::function<std::string()>& body) {
  try {
    const std::string detail = body();
    std::printf("[PASS] criterion %2d: %s%s%s\n", id, name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
  } catch (const std::exception& e) {
    ++g_failures;
    std::printf("[FAIL] criterion %2d: %s -- %s\n", id, name.c_str(), e.what());
  }
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

embedding_set orthonormal_set(std::size_t n) {
  embedding_set s(n);
  std::vector<double> v(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = 1.0;
    s.add(v);
    v[i] = 0.0;
  }
  return s;
}

std::filesystem::path work_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "mads_acceptance";
  std::filesystem::create_directories(dir);
  return dir;
}

// Synthetic voice world: unit-sphere speaker centers, within-cluster gaussian
// noise, one utterance pool + embedding store.
struct synthetic_voice_world {
  utterance_pool pool;
  embedding_store store;
};

synthetic_voice_world make_voice_world(std::size_t speakers, std::size_t per_speaker,
                                       std::size_t dim, double sigma, std::uint64_t seed,
                                       bool mixed_gender) {
  rng gen(derive_stream(seed, 0xabcd));
  synthetic_voice_world world;
  world.store = embedding_store(static_cast<std::uint32_t>(dim));
  for (std::size_t spk = 0; spk < speakers; ++spk) {
    std::vector<double> center(dim);
    double norm = 0.0;
    for (auto& x : center) {
      x = gen.gaussian();
      norm += x * x;
    }
    norm = std::sqrt(norm);
    for (auto& x : center) x /= norm;
    const bool female = !mixed_gender || spk < speakers / 2;
    for (std::size_t u = 0; u < per_speaker; ++u) {
      utterance_record rec;
      rec.speaker_id = (female ? "f" : "m") + std::to_string(spk);
      rec.utterance_id = rec.speaker_id + "_u" + std::to_string(u);
      rec.speaker_gender = female ? gender::female : gender::male;
      world.pool.push_back(rec);
      std::vector<double> v(dim);
      for (std::size_t k = 0; k < dim; ++k) v[k] = center[k] + sigma * gen.gaussian();
      world.store.add(rec.utterance_id, v);
    }
  }
  return world;
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

// --------------------------------------------------------------------------
// 1. Vendi exactness and runtime

std::string criterion_vendi_exactness() {
  for (std::size_t n : {2ul, 4ul, 16ul, 64ul, 256ul}) {
    const double vs = vendi_score(orthonormal_set(n)).value;
    require(std::fabs(vs - static_cast<double>(n)) <= 1e-9,
            "orthonormal n=" + std::to_string(n) + " gave " + std::to_string(vs));

    embedding_set same(8);
    for (std::size_t i = 0; i < n; ++i) same.add(std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8});
    const double one = vendi_score(same).value;
    require(std::fabs(one - 1.0) <= 1e-12,
            "identical n=" + std::to_string(n) + " gave " + std::to_string(one));
  }
  const auto big = orthonormal_set(512);
  const auto t0 = std::chrono::steady_clock::now();
  const double vs512 = vendi_score(big).value;
  const double elapsed = seconds_since(t0);
  require(std::fabs(vs512 - 512.0) <= 1e-9, "n=512 value off");
  require(elapsed < 1.0, fmt("n=512 took %.3fs (budget 1s)", elapsed));
  return fmt("n=512 in %.3fs", elapsed);
}

// --------------------------------------------------------------------------
// 2 & 3. Duplication laws on 200 random sets

std::vector<embedding_set> random_sets_for_duplication() {
  test_util::fixture_rng rng(20240515);
  std::vector<embedding_set> sets;
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 2 + rng.below(63);   // <= 64
    const std::size_t dim = 2 + rng.below(31); // <= 32
    sets.push_back(test_util::random_set(rng, n, dim));
  }
  return sets;
}

std::string criterion_vendi_duplication() {
  double worst = 0.0;
  for (const auto& set : random_sets_for_duplication()) {
    const double vs = vendi_score(set).value;
    const double vs2 = vendi_score(test_util::duplicated(set)).value;
    worst = std::max(worst, std::fabs(vs2 - vs));
    require(std::fabs(vs2 - vs) <= 1e-6, fmt("duplication drift %.3g", std::fabs(vs2 - vs)));
  }
  return fmt("max |VS(2S) - VS(S)| = %.3g over 200 sets", worst);
}

std::string criterion_dissimilarity_duplication() {
  double worst = 0.0;
  for (const auto& set : random_sets_for_duplication()) {
    const double n = static_cast<double>(set.size());
    const double d = mean_pairwise_dissimilarity(set).value;
    const double d2 = mean_pairwise_dissimilarity(test_util::duplicated(set)).value;
    const double law = d * 2.0 * (n - 1.0) / (2.0 * n - 1.0);
    worst = std::max(worst, std::fabs(d2 - law));
    require(std::fabs(d2 - law) <= 1e-9, fmt("law violated by %.3g", std::fabs(d2 - law)));
  }
  return fmt("max law residual = %.3g over 200 sets", worst);
}

// --------------------------------------------------------------------------
// 4. Eigen solver: reconstruction and trace

std::string criterion_eigen_solver() {
  test_util::fixture_rng rng(424242);
  double worst_recon = 0.0;
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 2 + rng.below(63);
    matrix b = test_util::random_matrix(rng, n, n);
    matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += b(k, i) * b(k, j);
        a(i, j) = s;
        a(j, i) = s;
      }
    }
    const auto eig = sym_eigen(a, true);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double r = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          r += eig.vectors(i, k) * eig.values[k] * eig.vectors(j, k);
        }
        num += (r - a(i, j)) * (r - a(i, j));
        den += a(i, j) * a(i, j);
      }
    }
    const double rel = std::sqrt(num / den);
    worst_recon = std::max(worst_recon, rel);
    require(rel <= 1e-8, fmt("reconstruction error %.3g at n=%g", rel, double(n)));
  }

  double worst_trace = 0.0;
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 2 + rng.below(63);
    const auto set = test_util::random_set(rng, n, 2 + rng.below(30));
    const auto spec = eigen_spectrum(cosine_similarity_matrix(set), n);
    worst_trace = std::max(worst_trace, std::fabs(spec.sum() - 1.0));
    require(std::fabs(spec.sum() - 1.0) <= 1e-9, "normalized trace drifted");
  }
  return fmt("max recon %.3g, max trace drift %.3g", worst_recon, worst_trace);
}

// --------------------------------------------------------------------------
// 5. Gradient checks against central finite differences

double fd_worst_error(const std::function<double(const matrix&)>& f, const matrix& at,
                      const matrix& analytic, double eps) {
  double worst = 0.0;
  for (std::size_t i = 0; i < at.rows(); ++i) {
    for (std::size_t j = 0; j < at.cols(); ++j) {
      matrix plus = at, minus = at;
      plus(i, j) += eps;
      minus(i, j) -= eps;
      const double fd = (f(plus) - f(minus)) / (2.0 * eps);
      const double a = analytic(i, j);
      worst = std::max(worst, std::fabs(a - fd) / std::max({std::fabs(a), std::fabs(fd), 1e-6}));
    }
  }
  return worst;
}

bool triplet_batch_clean(const matrix& emb, const std::vector<std::string>& gids, double margin) {
  matrix ne(emb.rows(), emb.cols());
  for (std::size_t i = 0; i < emb.rows(); ++i) {
    const double n = std::sqrt(norm2(emb.row(i)));
    for (std::size_t j = 0; j < emb.cols(); ++j) ne(i, j) = emb(i, j) / n;
  }
  const auto d2 = [&](std::size_t x, std::size_t y) {
    return 2.0 - 2.0 * dot(ne.row(x), ne.row(y));
  };
  const double gap = 2e-3;
  for (std::size_t a = 0; a < emb.rows(); ++a) {
    for (std::size_t p = 0; p < emb.rows(); ++p) {
      if (a == p || gids[a] != gids[p]) continue;
      const double dap = d2(a, p);
      std::vector<double> negs;
      for (std::size_t n = 0; n < emb.rows(); ++n) {
        if (gids[n] != gids[a]) negs.push_back(d2(a, n));
      }
      if (negs.empty()) return false;
      double best = std::numeric_limits<double>::infinity(), far = -1.0;
      for (double dn : negs) {
        if (std::fabs(dn - dap) < gap) return false;
        if (dn > dap) best = std::min(best, dn);
        far = std::max(far, dn);
      }
      for (std::size_t x = 0; x < negs.size(); ++x) {
        for (std::size_t y = x + 1; y < negs.size(); ++y) {
          if (std::fabs(negs[x] - negs[y]) < gap) return false;
        }
      }
      const double chosen = std::isinf(best) ? far : best;
      if (std::fabs(dap - chosen + margin) < gap) return false;
    }
  }
  return true;
}

std::string criterion_gradients() {
  const double eps = 1e-5;
  test_util::fixture_rng rng(171717);
  double worst = 0.0;

  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t b = 3 + rng.below(4);
    const std::size_t d = 2 + rng.below(5);
    const matrix anchors = test_util::random_matrix(rng, b, d);
    const matrix positives = test_util::random_matrix(rng, b, d);
    const double temp = 0.2 + rng.uniform(0.0, 0.8);
    const auto res = standard_contrastive_loss(anchors, positives, temp);
    worst = std::max(worst, fd_worst_error(
        [&](const matrix& m) { return standard_contrastive_loss(m, positives, temp).loss; },
        anchors, res.grad_anchors, eps));
    worst = std::max(worst, fd_worst_error(
        [&](const matrix& m) { return standard_contrastive_loss(anchors, m, temp).loss; },
        positives, res.grad_positives, eps));
    require(worst < 1e-4, fmt("contrastive rel error %.3g", worst));
  }

  const std::vector<std::string> gids = {"a", "a", "b", "b", "c", "c"};
  int accepted = 0;
  while (accepted < 20) {
    const matrix emb = test_util::random_matrix(rng, 6, 3 + rng.below(3));
    if (!triplet_batch_clean(emb, gids, 0.2)) continue;
    ++accepted;
    const auto res = semi_hard_triplet_loss(emb, gids, 0.2);
    const double err = fd_worst_error(
        [&](const matrix& m) { return semi_hard_triplet_loss(m, gids, 0.2).loss; }, emb, res.grad,
        eps);
    worst = std::max(worst, err);
    require(err < 1e-4, fmt("triplet rel error %.3g", err));
  }
  return fmt("max relative error %.3g over 20+20 batches", worst);
}

// --------------------------------------------------------------------------
// 6. Spearman against the brute-force oracle

std::string criterion_spearman_oracle() {
  std::size_t checked = 0;
  for (std::size_t n = 2; n <= 6; ++n) {
    std::vector<double> perm(n);
    std::iota(perm.begin(), perm.end(), 1.0);
    std::vector<double> base = perm;
    do {
      const double lib = spearman_rho(perm, base).rho;
      const double oracle = test_util::brute_force_spearman(perm, base);
      require(std::fabs(lib - oracle) <= 1e-12, "permutation disagreement");
      ++checked;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }

  test_util::fixture_rng rng(606060);
  std::size_t tied_checked = 0;
  while (tied_checked < 1000) {
    const std::size_t n = 2 + rng.below(19);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = static_cast<double>(rng.below(4));
      y[i] = static_cast<double>(rng.below(4));
    }
    const bool x_const = std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
    const bool y_const = std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; });
    if (x_const || y_const) continue;
    const double lib = spearman_rho(x, y).rho;
    const double oracle = test_util::brute_force_spearman(x, y);
    require(std::fabs(lib - oracle) <= 1e-12, "tied-vector disagreement");
    ++tied_checked;
  }
  return fmt("%g permutations + %g tied vectors agree", double(checked), double(tied_checked));
}

// --------------------------------------------------------------------------
// 7. End-to-end single-facet voice check

std::string criterion_single_facet() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto world = make_voice_world(40, 60, 24, 0.05, 7001, false);
  const auto bench =
      sample_voice_series(world.pool, {2, 4, 8, 16, 32}, 100, gender::female, 100, 7001);
  const auto table = score_benchmark(bench, world.store, nullptr, metric_kind::vendi_score);
  const auto report = evaluate(bench, table);
  const double elapsed = seconds_since(t0);
  require(report.n_seeds == 100, "expected 100 seeds");
  require(report.mean_rho >= 0.95, fmt("mean rho %.4f < 0.95", report.mean_rho));
  require(elapsed < 120.0, fmt("took %.1fs (budget 120s)", elapsed));
  return fmt("mean rho %.4f (sd %.4f) in %.1fs", report.mean_rho, report.std_error, elapsed);
}

// --------------------------------------------------------------------------
// 8. Entangled-facet check: gender head vs raw embeddings on an opposed series

std::string criterion_entangled() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t seed = 8001;
  rng gen(derive_stream(seed, 0xfeed));
  const std::size_t vdim = 12, gdim = 4, dim = vdim + gdim;

  // gender anchors and speaker centers; embedding = [voice | gender] + noise
  std::vector<std::vector<double>> anchor(2, std::vector<double>(gdim));
  for (auto& a : anchor) {
    double n = 0.0;
    for (auto& x : a) {
      x = gen.gaussian();
      n += x * x;
    }
    n = std::sqrt(n);
    for (auto& x : a) x /= n;
  }
  utterance_pool pool;
  embedding_store store(dim);
  for (int spk = 0; spk < 64; ++spk) {
    const bool female = spk < 32;
    std::vector<double> center(vdim);
    double n = 0.0;
    for (auto& x : center) {
      x = gen.gaussian();
      n += x * x;
    }
    n = std::sqrt(n);
    for (auto& x : center) x /= n;
    for (int u = 0; u < 60; ++u) {
      utterance_record rec;
      rec.speaker_id = (female ? "f" : "m") + std::to_string(spk);
      rec.utterance_id = rec.speaker_id + "_u" + std::to_string(u);
      rec.speaker_gender = female ? gender::female : gender::male;
      pool.push_back(rec);
      std::vector<double> v(dim);
      for (std::size_t k = 0; k < vdim; ++k) v[k] = center[k] + 0.05 * gen.gaussian();
      for (std::size_t k = 0; k < gdim; ++k) {
        v[vdim + k] = 0.35 * anchor[female ? 0 : 1][k] + 0.05 * gen.gaussian();
      }
      store.add(rec.utterance_id, v);
    }
  }

  const auto bench = sample_opposed_series(pool, opposed_schedule::gender_vs_voice, 100, 100, seed);

  // raw embeddings track the voice confound: negative correlation
  const auto raw_table = score_benchmark(bench, store, nullptr, metric_kind::vendi_score);
  const auto raw_report = evaluate(bench, raw_table);
  require(raw_report.mean_rho <= -0.3, fmt("raw mean rho %.4f > -0.3", raw_report.mean_rho));

  // gender head trained on held-in labels: positive correlation
  std::vector<labeled_feature> features;
  for (const auto& rec : pool) {
    labeled_feature lf;
    lf.vector = store.row_f64(store.row_of(rec.utterance_id));
    lf.group_id = gender_name(*rec.speaker_gender);
    features.push_back(std::move(lf));
  }
  projection_head tmpl(facet::gender, dim, {16, 8});
  training_config cfg = default_training_config(facet::gender);
  cfg.loss = loss_kind::standard_contrastive;
  cfg.steps = 1500;  // budget allows up to 5000
  cfg.batch_size = 64;
  cfg.learning_rate = 1e-3;
  cfg.seed = seed;
  const auto trained = train_head(features, tmpl, cfg);

  const auto head_table =
      score_benchmark(bench, store, &trained.head, metric_kind::mean_pairwise_dissimilarity);
  const auto head_report = evaluate(bench, head_table);
  const double elapsed = seconds_since(t0);
  require(head_report.mean_rho >= 0.8, fmt("head mean rho %.4f < 0.8", head_report.mean_rho));
  require(elapsed < 600.0, fmt("took %.1fs (budget 600s)", elapsed));
  return fmt("head rho %+.4f vs raw rho %+.4f in %.1fs", head_report.mean_rho,
             raw_report.mean_rho, elapsed);
}

// --------------------------------------------------------------------------
// 9. CLI benchmark determinism across runs and thread counts

std::string criterion_cli_determinism() {
  const auto dir = work_dir();
  const auto world = make_voice_world(40, 45, 4, 0.1, 9001, false);
  const auto pool_path = (dir / "pool.jsonl").string();
  pool_write(pool_path, world.pool);

  const std::string cli = MADSPEECH_CLI_PATH;
  const auto run = [&](const std::string& out, int threads) {
    std::ostringstream cmd;
    cmd << "MADS_THREADS=" << threads << " '" << cli << "' benchmark --pool '" << pool_path
        << "' --facet voice --levels 5,10,15,20,25,33 --set-size 200 --sets-per-level 100"
        << " --seed 17 --gender F --out '" << out << "'";
    require(std::system(cmd.str().c_str()) == 0, "CLI benchmark run failed");
    std::ifstream in(out, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  const std::string a = run((dir / "m_a.json").string(), 1);
  const std::string b = run((dir / "m_b.json").string(), 1);
  const std::string c = run((dir / "m_c.json").string(), 8);
  require(!a.empty(), "empty manifest");
  require(a == b, "two runs differ at thread count 1");
  require(a == c, "thread counts 1 and 8 differ");
  return fmt("%.0f-byte manifests byte-identical across runs and threads", double(a.size()));
}

// --------------------------------------------------------------------------
// 10. Null behavior on independent-noise scores

std::string criterion_null_behavior() {
  facet_benchmark bench;
  bench.series = "null";
  bench.sets_per_level = 100;
  for (std::size_t l = 0; l < 6; ++l) {
    diversity_level level;
    level.rank = static_cast<double>(l + 1);
    level.sets.assign(100, {});
    bench.levels.push_back(level);
  }
  test_util::fixture_rng rng(101010);
  score_table table;
  table.metric = metric_kind::vendi_score;
  table.level_ranks = {1, 2, 3, 4, 5, 6};
  table.scores.assign(6, std::vector<double>(100));
  for (auto& level : table.scores) {
    for (auto& s : level) s = rng.uniform(0.0, 1.0);
  }
  const auto report = evaluate(bench, table);
  const double sem = report.std_error / std::sqrt(static_cast<double>(report.n_seeds));
  require(std::fabs(report.mean_rho) <= 3.0 * sem,
          fmt("mean rho %.4f exceeds 3 SEM = %.4f", report.mean_rho, 3.0 * sem));
  return fmt("mean rho %+.4f within 3 SEM = %.4f", report.mean_rho, 3.0 * sem);
}

// --------------------------------------------------------------------------
// 11. Win-rate conservation

std::string criterion_win_rate_conservation() {
  test_util::fixture_rng rng(111111);
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 1 + rng.below(50);
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = static_cast<double>(rng.below(8));
      b[i] = static_cast<double>(rng.below(8));
    }
    const auto ab = win_rate(a, b);
    const auto ba = win_rate(b, a);
    require(ab.wins_a + ba.wins_a + ab.ties == n, "count conservation violated");
    require(ab.ties == ba.ties, "tie counts asymmetric");
    require(ab.proportion == static_cast<double>(ab.wins_a) / static_cast<double>(n),
            "proportion != wins/total");
  }
  return "wins(a,b) + wins(b,a) + ties == total on 1000 random pairs";
}

// --------------------------------------------------------------------------
// 12. Container integrity under fault injection

std::string criterion_container_integrity() {
  test_util::fixture_rng rng(121212);
  const auto dir = work_dir();
  std::size_t detected = 0;

  for (int trial = 0; trial < 10000; ++trial) {
    const std::uint32_t dim = 2 + static_cast<std::uint32_t>(rng.below(7));
    const std::size_t count = 1 + rng.below(16);
    embedding_store store(dim);
    std::vector<double> v(dim);
    for (std::size_t i = 0; i < count; ++i) {
      for (auto& x : v) x = rng.gaussian();
      store.add("r" + std::to_string(trial) + "_" + std::to_string(i), v);
    }
    const auto bytes = store_to_bytes(store);

    // clean round trip must be bit-exact
    const auto loaded = store_from_bytes(bytes);
    require(store_to_bytes(loaded) == bytes, "round trip not bit-exact");

    // inject one fault: truncation or a single bit flip
    std::vector<std::uint8_t> corrupt;
    if (rng.below(2) == 0) {
      corrupt.assign(bytes.begin(), bytes.begin() + rng.below(bytes.size()));
    } else {
      corrupt = bytes;
      corrupt[rng.below(corrupt.size())] ^= static_cast<std::uint8_t>(1u << rng.below(8));
    }
    bool caught = false;
    try {
      const auto bad = store_from_bytes(corrupt, "<corrupt>", true);
      // a parse that survives must not silently return different content
      require(store_to_bytes(bad) == bytes, "silent wrong read");
    } catch (const error&) {
      caught = true;
    }
    require(caught, "corruption not detected");
    ++detected;
  }

  // on-disk round trips through the atomic writer
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint32_t dim = 2 + static_cast<std::uint32_t>(rng.below(7));
    embedding_store store(dim);
    std::vector<double> v(dim);
    for (std::size_t i = 0; i < 1 + rng.below(8); ++i) {
      for (auto& x : v) x = rng.gaussian();
      store.add("d" + std::to_string(i), v);
    }
    const auto path = (dir / "rt.mads").string();
    store_write(path, store);
    require(store_to_bytes(store_read(path)) == store_to_bytes(store), "disk round trip");
  }
  return fmt("%g corruptions detected, 0 silent wrong reads", double(detected));
}

}  // namespace

int main() {
  std::printf("madspeech acceptance suite\n");
  run_criterion(1, "vendi exactness and n=512 runtime", criterion_vendi_exactness);
  run_criterion(2, "vendi duplication invariance (200 sets)", criterion_vendi_duplication);
  run_criterion(3, "mean-dissimilarity duplication law (200 sets)",
                criterion_dissimilarity_duplication);
  run_criterion(4, "eigen solver reconstruction and trace", criterion_eigen_solver);
  run_criterion(5, "loss gradients vs central finite differences", criterion_gradients);
  run_criterion(6, "spearman oracle equivalence", criterion_spearman_oracle);
  run_criterion(7, "single-facet voice series, vendi, 100 seeds", criterion_single_facet);
  run_criterion(8, "entangled gender-vs-voice sign flip", criterion_entangled);
  run_criterion(9, "CLI benchmark determinism across threads", criterion_cli_determinism);
  run_criterion(10, "null scores give near-zero correlation", criterion_null_behavior);
  run_criterion(11, "win-rate conservation", criterion_win_rate_conservation);
  run_criterion(12, "container integrity under fault injection", criterion_container_integrity);

  if (g_failures == 0) {
    std::printf("all 12 criteria passed\n");
  } else {
    std::printf("%d criteria FAILED\n", g_failures);
  }
  return g_failures;
}
