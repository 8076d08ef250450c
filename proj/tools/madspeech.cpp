// madspeech: acoustic-diversity scoring of speech embedding sets.
//
// Subcommands: score, benchmark, train-head, evaluate, compare, pool.
// Exit codes: 0 success, 1 usage error, 2 data error. Diagnostics go to
// stderr; results go to files or stdout. MADS_THREADS bounds parallelism.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mads/mads.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

void emit(const std::string& out_path, const std::string& payload) {
  if (out_path.empty() || out_path == "-") {
    std::cout << payload;
    std::cout.flush();
  } else {
    mads::write_file_atomic(out_path, payload);
  }
}

std::string f17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

mads::metric_kind metric_from_flag(const std::string& name) {
  if (name == "vendi") return mads::metric_kind::vendi_score;
  if (name == "cosine") return mads::metric_kind::mean_pairwise_dissimilarity;
  mads::fail(mads::errc::parse_error, "unknown metric '" + name + "'");
}

// ---------------------------------------------------------------------------
// score

struct score_args {
  std::string embeddings;
  std::string head;
  std::string metric = "vendi";
  std::string sets;
  std::string out;
};

int run_score(const score_args& args) {
  const auto store = mads::store_read(args.embeddings);
  std::optional<mads::projection_head> head;
  if (!args.head.empty()) head = mads::head_load_file(args.head);

  const auto project = [&](const std::vector<std::string>& ids) {
    mads::embedding_set set(head ? head->output_dim() : store.dim());
    for (const auto& id : ids) {
      std::vector<double> v = store.row_f64(store.row_of(id));
      if (head) v = mads::head_forward(*head, v);
      set.add(v, id);
    }
    return set;
  };
  const auto metric = metric_from_flag(args.metric);

  std::ostringstream out;
  if (args.sets.empty()) {
    const auto score = mads::score_set(project(store.ids()), metric);
    out << "{\n  \"metric\": \"" << mads::metric_name(metric) << "\",\n"
        << "  \"n\": " << store.count() << ",\n"
        << "  \"dim\": " << store.dim() << ",\n"
        << "  \"value\": " << f17(score.value) << "\n}\n";
  } else {
    const auto bench = mads::benchmark_read(args.sets);
    out << "{\n  \"metric\": \"" << mads::metric_name(metric) << "\",\n  \"sets\": [\n";
    bool first = true;
    for (const auto& level : bench.levels) {
      for (std::size_t s = 0; s < level.sets.size(); ++s) {
        const auto score = mads::score_set(project(level.sets[s]), metric);
        if (!first) out << ",\n";
        first = false;
        out << "    {\"level_rank\": " << f17(level.rank) << ", \"set_index\": " << s
            << ", \"value\": " << f17(score.value) << "}";
      }
    }
    out << "\n  ]\n}\n";
  }
  emit(args.out, out.str());
  return 0;
}

// ---------------------------------------------------------------------------
// benchmark

struct benchmark_args {
  std::string pool;
  std::string facet;
  std::vector<std::size_t> levels;
  std::vector<double> ratios;
  std::size_t level_count = 5;
  std::size_t set_size = 0;  // 0 = facet default
  std::size_t sets_per_level = 100;
  std::uint64_t seed = 0;
  std::string gender_filter = "F";
  std::string policy = "equal";
  std::size_t speakers_per_set = 10;
  std::string out;
};

int run_benchmark(const benchmark_args& args) {
  const auto pool = mads::pool_read(args.pool);
  mads::speaker_policy policy;
  policy.kind = args.policy == "opposed" ? mads::speaker_policy_kind::opposed
                                         : mads::speaker_policy_kind::equal_count;
  policy.equal_count = args.speakers_per_set;

  mads::facet_benchmark bench;
  if (args.facet == "voice") {
    std::vector<std::size_t> counts = args.levels;
    if (counts.empty()) counts = {5, 10, 15, 20, 25, 33};
    const auto g = args.gender_filter == "M" ? mads::gender::male : mads::gender::female;
    bench = mads::sample_voice_series(pool, counts, args.set_size ? args.set_size : 200, g,
                                      args.sets_per_level, args.seed);
  } else if (args.facet == "gender" || args.facet == "gender-vs-voice") {
    std::vector<double> ratios = args.ratios;
    if (ratios.empty()) {
      for (int i = 0; i <= 10; ++i) ratios.push_back(0.1 * i);
    }
    if (args.facet == "gender-vs-voice") policy.kind = mads::speaker_policy_kind::opposed;
    bench = mads::sample_gender_series(pool, ratios, args.set_size ? args.set_size : 100, policy,
                                       args.sets_per_level, args.seed);
  } else if (args.facet == "emotion" || args.facet == "accent") {
    bench = mads::sample_entropy_series(pool, mads::facet_from_name(args.facet), args.level_count,
                                        args.set_size ? args.set_size : 100, policy,
                                        args.sets_per_level, args.seed);
  } else if (args.facet == "emotion-vs-voice" || args.facet == "accent-vs-voice") {
    const auto schedule = args.facet == "emotion-vs-voice"
                              ? mads::opposed_schedule::emotion_vs_voice
                              : mads::opposed_schedule::accent_vs_voice;
    bench = mads::sample_opposed_series(pool, schedule, args.set_size ? args.set_size : 100,
                                        args.sets_per_level, args.seed, args.level_count);
  } else if (args.facet == "noise") {
    std::vector<std::size_t> counts = args.levels;
    if (counts.empty()) counts = {1, 5, 10, 25, 50, 100};
    bench = mads::sample_noise_series(pool, counts, args.set_size ? args.set_size : 100,
                                      args.sets_per_level, args.seed);
  } else {
    mads::fail(mads::errc::parse_error, "unknown facet '" + args.facet + "'");
  }

  emit(args.out, mads::benchmark_to_json(bench).dump(1) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// train-head

struct train_args {
  std::string embeddings;
  std::string metadata;
  std::string facet;
  std::string config;
  std::string out;
  std::string log;
  std::vector<std::size_t> head_dims;
  double dropout = mads::kDefaultDropoutRate;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> steps;
};

int run_train(const train_args& args) {
  const auto store = mads::store_read(args.embeddings);
  const auto pool = mads::pool_read(args.metadata);
  const auto f = mads::facet_from_name(args.facet);

  mads::training_config cfg = mads::default_training_config(f);
  if (!args.config.empty()) {
    std::ifstream in(args.config);
    if (!in) mads::fail(mads::errc::io_failure, "cannot open " + args.config);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) mads::fail(mads::errc::parse_error, args.config + ": invalid JSON");
    cfg = mads::training_config_from_json(j, cfg);
  }
  if (args.seed) cfg.seed = *args.seed;
  if (args.steps) cfg.steps = *args.steps;

  std::vector<mads::labeled_feature> features;
  std::size_t unlabeled = 0;
  for (const auto& rec : pool) {
    const auto label = mads::facet_label(rec, f);
    if (!label) {
      ++unlabeled;
      continue;
    }
    mads::labeled_feature lf;
    lf.vector = store.row_f64(store.row_of(rec.utterance_id));
    lf.group_id = *label;
    features.push_back(std::move(lf));
  }
  if (unlabeled > 0) {
    std::cerr << "train-head: skipped " << unlabeled << " records without a " << args.facet
              << " label\n";
  }

  const auto dims = args.head_dims.empty() ? mads::default_head_dims(f) : args.head_dims;
  mads::projection_head tmpl(f, store.dim(), dims, args.dropout);

  const auto result = mads::train_head(features, tmpl, cfg);
  mads::head_save_file(result.head, args.out);
  if (!args.log.empty()) mads::write_file_atomic(args.log, mads::train_log_csv(result.log));
  std::cerr << "train-head: " << result.log.size() << " steps";
  if (!result.log.empty()) std::cerr << ", final loss " << result.log.back().train_loss;
  std::cerr << ", head written to " << args.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate

struct evaluate_args {
  std::string benchmark;
  std::string embeddings;
  std::string head;
  std::string metric = "vendi";
  bool pooled = false;
  std::string report;
  std::string table;
};

int run_evaluate(const evaluate_args& args) {
  const auto bench = mads::benchmark_read(args.benchmark);
  const auto store = mads::store_read(args.embeddings);
  std::optional<mads::projection_head> head;
  if (!args.head.empty()) head = mads::head_load_file(args.head);

  const auto table = mads::score_benchmark(bench, store, head ? &*head : nullptr,
                                           metric_from_flag(args.metric));
  const auto report = mads::evaluate(bench, table, args.pooled);

  if (!args.table.empty()) mads::write_file_atomic(args.table, mads::score_table_csv(table));
  emit(args.report, mads::correlation_report_json(report));
  return 0;
}

// ---------------------------------------------------------------------------
// compare

struct compare_args {
  std::string a;
  std::string b;
  bool unpaired = false;
  std::string facet_label;
  std::string metric_label;
  std::string out;
};

int run_compare(const compare_args& args) {
  const auto load = [](const std::string& path) {
    std::ifstream in(path);
    if (!in) mads::fail(mads::errc::io_failure, "cannot open " + path);
    auto rows = mads::score_table_from_csv(in, path);
    std::sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) {
      if (x.level_rank != y.level_rank) return x.level_rank < y.level_rank;
      return x.set_index < y.set_index;
    });
    return rows;
  };
  const auto rows_a = load(args.a);
  const auto rows_b = load(args.b);
  if (rows_a.size() != rows_b.size()) {
    mads::fail(mads::errc::length_mismatch, args.a + " has " + std::to_string(rows_a.size()) +
                                                " rows, " + args.b + " has " +
                                                std::to_string(rows_b.size()));
  }
  std::vector<double> a, b;
  for (std::size_t i = 0; i < rows_a.size(); ++i) {
    if (!args.unpaired && (rows_a[i].level_rank != rows_b[i].level_rank ||
                           rows_a[i].set_index != rows_b[i].set_index)) {
      mads::fail(mads::errc::incomplete_table,
                 "row keys diverge at entry " + std::to_string(i) + "; use --unpaired to compare "
                 "order statistics instead");
    }
    a.push_back(rows_a[i].score);
    b.push_back(rows_b[i].score);
  }
  auto report = mads::win_rate(a, b, !args.unpaired);
  report.facet_label = args.facet_label;
  report.metric_label = args.metric_label;
  emit(args.out, mads::win_rate_report_json(report));
  return 0;
}

// ---------------------------------------------------------------------------
// pool (frame-level -> utterance-level)

struct pool_args {
  std::string input;
  std::string out;
  std::string separator = "#";
};

int run_pool(const pool_args& args) {
  if (args.separator.size() != 1) {
    mads::fail(mads::errc::parse_error, "--separator must be a single character");
  }
  const auto frames = mads::store_read(args.input);

  // Frames of one utterance share the id prefix before the last separator
  // ("utt42#003"); rows without a separator pass through as one-frame groups.
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < frames.count(); ++i) {
    const std::string& id = frames.ids()[i];
    const auto cut = id.rfind(args.separator[0]);
    const std::string utt = cut == std::string::npos ? id : id.substr(0, cut);
    if (utt.empty()) {
      mads::fail(mads::errc::parse_error, "frame id '" + id + "' has an empty utterance prefix");
    }
    auto [it, inserted] = groups.try_emplace(utt);
    if (inserted) order.push_back(utt);
    it->second.push_back(i);
  }

  mads::embedding_store pooled(frames.dim());
  for (const auto& utt : order) {
    std::vector<std::vector<double>> stack;
    for (std::size_t row : groups.at(utt)) stack.push_back(frames.row_f64(row));
    pooled.add(utt, mads::pool_time_axis(stack));
  }
  mads::store_write(args.out, pooled);
  std::cerr << "pool: " << frames.count() << " frames -> " << pooled.count()
            << " utterances (dim " << frames.dim() << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"madspeech: per-facet acoustic diversity metrics over speech embeddings"};
  app.require_subcommand(1);

  score_args score;
  auto* score_cmd = app.add_subcommand("score", "Score an embedding file with one metric");
  score_cmd->add_option("--embeddings", score.embeddings, "embedding container (.mads)")
      ->required();
  score_cmd->add_option("--head", score.head, "projection head file (.madh)");
  score_cmd->add_option("--metric", score.metric, "vendi | cosine")
      ->check(CLI::IsMember({"vendi", "cosine"}));
  score_cmd->add_option("--sets", score.sets, "benchmark manifest: score each set instead");
  score_cmd->add_option("--out", score.out, "output JSON path (default stdout)");

  benchmark_args bench;
  auto* bench_cmd =
      app.add_subcommand("benchmark", "Build a controlled-diversity benchmark manifest");
  bench_cmd->add_option("--pool", bench.pool, "pool metadata (JSON Lines)")->required();
  bench_cmd
      ->add_option("--facet", bench.facet,
                   "voice | gender | emotion | accent | noise | gender-vs-voice | "
                   "emotion-vs-voice | accent-vs-voice")
      ->required()
      ->check(CLI::IsMember({"voice", "gender", "emotion", "accent", "noise", "gender-vs-voice",
                             "emotion-vs-voice", "accent-vs-voice"}));
  bench_cmd->add_option("--levels", bench.levels, "speaker/noise-class counts per level")
      ->delimiter(',');
  bench_cmd->add_option("--ratios", bench.ratios, "female-voice ratios per level")
      ->delimiter(',');
  bench_cmd->add_option("--level-count", bench.level_count, "entropy levels (emotion/accent)");
  bench_cmd->add_option("--set-size", bench.set_size, "utterances per set (facet default)");
  bench_cmd->add_option("--sets-per-level", bench.sets_per_level, "seeded sets per level");
  bench_cmd->add_option("--seed", bench.seed, "generation seed");
  bench_cmd->add_option("--gender", bench.gender_filter, "voice series gender filter: F | M")
      ->check(CLI::IsMember({"F", "M"}));
  bench_cmd->add_option("--speaker-policy", bench.policy, "equal | opposed")
      ->check(CLI::IsMember({"equal", "opposed"}));
  bench_cmd->add_option("--speakers-per-set", bench.speakers_per_set,
                        "speaker budget under the equal policy (0 = unconstrained)");
  bench_cmd->add_option("--out", bench.out, "manifest path (default stdout)");

  train_args train;
  auto* train_cmd = app.add_subcommand("train-head", "Train a facet projection head");
  train_cmd->add_option("--embeddings", train.embeddings, "embedding container (.mads)")
      ->required();
  train_cmd->add_option("--metadata", train.metadata, "pool metadata (JSON Lines)")->required();
  train_cmd->add_option("--facet", train.facet, "facet the head specializes")
      ->required()
      ->check(CLI::IsMember({"voice", "gender", "emotion", "accent", "noise"}));
  train_cmd->add_option("--config", train.config, "training config JSON");
  train_cmd->add_option("--out", train.out, "head output path (.madh)")->required();
  train_cmd->add_option("--log", train.log, "training log CSV path");
  train_cmd->add_option("--head-dims", train.head_dims, "layer widths (facet default)")
      ->delimiter(',');
  train_cmd->add_option("--dropout", train.dropout, "input dropout rate");
  std::uint64_t seed_opt = 0;
  auto* seed_flag = train_cmd->add_option("--seed", seed_opt, "overrides config seed");
  std::size_t steps_opt = 0;
  auto* steps_flag = train_cmd->add_option("--steps", steps_opt, "overrides config steps");

  evaluate_args eval;
  auto* eval_cmd =
      app.add_subcommand("evaluate", "Score a benchmark and report Spearman correlations");
  eval_cmd->add_option("--benchmark", eval.benchmark, "benchmark manifest")->required();
  eval_cmd->add_option("--embeddings", eval.embeddings, "embedding container (.mads)")
      ->required();
  eval_cmd->add_option("--head", eval.head, "projection head file (.madh)");
  eval_cmd->add_option("--metric", eval.metric, "vendi | cosine")
      ->check(CLI::IsMember({"vendi", "cosine"}));
  eval_cmd->add_flag("--pooled", eval.pooled, "also report the pooled correlation");
  eval_cmd->add_option("--report", eval.report, "report JSON path (default stdout)");
  eval_cmd->add_option("--table", eval.table, "per-set score CSV path");

  compare_args cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "Win rate between two score CSVs");
  cmp_cmd->add_option("--a", cmp.a, "first score CSV")->required();
  cmp_cmd->add_option("--b", cmp.b, "second score CSV")->required();
  cmp_cmd->add_flag("--unpaired", cmp.unpaired, "compare order statistics, not aligned rows");
  cmp_cmd->add_option("--facet", cmp.facet_label, "facet label for the report");
  cmp_cmd->add_option("--metric", cmp.metric_label, "metric label for the report");
  cmp_cmd->add_option("--out", cmp.out, "report JSON path (default stdout)");

  pool_args pool;
  auto* pool_cmd =
      app.add_subcommand("pool", "Average frame-level embeddings into utterance vectors");
  pool_cmd->add_option("--input", pool.input, "frame-level container (.mads)")->required();
  pool_cmd->add_option("--out", pool.out, "utterance-level container path")->required();
  pool_cmd->add_option("--separator", pool.separator, "frame-suffix separator (default '#')");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*score_cmd) return run_score(score);
    if (*bench_cmd) return run_benchmark(bench);
    if (*train_cmd) {
      if (*seed_flag) train.seed = seed_opt;
      if (*steps_flag) train.steps = steps_opt;
      return run_train(train);
    }
    if (*eval_cmd) return run_evaluate(eval);
    if (*cmp_cmd) return run_compare(cmp);
    if (*pool_cmd) return run_pool(pool);
  } catch (const mads::error& e) {
    std::cerr << "madspeech: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "madspeech: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
