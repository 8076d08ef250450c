#pragma once

// Scoring benchmarks and judging metrics: Spearman rank correlation between
// diversity scores and ground-truth diversity ranks, aggregated over seeds,
// plus pairwise win-rate comparison of two systems.

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mads/benchmark.hpp"
#include "mads/error.hpp"
#include "mads/metrics.hpp"
#include "mads/parallel.hpp"
#include "mads/projection.hpp"
#include "mads/stats.hpp"
#include "mads/store.hpp"

namespace mads {

struct spearman_result {
  double rho = 0.0;
  bool degenerate = false;  // one side constant; rho reported as 0
};

// Pearson correlation of average ranks. Ties get average ranks; a constant
// side yields rho = 0 with the degenerate flag set rather than an error
// (collapsed models legitimately produce constant scores).
inline spearman_result spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) {
    fail(errc::length_mismatch, std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  }
  if (x.size() < 2) fail(errc::too_few_points, "need >= 2 points");
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  const std::size_t n = x.size();
  const double mx = mean_of(rx);
  const double my = mean_of(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return {0.0, true};
  double rho = sxy / std::sqrt(sxx * syy);
  rho = std::min(std::max(rho, -1.0), 1.0);
  return {rho, false};
}

// ---------------------------------------------------------------------------
// Score tables

struct score_table {
  metric_kind metric = metric_kind::vendi_score;
  std::vector<double> level_ranks;          // ground-truth rank per level
  std::vector<std::vector<double>> scores;  // [level][set]
};

// Scores every set of the benchmark: resolve ids in the store, optionally
// project through a head (inference mode), score with the chosen metric.
inline score_table score_benchmark(const facet_benchmark& bench, const embedding_store& store,
                                   const projection_head* head, metric_kind metric) {
  if (head != nullptr && head->input_dim() != store.dim()) {
    fail(errc::dim_mismatch, "head expects input_dim " + std::to_string(head->input_dim()) +
                                 ", store has dim " + std::to_string(store.dim()));
  }
  score_table table;
  table.metric = metric;
  table.scores.resize(bench.levels.size());
  for (const auto& level : bench.levels) table.level_ranks.push_back(level.rank);

  // Pre-resolve ids so missing embeddings surface before any heavy work.
  for (const auto& level : bench.levels) {
    for (const auto& set : level.sets) {
      for (const auto& id : set) (void)store.row_of(id);
    }
  }

  std::size_t sets_per_level = 0;
  for (const auto& level : bench.levels) {
    sets_per_level = std::max(sets_per_level, level.sets.size());
  }
  for (std::size_t l = 0; l < bench.levels.size(); ++l) {
    table.scores[l].assign(bench.levels[l].sets.size(), 0.0);
  }

  const std::size_t cells = bench.levels.size() * sets_per_level;
  std::vector<std::optional<error>> failures(cells);
  parallel_for(cells, [&](std::size_t cell) {
    const std::size_t l = cell / sets_per_level;
    const std::size_t s = cell % sets_per_level;
    if (s >= bench.levels[l].sets.size()) return;
    try {
      const auto& ids = bench.levels[l].sets[s];
      embedding_set set(head != nullptr ? head->output_dim() : store.dim());
      for (const auto& id : ids) {
        std::vector<double> v = store.row_f64(store.row_of(id));
        if (head != nullptr) v = head_forward(*head, v);
        set.add(v, id);
      }
      table.scores[l][s] = score_set(set, metric).value;
    } catch (const error& e) {
      failures[cell] = e;
    }
  });
  for (const auto& f : failures) {
    if (f) throw *f;
  }
  return table;
}

// ---------------------------------------------------------------------------
// Correlation reports

struct correlation_report {
  std::string facet_label;
  metric_kind metric = metric_kind::vendi_score;
  std::vector<double> per_seed_rho;
  double mean_rho = 0.0;
  double std_error = 0.0;  // sample standard deviation of per-seed rho
  std::size_t n_seeds = 0;
  double seed_averaged_rho = 0.0;  // correlation of per-level mean scores
  std::size_t degenerate_seeds = 0;
  std::optional<double> pooled_rho;  // all level x set points in one correlation
};

// Pairs set index s across levels to form one correlation per seed, then
// aggregates. Requires a complete rectangular table.
inline correlation_report evaluate(const facet_benchmark& bench, const score_table& table,
                                   bool include_pooled = false) {
  const std::size_t levels = bench.levels.size();
  if (levels < 2) fail(errc::too_few_points, "need >= 2 levels");
  if (table.scores.size() != levels) {
    fail(errc::incomplete_table, "table has " + std::to_string(table.scores.size()) +
                                     " levels, benchmark has " + std::to_string(levels));
  }
  const std::size_t seeds = bench.sets_per_level;
  for (std::size_t l = 0; l < levels; ++l) {
    if (table.scores[l].size() != seeds) {
      fail(errc::incomplete_table, "level " + std::to_string(l) + " has " +
                                       std::to_string(table.scores[l].size()) + " sets, expected " +
                                       std::to_string(seeds));
    }
  }
  if (seeds == 0) fail(errc::incomplete_table, "no sets");

  std::vector<double> ranks;
  for (const auto& level : bench.levels) ranks.push_back(level.rank);

  correlation_report report;
  report.facet_label = bench.series;
  report.metric = table.metric;
  report.n_seeds = seeds;
  report.per_seed_rho.reserve(seeds);

  std::vector<double> column(levels);
  for (std::size_t s = 0; s < seeds; ++s) {
    for (std::size_t l = 0; l < levels; ++l) column[l] = table.scores[l][s];
    const spearman_result r = spearman_rho(ranks, column);
    if (r.degenerate) ++report.degenerate_seeds;
    report.per_seed_rho.push_back(r.rho);
  }
  report.mean_rho = mean_of(report.per_seed_rho);
  report.std_error = sample_stddev(report.per_seed_rho);

  // Seed-averaged variant: one mean score per level, a single correlation.
  std::vector<double> level_means(levels);
  for (std::size_t l = 0; l < levels; ++l) level_means[l] = mean_of(table.scores[l]);
  report.seed_averaged_rho = spearman_rho(ranks, level_means).rho;

  if (include_pooled) {
    std::vector<double> all_ranks, all_scores;
    all_ranks.reserve(levels * seeds);
    for (std::size_t l = 0; l < levels; ++l) {
      for (std::size_t s = 0; s < seeds; ++s) {
        all_ranks.push_back(ranks[l]);
        all_scores.push_back(table.scores[l][s]);
      }
    }
    report.pooled_rho = spearman_rho(all_ranks, all_scores).rho;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Win rates

struct win_rate_report {
  std::string facet_label;
  std::string metric_label;
  std::size_t wins_a = 0;
  std::size_t wins_b = 0;
  std::size_t ties = 0;
  std::size_t total = 0;
  double proportion = 0.0;  // wins_a / total
};

// Proportion of indices where a strictly beats b; ties counted separately.
// With paired=false both lists are compared through their order statistics.
inline win_rate_report win_rate(const std::vector<double>& scores_a,
                                const std::vector<double>& scores_b, bool paired = true) {
  if (scores_a.size() != scores_b.size()) {
    fail(errc::length_mismatch,
         std::to_string(scores_a.size()) + " vs " + std::to_string(scores_b.size()));
  }
  if (scores_a.empty()) fail(errc::too_few_points, "empty score lists");
  std::vector<double> a = scores_a;
  std::vector<double> b = scores_b;
  if (!paired) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
  }
  win_rate_report report;
  report.total = a.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) {
      ++report.wins_a;
    } else if (b[i] > a[i]) {
      ++report.wins_b;
    } else {
      ++report.ties;
    }
  }
  report.proportion = static_cast<double>(report.wins_a) / static_cast<double>(report.total);
  return report;
}

// ---------------------------------------------------------------------------
// Serialization: CSV score tables, JSON reports. Floats print with 17
// significant digits so files round-trip exactly.

namespace detail {

inline std::string f17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline std::string score_table_csv(const score_table& table) {
  std::ostringstream out;
  out << "level_rank,set_index,score\n";
  for (std::size_t l = 0; l < table.scores.size(); ++l) {
    for (std::size_t s = 0; s < table.scores[l].size(); ++s) {
      out << detail::f17(table.level_ranks[l]) << ',' << s << ','
          << detail::f17(table.scores[l][s]) << '\n';
    }
  }
  return out.str();
}

struct csv_score_row {
  double level_rank;
  std::size_t set_index;
  double score;
};

inline std::vector<csv_score_row> score_table_from_csv(std::istream& in,
                                                       const std::string& source) {
  std::vector<csv_score_row> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("level_rank", 0) == 0) continue;
    csv_score_row row;
    char* end = nullptr;
    const char* p = line.c_str();
    row.level_rank = std::strtod(p, &end);
    if (end == p || *end != ',') {
      fail(errc::parse_error, source + ":" + std::to_string(line_no) + ": bad level_rank");
    }
    p = end + 1;
    row.set_index = static_cast<std::size_t>(std::strtoull(p, &end, 10));
    if (end == p || *end != ',') {
      fail(errc::parse_error, source + ":" + std::to_string(line_no) + ": bad set_index");
    }
    p = end + 1;
    row.score = std::strtod(p, &end);
    if (end == p) {
      fail(errc::parse_error, source + ":" + std::to_string(line_no) + ": bad score");
    }
    rows.push_back(row);
  }
  return rows;
}

inline std::string correlation_report_json(const correlation_report& report) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"facet\": \"" << report.facet_label << "\",\n";
  out << "  \"metric\": \"" << metric_name(report.metric) << "\",\n";
  out << "  \"n_seeds\": " << report.n_seeds << ",\n";
  out << "  \"mean_rho\": " << detail::f17(report.mean_rho) << ",\n";
  out << "  \"std_error\": " << detail::f17(report.std_error) << ",\n";
  out << "  \"seed_averaged_rho\": " << detail::f17(report.seed_averaged_rho) << ",\n";
  out << "  \"degenerate_seeds\": " << report.degenerate_seeds << ",\n";
  if (report.pooled_rho) {
    out << "  \"pooled_rho\": " << detail::f17(*report.pooled_rho) << ",\n";
  }
  out << "  \"per_seed_rho\": [";
  for (std::size_t i = 0; i < report.per_seed_rho.size(); ++i) {
    if (i > 0) out << ", ";
    out << detail::f17(report.per_seed_rho[i]);
  }
  out << "]\n}\n";
  return out.str();
}

inline std::string win_rate_report_json(const win_rate_report& report) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"facet\": \"" << report.facet_label << "\",\n";
  out << "  \"metric\": \"" << report.metric_label << "\",\n";
  out << "  \"wins_a\": " << report.wins_a << ",\n";
  out << "  \"wins_b\": " << report.wins_b << ",\n";
  out << "  \"ties\": " << report.ties << ",\n";
  out << "  \"total\": " << report.total << ",\n";
  out << "  \"proportion\": " << detail::f17(report.proportion) << "\n";
  out << "}\n";
  return out.str();
}

}  // namespace mads
