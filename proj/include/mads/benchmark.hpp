#pragma once

// Controlled-diversity benchmark construction. Each series fixes one facet's
// ground-truth diversity per level (speaker count, female ratio, class
// entropy, noise-class count) and samples many seeded utterance sets per
// level from a labeled pool. Opposed series additionally push the speaker
// count in the opposite direction to stress facet isolation.
//
// Every set derives its own random stream from (seed, series, level, set),
// so parallel and serial generation produce identical benchmarks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "mads/binio.hpp"
#include "mads/error.hpp"
#include "mads/facet.hpp"
#include "mads/metadata.hpp"
#include "mads/parallel.hpp"
#include "mads/rng.hpp"
#include "mads/stats.hpp"

namespace mads {

// Shannon entropy (natural log) of a discrete distribution given as counts.
inline double class_entropy(const std::vector<std::uint64_t>& counts) {
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) fail(errc::empty_distribution, "entropy of an empty distribution");
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log(p);
  }
  return h;
}

struct level_descriptor {
  std::string kind;  // "speaker_count" | "female_ratio" | "class_entropy" | "noise_class_count"
  double value = 0.0;
};

struct diversity_level {
  double rank = 0.0;  // ground-truth rank; ties carry average ranks
  level_descriptor descriptor;
  std::vector<std::vector<std::string>> sets;
};

struct facet_benchmark {
  facet primary = facet::voice;
  std::string series;  // e.g. "voice", "gender_vs_voice"
  std::uint64_t seed = 0;
  std::size_t set_size = 0;
  std::size_t sets_per_level = 0;
  nlohmann::json parameters;  // full generator parameters, for reproducibility
  std::vector<diversity_level> levels;
};

enum class speaker_policy_kind { equal_count, opposed };

struct speaker_policy {
  speaker_policy_kind kind = speaker_policy_kind::equal_count;
  std::size_t equal_count = 10;  // distinct speakers per set under equal_count
};

constexpr std::size_t kDefaultSetsPerLevel = 100;

namespace detail {

inline std::uint64_t series_tag(const std::string& series) {
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : series) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
  return h;
}

// Spreads `total` units over `bins` as equally as possible: floor for all,
// remainder to the leading bins (callers pass bins in shuffled draw order).
inline std::vector<std::size_t> equal_allocation(std::size_t total, std::size_t bins) {
  std::vector<std::size_t> out(bins, total / bins);
  for (std::size_t i = 0; i < total % bins; ++i) ++out[i];
  return out;
}

// Largest-remainder rounding of quotas[i] = probs[i] * total; ties on the
// fractional part break toward the lower index.
inline std::vector<std::uint64_t> largest_remainder_counts(const std::vector<double>& probs,
                                                           std::size_t total) {
  const std::size_t n = probs.size();
  std::vector<std::uint64_t> counts(n);
  std::vector<std::pair<double, std::size_t>> fractional(n);
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double quota = probs[i] * static_cast<double>(total);
    counts[i] = static_cast<std::uint64_t>(std::floor(quota));
    fractional[i] = {quota - std::floor(quota), i};
    assigned += counts[i];
  }
  std::sort(fractional.begin(), fractional.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++counts[fractional[k % n].second];
  return counts;
}

struct speaker_group {
  std::string speaker;
  std::vector<std::string> utterances;  // pool order
};

// Deterministic speaker grouping (first-appearance order) with an optional
// gender filter and an optional per-record predicate.
template <typename Pred>
inline std::vector<speaker_group> group_by_speaker(const utterance_pool& pool, Pred&& keep) {
  std::vector<speaker_group> groups;
  std::map<std::string, std::size_t> index;
  for (const auto& rec : pool) {
    if (!keep(rec)) continue;
    auto [it, inserted] = index.try_emplace(rec.speaker_id, groups.size());
    if (inserted) groups.push_back({rec.speaker_id, {}});
    groups[it->second].utterances.push_back(rec.utterance_id);
  }
  std::sort(groups.begin(), groups.end(),
            [](const auto& a, const auto& b) { return a.speaker < b.speaker; });
  return groups;
}

inline std::vector<std::string> draw_utterances(const std::vector<std::string>& from,
                                                std::size_t k, rng& gen,
                                                const std::string& owner) {
  if (from.size() < k) {
    fail(errc::insufficient_utterances, "'" + owner + "' has " + std::to_string(from.size()) +
                                            " utterances, need " + std::to_string(k));
  }
  const auto idx = gen.sample_without_replacement(from.size(), k);
  std::vector<std::string> out;
  out.reserve(k);
  for (auto i : idx) out.push_back(from[i]);
  return out;
}

// One voice-series set: n_speakers drawn without replacement, utterances per
// speaker as equal as possible (remainder to the first bins in draw order).
inline std::vector<std::string> build_speaker_set(const std::vector<speaker_group>& groups,
                                                  std::size_t n_speakers, std::size_t set_size,
                                                  rng& gen) {
  if (groups.size() < n_speakers) {
    fail(errc::insufficient_speakers, "pool has " + std::to_string(groups.size()) +
                                          " eligible speakers, need " +
                                          std::to_string(n_speakers));
  }
  const auto chosen = gen.sample_without_replacement(groups.size(), n_speakers);
  const auto alloc = equal_allocation(set_size, n_speakers);
  std::vector<std::string> set;
  set.reserve(set_size);
  for (std::size_t s = 0; s < n_speakers; ++s) {
    const auto& g = groups[chosen[s]];
    for (auto& u : draw_utterances(g.utterances, alloc[s], gen, g.speaker)) {
      set.push_back(std::move(u));
    }
  }
  return set;
}

inline void generate_levels(facet_benchmark& bench,
                            const std::vector<level_descriptor>& descriptors,
                            const std::vector<double>& rank_keys,
                            const std::function<std::vector<std::string>(std::size_t, rng&)>&
                                build_set) {
  const std::vector<double> ranks = average_ranks(rank_keys);
  const std::uint64_t tag = series_tag(bench.series);
  bench.levels.resize(descriptors.size());
  for (std::size_t l = 0; l < descriptors.size(); ++l) {
    bench.levels[l].descriptor = descriptors[l];
    bench.levels[l].rank = ranks[l];
    bench.levels[l].sets.resize(bench.sets_per_level);
  }
  // Flat (level, set) grid; one derived stream per cell.
  const std::size_t cells = descriptors.size() * bench.sets_per_level;
  std::vector<std::optional<error>> failures(cells);
  parallel_for(cells, [&](std::size_t cell) {
    const std::size_t l = cell / bench.sets_per_level;
    const std::size_t s = cell % bench.sets_per_level;
    rng gen(derive_stream(bench.seed, tag, l, s));
    try {
      bench.levels[l].sets[s] = build_set(l, gen);
    } catch (const error& e) {
      failures[cell] = e;
    }
  });
  for (const auto& f : failures) {
    if (f) throw *f;
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Voice series: diversity = number of distinct speakers, single-gender sets.

inline facet_benchmark sample_voice_series(const utterance_pool& pool,
                                           const std::vector<std::size_t>& speaker_counts,
                                           std::size_t set_size, gender gender_filter,
                                           std::size_t sets_per_level = kDefaultSetsPerLevel,
                                           std::uint64_t seed = 0) {
  if (speaker_counts.empty()) fail(errc::parse_error, "no speaker counts given");
  const auto groups = detail::group_by_speaker(
      pool, [&](const utterance_record& r) { return r.speaker_gender == gender_filter; });

  facet_benchmark bench;
  bench.primary = facet::voice;
  bench.series = "voice";
  bench.seed = seed;
  bench.set_size = set_size;
  bench.sets_per_level = sets_per_level;
  bench.parameters = {{"speaker_counts", speaker_counts},
                      {"gender_filter", gender_name(gender_filter)}};

  std::vector<level_descriptor> descriptors;
  std::vector<double> keys;
  for (std::size_t n : speaker_counts) {
    if (n == 0) fail(errc::parse_error, "speaker count must be positive");
    descriptors.push_back({"speaker_count", static_cast<double>(n)});
    keys.push_back(static_cast<double>(n));
  }

  detail::generate_levels(bench, descriptors, keys, [&](std::size_t l, rng& gen) {
    return detail::build_speaker_set(groups, speaker_counts[l], set_size, gen);
  });
  return bench;
}

// ---------------------------------------------------------------------------
// Gender series: diversity = balance of female voices; peaks at ratio 0.5.

namespace detail {

// Speaker count schedule for the opposed gender construction: many speakers
// at the gender extremes, two at perfect balance.
inline std::size_t opposed_gender_speakers(double ratio, std::size_t max_speakers = 30,
                                           std::size_t min_speakers = 2) {
  const double balance = std::min(ratio, 1.0 - ratio) / 0.5;
  const double count = static_cast<double>(max_speakers) +
                       (static_cast<double>(min_speakers) - static_cast<double>(max_speakers)) *
                           balance;
  return static_cast<std::size_t>(std::llround(count));
}

inline std::vector<std::string> build_gender_partition(
    const std::vector<speaker_group>& groups, std::size_t utterance_count,
    std::size_t speaker_count, rng& gen) {
  if (utterance_count == 0) return {};
  speaker_count = std::min(speaker_count, utterance_count);
  if (speaker_count == 0) speaker_count = 1;
  return build_speaker_set(groups, speaker_count, utterance_count, gen);
}

}  // namespace detail

inline facet_benchmark sample_gender_series(const utterance_pool& pool,
                                            const std::vector<double>& ratios,
                                            std::size_t set_size, const speaker_policy& policy,
                                            std::size_t sets_per_level = kDefaultSetsPerLevel,
                                            std::uint64_t seed = 0) {
  if (ratios.empty()) fail(errc::parse_error, "no ratios given");
  const auto female = detail::group_by_speaker(
      pool, [](const utterance_record& r) { return r.speaker_gender == gender::female; });
  const auto male = detail::group_by_speaker(
      pool, [](const utterance_record& r) { return r.speaker_gender == gender::male; });

  facet_benchmark bench;
  bench.primary = facet::gender;
  bench.series = policy.kind == speaker_policy_kind::opposed ? "gender_vs_voice" : "gender";
  bench.seed = seed;
  bench.set_size = set_size;
  bench.sets_per_level = sets_per_level;
  bench.parameters = {
      {"ratios", ratios},
      {"speaker_policy",
       policy.kind == speaker_policy_kind::opposed ? "opposed" : "equal_count"}};
  if (policy.kind == speaker_policy_kind::equal_count) {
    bench.parameters["speakers_per_set"] = policy.equal_count;
  }

  std::vector<level_descriptor> descriptors;
  std::vector<double> keys;
  for (double rho : ratios) {
    if (rho < 0.0 || rho > 1.0) fail(errc::parse_error, "female ratio outside [0, 1]");
    descriptors.push_back({"female_ratio", rho});
    // Diversity peaks at 0.5; snapping kills float noise so that mirror
    // ratios (0.2 vs 0.8) tie exactly and share an average rank.
    keys.push_back(std::round(std::min(rho, 1.0 - rho) * 1e9) / 1e9);
  }

  detail::generate_levels(bench, descriptors, keys, [&](std::size_t l, rng& gen) {
    const double rho = ratios[l];
    const auto f_count = static_cast<std::size_t>(std::llround(rho * static_cast<double>(set_size)));
    const std::size_t m_count = set_size - f_count;

    std::size_t total_speakers = policy.kind == speaker_policy_kind::opposed
                                     ? detail::opposed_gender_speakers(rho)
                                     : policy.equal_count;
    if (total_speakers == 0) total_speakers = 1;

    // Split the speaker budget proportionally, keeping at least one speaker
    // on every side that has utterances.
    std::size_t f_speakers = 0, m_speakers = 0;
    if (f_count > 0 && m_count > 0) {
      f_speakers = static_cast<std::size_t>(std::llround(
          static_cast<double>(total_speakers) * rho));
      f_speakers = std::clamp<std::size_t>(f_speakers, 1, total_speakers - 1);
      m_speakers = total_speakers - f_speakers;
    } else if (f_count > 0) {
      f_speakers = total_speakers;
    } else {
      m_speakers = total_speakers;
    }

    std::vector<std::string> set =
        detail::build_gender_partition(female, f_count, f_speakers, gen);
    for (auto& u : detail::build_gender_partition(male, m_count, m_speakers, gen)) {
      set.push_back(std::move(u));
    }
    return set;
  });
  return bench;
}

// ---------------------------------------------------------------------------
// Emotion/accent series: diversity = entropy of the class distribution. Levels
// interpolate the dominant-class mass from 1.0 down to the uniform 1/E.

namespace detail {

struct class_pool {
  std::vector<std::string> classes;  // sorted
  // per class, speaker -> utterances (speakers sorted)
  std::map<std::string, std::vector<speaker_group>> by_class;
};

inline class_pool build_class_pool(const utterance_pool& pool, facet f) {
  class_pool out;
  std::set<std::string> names;
  for (const auto& rec : pool) {
    const auto& label = f == facet::emotion ? rec.emotion : rec.accent;
    if (label) names.insert(*label);
  }
  out.classes.assign(names.begin(), names.end());
  for (const auto& cls : out.classes) {
    out.by_class[cls] = group_by_speaker(pool, [&](const utterance_record& r) {
      const auto& label = f == facet::emotion ? r.emotion : r.accent;
      return label && *label == cls;
    });
  }
  return out;
}

}  // namespace detail

inline facet_benchmark sample_entropy_series(const utterance_pool& pool, facet entropy_facet,
                                             std::size_t level_count, std::size_t set_size,
                                             const speaker_policy& policy,
                                             std::size_t sets_per_level = kDefaultSetsPerLevel,
                                             std::uint64_t seed = 0,
                                             std::vector<std::size_t> speaker_schedule = {}) {
  if (entropy_facet != facet::emotion && entropy_facet != facet::accent) {
    fail(errc::parse_error, "entropy series requires the emotion or accent facet");
  }
  if (level_count < 2) fail(errc::parse_error, "need at least 2 levels");
  const detail::class_pool classes = detail::build_class_pool(pool, entropy_facet);
  const std::size_t e = classes.classes.size();
  if (e < 2) {
    fail(errc::insufficient_classes,
         "pool has " + std::to_string(e) + " labeled classes, need >= 2");
  }

  const bool opposed = policy.kind == speaker_policy_kind::opposed;
  facet_benchmark bench;
  bench.primary = entropy_facet;
  bench.series = std::string(facet_name(entropy_facet)) + (opposed ? "_vs_voice" : "");
  bench.seed = seed;
  bench.set_size = set_size;
  bench.sets_per_level = sets_per_level;

  // Per-level speaker budget. Opposed defaults follow the voice-confound
  // constructions: emotion 4 -> 1 speakers (low -> high entropy), accent 30 -> 7.
  std::vector<std::size_t> speakers_at(level_count, policy.equal_count);
  if (opposed && speaker_schedule.empty()) {
    const std::size_t low = entropy_facet == facet::emotion ? 4 : 30;
    const std::size_t high = entropy_facet == facet::emotion ? 1 : 7;
    for (std::size_t l = 0; l < level_count; ++l) {
      speakers_at[l] = l < (level_count + 1) / 2 ? low : high;
    }
  } else if (!speaker_schedule.empty()) {
    if (speaker_schedule.size() != level_count) {
      fail(errc::parse_error, "speaker schedule length != level count");
    }
    speakers_at = std::move(speaker_schedule);
  }

  bench.parameters = {{"level_count", level_count},
                      {"classes", classes.classes},
                      {"speaker_policy", opposed ? "opposed" : "equal_count"},
                      {"speakers_per_level", speakers_at}};

  // Class-count template per level (independent of which class dominates).
  std::vector<std::vector<std::uint64_t>> level_counts(level_count);
  std::vector<level_descriptor> descriptors;
  std::vector<double> keys;
  for (std::size_t l = 0; l < level_count; ++l) {
    const double t = static_cast<double>(l) / static_cast<double>(level_count - 1);
    const double p_dom = 1.0 + (1.0 / static_cast<double>(e) - 1.0) * t;
    std::vector<double> probs(e, e > 1 ? (1.0 - p_dom) / static_cast<double>(e - 1) : 0.0);
    probs[0] = p_dom;
    level_counts[l] = detail::largest_remainder_counts(probs, set_size);
    const double realized = class_entropy(level_counts[l]);
    descriptors.push_back({"class_entropy", realized});
    keys.push_back(realized);
  }

  detail::generate_levels(bench, descriptors, keys, [&](std::size_t l, rng& gen) {
    // Dominant class drawn per set; remaining classes keep sorted order.
    const std::size_t dom = gen.below(e);
    std::vector<std::size_t> class_order;
    class_order.push_back(dom);
    for (std::size_t c = 0; c < e; ++c) {
      if (c != dom) class_order.push_back(c);
    }

    // Restrict to a speaker subpool when a budget applies.
    std::set<std::string> allowed;
    const std::size_t budget = speakers_at[l];
    if (budget > 0) {
      std::set<std::string> all_speakers;
      for (const auto& cls : classes.classes) {
        for (const auto& g : classes.by_class.at(cls)) all_speakers.insert(g.speaker);
      }
      std::vector<std::string> speakers(all_speakers.begin(), all_speakers.end());
      if (speakers.size() < budget) {
        fail(errc::insufficient_speakers, "pool has " + std::to_string(speakers.size()) +
                                              " speakers, need " + std::to_string(budget));
      }
      for (auto i : gen.sample_without_replacement(speakers.size(), budget)) {
        allowed.insert(speakers[i]);
      }
    }

    std::vector<std::string> set;
    set.reserve(set_size);
    for (std::size_t k = 0; k < e; ++k) {
      const std::size_t need = level_counts[l][class_order[k]];
      if (need == 0) continue;
      const auto& cls = classes.classes[class_order[k]];
      if (allowed.empty()) {
        std::vector<std::string> candidates;
        for (const auto& g : classes.by_class.at(cls)) {
          candidates.insert(candidates.end(), g.utterances.begin(), g.utterances.end());
        }
        for (auto& u : detail::draw_utterances(candidates, need, gen, cls)) {
          set.push_back(std::move(u));
        }
        continue;
      }
      // Under a speaker budget the class quota spreads across the budgeted
      // speakers as equally as possible, so voices stay equally represented.
      std::vector<const detail::speaker_group*> holders;
      for (const auto& g : classes.by_class.at(cls)) {
        if (allowed.contains(g.speaker)) holders.push_back(&g);
      }
      if (holders.empty()) {
        fail(errc::insufficient_utterances,
             "class '" + cls + "' has no utterances among the budgeted speakers");
      }
      const auto order = gen.sample_without_replacement(holders.size(), holders.size());
      const auto alloc = detail::equal_allocation(need, holders.size());
      for (std::size_t h = 0; h < holders.size(); ++h) {
        if (alloc[h] == 0) continue;
        const auto& g = *holders[order[h]];
        for (auto& u : detail::draw_utterances(g.utterances, alloc[h], gen, g.speaker)) {
          set.push_back(std::move(u));
        }
      }
    }
    return set;
  });
  return bench;
}

// ---------------------------------------------------------------------------
// Noise series: diversity = number of distinct background-noise classes.
// Eligible records carry exactly one tag once "Speech" is removed.

inline facet_benchmark sample_noise_series(const utterance_pool& pool,
                                           const std::vector<std::size_t>& class_counts,
                                           std::size_t set_size,
                                           std::size_t sets_per_level = kDefaultSetsPerLevel,
                                           std::uint64_t seed = 0) {
  if (class_counts.empty()) fail(errc::parse_error, "no class counts given");

  std::map<std::string, std::vector<std::string>> by_class;
  for (const auto& rec : pool) {
    if (!rec.noise_classes) continue;
    std::vector<std::string> tags;
    for (const auto& t : *rec.noise_classes) {
      if (t != "Speech") tags.push_back(t);
    }
    if (tags.size() != 1) continue;
    by_class[tags.front()].push_back(rec.utterance_id);
  }
  std::vector<std::string> classes;
  for (const auto& [cls, _] : by_class) classes.push_back(cls);

  const std::size_t max_count = *std::max_element(class_counts.begin(), class_counts.end());
  if (classes.size() < max_count) {
    fail(errc::insufficient_classes, "pool covers " + std::to_string(classes.size()) +
                                         " noise classes, need " + std::to_string(max_count));
  }

  facet_benchmark bench;
  bench.primary = facet::noise;
  bench.series = "noise";
  bench.seed = seed;
  bench.set_size = set_size;
  bench.sets_per_level = sets_per_level;
  bench.parameters = {{"class_counts", class_counts}};

  std::vector<level_descriptor> descriptors;
  std::vector<double> keys;
  for (std::size_t c : class_counts) {
    if (c == 0) fail(errc::parse_error, "class count must be positive");
    descriptors.push_back({"noise_class_count", static_cast<double>(c)});
    keys.push_back(static_cast<double>(c));
  }

  detail::generate_levels(bench, descriptors, keys, [&](std::size_t l, rng& gen) {
    const std::size_t c = class_counts[l];
    const auto chosen = gen.sample_without_replacement(classes.size(), c);
    const auto alloc = detail::equal_allocation(set_size, c);
    std::vector<std::string> set;
    set.reserve(set_size);
    for (std::size_t k = 0; k < c; ++k) {
      const auto& cls = classes[chosen[k]];
      for (auto& u : detail::draw_utterances(by_class.at(cls), alloc[k], gen, cls)) {
        set.push_back(std::move(u));
      }
    }
    return set;
  });
  return bench;
}

// ---------------------------------------------------------------------------
// Opposed series: the primary facet's diversity and the speaker diversity
// move in opposite directions. Ground-truth ranks follow the primary facet.

enum class opposed_schedule { gender_vs_voice, emotion_vs_voice, accent_vs_voice };

inline facet_benchmark sample_opposed_series(const utterance_pool& pool,
                                             opposed_schedule schedule, std::size_t set_size = 100,
                                             std::size_t sets_per_level = kDefaultSetsPerLevel,
                                             std::uint64_t seed = 0, std::size_t level_count = 5) {
  speaker_policy policy;
  policy.kind = speaker_policy_kind::opposed;
  switch (schedule) {
    case opposed_schedule::gender_vs_voice: {
      std::vector<double> ratios;
      for (int i = 0; i <= 10; ++i) ratios.push_back(0.1 * i);
      return sample_gender_series(pool, ratios, set_size, policy, sets_per_level, seed);
    }
    case opposed_schedule::emotion_vs_voice:
      return sample_entropy_series(pool, facet::emotion, level_count, set_size, policy,
                                   sets_per_level, seed);
    case opposed_schedule::accent_vs_voice:
      return sample_entropy_series(pool, facet::accent, level_count, set_size, policy,
                                   sets_per_level, seed);
  }
  fail(errc::parse_error, "unknown opposed schedule");
}

// ---------------------------------------------------------------------------
// Manifest serialization

inline nlohmann::json benchmark_to_json(const facet_benchmark& bench) {
  nlohmann::json j;
  j["format"] = "madspeech-benchmark";
  j["version"] = 1;
  j["facet"] = facet_name(bench.primary);
  j["series"] = bench.series;
  j["seed"] = bench.seed;
  j["set_size"] = bench.set_size;
  j["sets_per_level"] = bench.sets_per_level;
  j["parameters"] = bench.parameters;
  j["levels"] = nlohmann::json::array();
  for (const auto& level : bench.levels) {
    nlohmann::json lj;
    lj["rank"] = level.rank;
    lj["descriptor"] = {{"kind", level.descriptor.kind}, {"value", level.descriptor.value}};
    lj["sets"] = level.sets;
    j["levels"].push_back(std::move(lj));
  }
  return j;
}

inline facet_benchmark benchmark_from_json(const nlohmann::json& j, const std::string& source) {
  try {
    if (!j.is_object() || j.value("format", "") != "madspeech-benchmark") {
      fail(errc::parse_error, source + ": not a benchmark manifest");
    }
    if (j.value("version", 0) != 1) {
      fail(errc::version_unsupported, source + ": manifest version");
    }
    facet_benchmark bench;
    bench.primary = facet_from_name(j.at("facet").get<std::string>());
    bench.series = j.at("series").get<std::string>();
    bench.seed = j.at("seed").get<std::uint64_t>();
    bench.set_size = j.at("set_size").get<std::size_t>();
    bench.sets_per_level = j.at("sets_per_level").get<std::size_t>();
    bench.parameters = j.value("parameters", nlohmann::json::object());
    for (const auto& lj : j.at("levels")) {
      diversity_level level;
      level.rank = lj.at("rank").get<double>();
      level.descriptor.kind = lj.at("descriptor").at("kind").get<std::string>();
      level.descriptor.value = lj.at("descriptor").at("value").get<double>();
      level.sets = lj.at("sets").get<std::vector<std::vector<std::string>>>();
      bench.levels.push_back(std::move(level));
    }
    return bench;
  } catch (const nlohmann::json::exception& e) {
    fail(errc::parse_error, source + ": " + e.what());
  }
}

inline void benchmark_write(const std::string& path, const facet_benchmark& bench) {
  write_file_atomic(path, benchmark_to_json(bench).dump(1) + "\n");
}

inline facet_benchmark benchmark_read(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_failure, "cannot open " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) fail(errc::parse_error, path + ": invalid JSON");
  return benchmark_from_json(j, path);
}

}  // namespace mads
