#pragma once

// Contrastive training of projection heads on frozen base embeddings.
// Two objectives: a symmetric in-batch contrastive loss over (anchor,
// positive) pairs and a semi-hard triplet loss. Gradients are exact analytic
// derivatives (through the internal L2 normalization); the optimizer is Adam
// with decoupled weight decay on weights only. Runs are deterministic given
// (data order, config, seed).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mads/error.hpp"
#include "mads/matrix.hpp"
#include "mads/projection.hpp"
#include "mads/rng.hpp"

namespace mads {

enum class loss_kind { standard_contrastive, semi_hard_triplet };

inline const char* loss_name(loss_kind k) {
  return k == loss_kind::standard_contrastive ? "standard_contrastive" : "semi_hard_triplet";
}

enum class semi_hard_fallback { farthest_negative, skip_pair };

struct training_config {
  loss_kind loss = loss_kind::standard_contrastive;
  double learning_rate = 1e-4;
  std::size_t batch_size = 128;
  double weight_decay = 1e-3;
  std::size_t steps = 1000;
  double contrastive_temperature = 0.07;
  double triplet_margin = 0.2;
  std::uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  bool symmetric_contrastive = true;
  semi_hard_fallback fallback = semi_hard_fallback::farthest_negative;
  double val_fraction = 0.0;       // 0 disables validation tracking
  std::size_t val_interval = 100;  // steps between validation evaluations

  void validate() const {
    if (learning_rate <= 0.0) fail(errc::numerical_bounds_violation, "learning_rate must be > 0");
    if (batch_size < 2) fail(errc::degenerate_batch, "batch_size must be >= 2");
    if (contrastive_temperature <= 0.0) {
      fail(errc::numerical_bounds_violation, "contrastive_temperature must be > 0");
    }
    if (triplet_margin <= 0.0) fail(errc::numerical_bounds_violation, "triplet_margin must be > 0");
    if (val_fraction < 0.0 || val_fraction >= 1.0) {
      fail(errc::numerical_bounds_violation, "val_fraction must lie in [0, 1)");
    }
  }
};

// Per-facet defaults: weight decay 1e-3 for voice/emotion/noise heads and
// 1e-4 for gender/accent.
inline training_config default_training_config(facet f) {
  training_config cfg;
  cfg.weight_decay = (f == facet::gender || f == facet::accent) ? 1e-4 : 1e-3;
  return cfg;
}

struct labeled_feature {
  std::vector<double> vector;
  std::string group_id;  // facet class, or utterance id for chunk pairing
};

// ---------------------------------------------------------------------------
// Batch construction

// (anchor, positive) index pairs sharing a group_id. Groups are drawn
// uniformly: without replacement while enough distinct groups exist, with
// replacement otherwise.
inline std::vector<std::pair<std::size_t, std::size_t>> sample_positive_batch(
    const std::vector<labeled_feature>& data, std::size_t batch_size, rng& gen) {
  std::vector<std::string> group_order;
  std::map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].group_id.empty()) fail(errc::parse_error, "empty group_id");
    auto [it, inserted] = members.try_emplace(data[i].group_id);
    if (inserted) group_order.push_back(data[i].group_id);
    it->second.push_back(i);
  }
  std::vector<const std::vector<std::size_t>*> eligible;
  for (const auto& g : group_order) {
    const auto& m = members[g];
    if (m.size() >= 2) eligible.push_back(&m);
  }
  if (eligible.size() < 2) {
    fail(errc::insufficient_groups, "need >= 2 groups with >= 2 members, found " +
                                        std::to_string(eligible.size()));
  }

  std::vector<std::size_t> chosen;
  if (eligible.size() >= batch_size) {
    chosen = gen.sample_without_replacement(eligible.size(), batch_size);
  } else {
    chosen.reserve(batch_size);
    for (std::size_t i = 0; i < batch_size; ++i) chosen.push_back(gen.below(eligible.size()));
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(batch_size);
  for (std::size_t g : chosen) {
    const auto& m = *eligible[g];
    const std::size_t a = gen.below(m.size());
    const std::size_t p = (a + 1 + gen.below(m.size() - 1)) % m.size();
    pairs.emplace_back(m[a], m[p]);
  }
  return pairs;
}

// ---------------------------------------------------------------------------
// Losses

namespace detail {

// Normalizes rows; returns the original norms. Throws on zero or non-finite rows.
inline std::vector<double> normalize_rows(const matrix& in, matrix& out) {
  out = matrix(in.rows(), in.cols());
  std::vector<double> norms(in.rows());
  for (std::size_t i = 0; i < in.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < in.cols(); ++j) {
      const double v = in(i, j);
      if (!std::isfinite(v)) fail(errc::non_finite_input, "non-finite row entry");
      s += v * v;
    }
    if (s == 0.0) fail(errc::zero_norm_row, "row " + std::to_string(i) + " has zero norm");
    const double norm = std::sqrt(s);
    norms[i] = norm;
    for (std::size_t j = 0; j < in.cols(); ++j) out(i, j) = in(i, j) / norm;
  }
  return norms;
}

// g_x = (g_y - (g_y . y) y) / ||x||  for y = x / ||x||.
inline void backprop_through_normalization(const matrix& normalized,
                                           const std::vector<double>& norms, matrix& grad) {
  for (std::size_t i = 0; i < grad.rows(); ++i) {
    double proj = 0.0;
    for (std::size_t j = 0; j < grad.cols(); ++j) proj += grad(i, j) * normalized(i, j);
    const double inv = 1.0 / norms[i];
    for (std::size_t j = 0; j < grad.cols(); ++j) {
      grad(i, j) = (grad(i, j) - proj * normalized(i, j)) * inv;
    }
  }
}

}  // namespace detail

struct contrastive_result {
  double loss;
  matrix grad_anchors;
  matrix grad_positives;
};

// Symmetric InfoNCE over in-batch negatives. Rows are L2-normalized inside;
// logits are cosine/temperature; the target pairs anchor i with positive i.
// symmetric=false keeps only the anchor->positive direction.
inline contrastive_result standard_contrastive_loss(const matrix& anchors, const matrix& positives,
                                                    double temperature, bool symmetric = true) {
  if (!anchors.same_shape(positives)) fail(errc::shape_mismatch, "anchor/positive shape mismatch");
  const std::size_t b = anchors.rows();
  if (b < 2) fail(errc::degenerate_batch, "contrastive batch needs >= 2 pairs");
  if (temperature <= 0.0) fail(errc::numerical_bounds_violation, "temperature must be > 0");

  matrix na, np;
  const std::vector<double> anchor_norms = detail::normalize_rows(anchors, na);
  const std::vector<double> positive_norms = detail::normalize_rows(positives, np);

  matrix logits(b, b);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) logits(i, j) = dot(na.row(i), np.row(j)) / temperature;
  }

  // Row/column softmax with max-shift.
  matrix row_sm(b, b), col_sm(b, b);
  double row_ce = 0.0, col_ce = 0.0;
  for (std::size_t i = 0; i < b; ++i) {
    double mx = logits(i, 0);
    for (std::size_t j = 1; j < b; ++j) mx = std::max(mx, logits(i, j));
    double z = 0.0;
    for (std::size_t j = 0; j < b; ++j) z += std::exp(logits(i, j) - mx);
    for (std::size_t j = 0; j < b; ++j) row_sm(i, j) = std::exp(logits(i, j) - mx) / z;
    row_ce -= logits(i, i) - mx - std::log(z);
  }
  for (std::size_t j = 0; j < b; ++j) {
    double mx = logits(0, j);
    for (std::size_t i = 1; i < b; ++i) mx = std::max(mx, logits(i, j));
    double z = 0.0;
    for (std::size_t i = 0; i < b; ++i) z += std::exp(logits(i, j) - mx);
    for (std::size_t i = 0; i < b; ++i) col_sm(i, j) = std::exp(logits(i, j) - mx) / z;
    col_ce -= logits(j, j) - mx - std::log(z);
  }
  row_ce /= static_cast<double>(b);
  col_ce /= static_cast<double>(b);

  contrastive_result res;
  res.loss = symmetric ? 0.5 * (row_ce + col_ce) : row_ce;

  // d loss / d logits, then chain through the cosine and the normalization.
  matrix dlogits(b, b);
  const double inv_b = 1.0 / static_cast<double>(b);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) {
      const double target = i == j ? 1.0 : 0.0;
      if (symmetric) {
        dlogits(i, j) = 0.5 * inv_b * (row_sm(i, j) - target) + 0.5 * inv_b * (col_sm(i, j) - target);
      } else {
        dlogits(i, j) = inv_b * (row_sm(i, j) - target);
      }
    }
  }

  res.grad_anchors = matrix(b, anchors.cols());
  res.grad_positives = matrix(b, anchors.cols());
  const double inv_t = 1.0 / temperature;
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) {
      const double g = dlogits(i, j) * inv_t;
      for (std::size_t c = 0; c < anchors.cols(); ++c) {
        res.grad_anchors(i, c) += g * np(j, c);
        res.grad_positives(j, c) += g * na(i, c);
      }
    }
  }
  detail::backprop_through_normalization(na, anchor_norms, res.grad_anchors);
  detail::backprop_through_normalization(np, positive_norms, res.grad_positives);
  return res;
}

struct triplet_result {
  double loss;
  matrix grad;            // w.r.t. the raw (pre-normalization) embeddings
  std::size_t pair_count; // (anchor, positive) pairs that entered the mean
};

// Semi-hard triplet loss on squared Euclidean distances between L2-normalized
// embeddings. For every ordered same-group (anchor, positive) pair the
// negative is the nearest one farther than the positive; when none exists the
// fallback picks the farthest negative (or skips the pair). Gradients flow
// only through the selected triplets.
inline triplet_result semi_hard_triplet_loss(
    const matrix& embeddings, const std::vector<std::string>& group_ids, double margin,
    semi_hard_fallback fallback = semi_hard_fallback::farthest_negative) {
  const std::size_t m = embeddings.rows();
  if (group_ids.size() != m) fail(errc::shape_mismatch, "group_ids/rows mismatch");
  if (margin <= 0.0) fail(errc::numerical_bounds_violation, "margin must be > 0");

  matrix ne;
  const std::vector<double> norms = detail::normalize_rows(embeddings, ne);

  // Squared distances 2 - 2 cos.
  matrix dist(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double d = 2.0 - 2.0 * dot(ne.row(i), ne.row(j));
      dist(i, j) = d;
      dist(j, i) = d;
    }
  }

  matrix ngrad(m, embeddings.cols());  // w.r.t. normalized embeddings
  double total = 0.0;
  std::size_t pairs = 0;
  bool any_pair = false;

  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t p = 0; p < m; ++p) {
      if (a == p || group_ids[a] != group_ids[p]) continue;
      any_pair = true;

      const double d_ap = dist(a, p);
      std::size_t best = m;
      double best_d = std::numeric_limits<double>::infinity();
      std::size_t farthest = m;
      double farthest_d = -1.0;
      for (std::size_t n = 0; n < m; ++n) {
        if (group_ids[n] == group_ids[a]) continue;
        const double d_an = dist(a, n);
        if (d_an > d_ap && d_an < best_d) {
          best_d = d_an;
          best = n;
        }
        if (d_an > farthest_d) {
          farthest_d = d_an;
          farthest = n;
        }
      }
      if (farthest == m) continue;  // no negative in batch at all
      std::size_t neg = best;
      if (neg == m) {
        if (fallback == semi_hard_fallback::skip_pair) continue;
        neg = farthest;
      }

      ++pairs;
      const double hinge = d_ap - dist(a, neg) + margin;
      if (hinge > 0.0) {
        total += hinge;
        for (std::size_t c = 0; c < embeddings.cols(); ++c) {
          ngrad(a, c) += 2.0 * (ne(neg, c) - ne(p, c));
          ngrad(p, c) += 2.0 * (ne(p, c) - ne(a, c));
          ngrad(neg, c) += 2.0 * (ne(a, c) - ne(neg, c));
        }
      }
    }
  }

  if (!any_pair || pairs == 0) {
    fail(errc::no_valid_triplets, "batch has no usable (anchor, positive, negative) triple");
  }

  triplet_result res;
  res.pair_count = pairs;
  res.loss = total / static_cast<double>(pairs);
  const double scale = 1.0 / static_cast<double>(pairs);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t c = 0; c < embeddings.cols(); ++c) ngrad(i, c) *= scale;
  }
  detail::backprop_through_normalization(ne, norms, ngrad);
  res.grad = std::move(ngrad);
  return res;
}

// ---------------------------------------------------------------------------
// Adam with decoupled weight decay

struct adam_state {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;

  explicit adam_state(std::size_t size = 0) : m(size, 0.0), v(size, 0.0) {}
};

// Decay (params *= 1 - lr*wd) runs before the moment update; pass
// weight_decay = 0 for bias tensors.
inline void adam_step(std::vector<double>& params, const std::vector<double>& grads,
                      adam_state& state, const training_config& cfg, double weight_decay) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    fail(errc::shape_mismatch, "adam tensor size mismatch");
  }
  if (weight_decay > 0.0) {
    const double keep = 1.0 - cfg.learning_rate * weight_decay;
    for (double& p : params) p *= keep;
  }
  state.step += 1;
  const double b1 = cfg.adam_beta1;
  const double b2 = cfg.adam_beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * grads[i];
    state.v[i] = b2 * state.v[i] + (1.0 - b2) * grads[i] * grads[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_epsilon);
  }
}

// ---------------------------------------------------------------------------
// Head trainer

struct train_log_entry {
  std::size_t step;
  double train_loss;
  double val_loss;  // NaN when not evaluated at this step
};

struct train_result {
  projection_head head;
  std::vector<train_log_entry> log;
};

namespace detail {

struct layer_grads {
  std::vector<std::vector<double>> dw;
  std::vector<std::vector<double>> db;

  explicit layer_grads(const projection_head& head) {
    for (const auto& l : head.layers()) {
      dw.emplace_back(l.weights.size(), 0.0);
      db.emplace_back(l.bias.size(), 0.0);
    }
  }
};

// Forward pass over a batch that records everything backward needs.
struct batch_trace {
  matrix input;                      // post-dropout input
  std::vector<matrix> pre;           // z_k per layer
  std::vector<matrix> post;          // gelu(z_k) per hidden layer
};

inline matrix gather_rows(const std::vector<labeled_feature>& data,
                          const std::vector<std::size_t>& idx, std::size_t dim) {
  matrix out(idx.size(), dim);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const auto& v = data[idx[r]].vector;
    if (v.size() != dim) {
      fail(errc::dim_mismatch, "feature " + std::to_string(idx[r]) + " has dim " +
                                   std::to_string(v.size()) + ", expected " + std::to_string(dim));
    }
    for (std::size_t c = 0; c < dim; ++c) out(r, c) = v[c];
  }
  return out;
}

inline matrix batch_forward(const projection_head& head, matrix input, bool training, rng* drop,
                            batch_trace* trace) {
  const auto& layers = head.layers();
  if (training && head.dropout_rate() > 0.0) {
    const double rate = head.dropout_rate();
    const double scale = 1.0 / (1.0 - rate);
    for (std::size_t i = 0; i < input.rows(); ++i) {
      for (std::size_t j = 0; j < input.cols(); ++j) {
        input(i, j) = drop->real01() < rate ? 0.0 : input(i, j) * scale;
      }
    }
  }
  if (trace != nullptr) trace->input = input;

  matrix current = std::move(input);
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto& l = layers[k];
    matrix z(current.rows(), l.out_dim);
    for (std::size_t i = 0; i < current.rows(); ++i) {
      for (std::size_t r = 0; r < l.out_dim; ++r) {
        const double* w = l.weights.data() + r * l.in_dim;
        double acc = l.bias[r];
        for (std::size_t c = 0; c < l.in_dim; ++c) acc += w[c] * current(i, c);
        z(i, r) = acc;
      }
    }
    if (trace != nullptr) trace->pre.push_back(z);
    if (k + 1 < layers.size()) {
      for (std::size_t i = 0; i < z.rows(); ++i) {
        for (std::size_t r = 0; r < z.cols(); ++r) z(i, r) = gelu(z(i, r));
      }
      if (trace != nullptr) trace->post.push_back(z);
    }
    current = std::move(z);
  }
  return current;
}

inline void batch_backward(const projection_head& head, const batch_trace& trace,
                           const matrix& output_grad, layer_grads& grads) {
  const auto& layers = head.layers();
  matrix dz = output_grad;
  for (std::size_t k = layers.size(); k-- > 0;) {
    const auto& l = layers[k];
    const matrix& h_prev = k == 0 ? trace.input : trace.post[k - 1];
    auto& dw = grads.dw[k];
    auto& db = grads.db[k];
    for (std::size_t i = 0; i < dz.rows(); ++i) {
      for (std::size_t r = 0; r < l.out_dim; ++r) {
        const double g = dz(i, r);
        db[r] += g;
        double* wrow = dw.data() + r * l.in_dim;
        for (std::size_t c = 0; c < l.in_dim; ++c) wrow[c] += g * h_prev(i, c);
      }
    }
    if (k == 0) break;
    matrix dh(dz.rows(), l.in_dim);
    for (std::size_t i = 0; i < dz.rows(); ++i) {
      for (std::size_t r = 0; r < l.out_dim; ++r) {
        const double g = dz(i, r);
        const double* wrow = l.weights.data() + r * l.in_dim;
        for (std::size_t c = 0; c < l.in_dim; ++c) dh(i, c) += g * wrow[c];
      }
    }
    const matrix& z_prev = trace.pre[k - 1];
    for (std::size_t i = 0; i < dh.rows(); ++i) {
      for (std::size_t c = 0; c < dh.cols(); ++c) {
        dh(i, c) *= gelu_derivative(z_prev(i, c));
      }
    }
    dz = std::move(dh);
  }
}

struct loss_eval {
  double loss;
  matrix grad_anchors;
  matrix grad_positives;
};

inline loss_eval eval_loss(const training_config& cfg, const matrix& a_out, const matrix& p_out,
                           const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                           const std::vector<labeled_feature>& data) {
  loss_eval out;
  if (cfg.loss == loss_kind::standard_contrastive) {
    contrastive_result r =
        standard_contrastive_loss(a_out, p_out, cfg.contrastive_temperature,
                                  cfg.symmetric_contrastive);
    out.loss = r.loss;
    out.grad_anchors = std::move(r.grad_anchors);
    out.grad_positives = std::move(r.grad_positives);
    return out;
  }
  // Triplet: anchors and positives form one batch of 2B labeled rows.
  const std::size_t b = a_out.rows();
  const std::size_t d = a_out.cols();
  matrix all(2 * b, d);
  std::vector<std::string> gids(2 * b);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t c = 0; c < d; ++c) {
      all(i, c) = a_out(i, c);
      all(b + i, c) = p_out(i, c);
    }
    gids[i] = data[pairs[i].first].group_id;
    gids[b + i] = data[pairs[i].second].group_id;
  }
  triplet_result r = semi_hard_triplet_loss(all, gids, cfg.triplet_margin, cfg.fallback);
  out.loss = r.loss;
  out.grad_anchors = matrix(b, d);
  out.grad_positives = matrix(b, d);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t c = 0; c < d; ++c) {
      out.grad_anchors(i, c) = r.grad(i, c);
      out.grad_positives(i, c) = r.grad(b + i, c);
    }
  }
  return out;
}

inline std::string build_descriptor(const projection_head& head, const training_config& cfg) {
  nlohmann::json j;
  j["facet"] = facet_name(head.head_facet());
  j["input_dim"] = head.input_dim();
  std::vector<std::size_t> dims;
  for (const auto& l : head.layers()) dims.push_back(l.out_dim);
  j["layer_dims"] = dims;
  j["dropout_rate"] = head.dropout_rate();
  j["seed"] = cfg.seed;
  j["loss"] = loss_name(cfg.loss);
  j["learning_rate"] = cfg.learning_rate;
  j["batch_size"] = cfg.batch_size;
  j["weight_decay"] = cfg.weight_decay;
  j["steps"] = cfg.steps;
  j["contrastive_temperature"] = cfg.contrastive_temperature;
  j["triplet_margin"] = cfg.triplet_margin;
  j["init"] = "uniform_sqrt6_over_fan_sum";
  return j.dump();
}

}  // namespace detail

// Trains a head of the template's architecture on frozen base features.
// Returns the final head (best-validation weights when val_fraction > 0)
// plus the per-step loss log. Inputs are never mutated.
inline train_result train_head(const std::vector<labeled_feature>& features,
                               const projection_head& head_template,
                               const training_config& config) {
  config.validate();
  projection_head head = head_template;
  rng init_rng(derive_stream(config.seed, 0x696e6974));  // distinct substreams
  rng batch_rng(derive_stream(config.seed, 0x62617463));
  rng dropout_rng(derive_stream(config.seed, 0x64726f70));
  rng split_rng(derive_stream(config.seed, 0x73706c69));
  head.initialize_weights(init_rng);
  head.set_descriptor(detail::build_descriptor(head, config));

  // Optional validation split (deterministic).
  std::vector<labeled_feature> train_data;
  std::vector<labeled_feature> val_data;
  const std::vector<labeled_feature>* train_ptr = &features;
  if (config.val_fraction > 0.0) {
    std::vector<std::size_t> order(features.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    split_rng.shuffle(order);
    const std::size_t val_n =
        static_cast<std::size_t>(config.val_fraction * static_cast<double>(features.size()));
    for (std::size_t i = 0; i < order.size(); ++i) {
      (i < val_n ? val_data : train_data).push_back(features[order[i]]);
    }
    train_ptr = &train_data;
  }

  // A fixed validation pair set, evaluated in inference mode.
  std::vector<std::pair<std::size_t, std::size_t>> val_pairs;
  if (!val_data.empty()) {
    rng val_rng(derive_stream(config.seed, 0x76616c70));
    val_pairs = sample_positive_batch(val_data, config.batch_size, val_rng);
  }
  const auto eval_validation = [&]() -> double {
    std::vector<std::size_t> ai, pi;
    for (const auto& [a, p] : val_pairs) {
      ai.push_back(a);
      pi.push_back(p);
    }
    const matrix a_in = detail::gather_rows(val_data, ai, head.input_dim());
    const matrix p_in = detail::gather_rows(val_data, pi, head.input_dim());
    const matrix a_out = detail::batch_forward(head, a_in, false, nullptr, nullptr);
    const matrix p_out = detail::batch_forward(head, p_in, false, nullptr, nullptr);
    return detail::eval_loss(config, a_out, p_out, val_pairs, val_data).loss;
  };

  train_result result;
  double best_val = std::numeric_limits<double>::infinity();
  projection_head best_head = head;
  bool tracked_val = false;
  std::vector<adam_state> optimizer;  // weights and bias states interleaved per layer

  for (std::size_t step = 0; step < config.steps; ++step) {
    const auto pairs = sample_positive_batch(*train_ptr, config.batch_size, batch_rng);
    std::vector<std::size_t> ai, pi;
    ai.reserve(pairs.size());
    pi.reserve(pairs.size());
    for (const auto& [a, p] : pairs) {
      ai.push_back(a);
      pi.push_back(p);
    }

    detail::batch_trace a_trace, p_trace;
    const matrix a_in = detail::gather_rows(*train_ptr, ai, head.input_dim());
    const matrix p_in = detail::gather_rows(*train_ptr, pi, head.input_dim());
    const matrix a_out = detail::batch_forward(head, a_in, true, &dropout_rng, &a_trace);
    const matrix p_out = detail::batch_forward(head, p_in, true, &dropout_rng, &p_trace);

    detail::loss_eval le = detail::eval_loss(config, a_out, p_out, pairs, *train_ptr);

    detail::layer_grads grads(head);
    detail::batch_backward(head, a_trace, le.grad_anchors, grads);
    detail::batch_backward(head, p_trace, le.grad_positives, grads);

    auto& layers = head.layers();
    if (optimizer.empty()) {
      for (const auto& l : layers) {
        optimizer.emplace_back(l.weights.size());
        optimizer.emplace_back(l.bias.size());
      }
    }
    for (std::size_t k = 0; k < layers.size(); ++k) {
      adam_step(layers[k].weights, grads.dw[k], optimizer[2 * k], config, config.weight_decay);
      adam_step(layers[k].bias, grads.db[k], optimizer[2 * k + 1], config, 0.0);
    }

    train_log_entry entry{step + 1, le.loss, std::numeric_limits<double>::quiet_NaN()};
    if (!val_pairs.empty() &&
        ((step + 1) % config.val_interval == 0 || step + 1 == config.steps)) {
      entry.val_loss = eval_validation();
      tracked_val = true;
      if (entry.val_loss < best_val) {
        best_val = entry.val_loss;
        best_head = head;
      }
    }
    result.log.push_back(entry);
  }

  result.head = tracked_val ? best_head : head;
  result.head.set_descriptor(detail::build_descriptor(result.head, config));
  return result;
}

inline std::string train_log_csv(const std::vector<train_log_entry>& log) {
  std::ostringstream out;
  out << "step,train_loss,val_loss\n";
  char buf[64];
  for (const auto& e : log) {
    std::snprintf(buf, sizeof(buf), "%.17g", e.train_loss);
    out << e.step << ',' << buf << ',';
    if (!std::isnan(e.val_loss)) {
      std::snprintf(buf, sizeof(buf), "%.17g", e.val_loss);
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Config file (JSON, field names mirror training_config)

inline training_config training_config_from_json(const nlohmann::json& j,
                                                 const training_config& base = {}) {
  training_config cfg = base;
  const auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).template get<std::decay_t<decltype(field)>>();
  };
  if (j.contains("loss")) {
    const std::string name = j.at("loss").get<std::string>();
    if (name == "standard_contrastive") {
      cfg.loss = loss_kind::standard_contrastive;
    } else if (name == "semi_hard_triplet") {
      cfg.loss = loss_kind::semi_hard_triplet;
    } else {
      fail(errc::parse_error, "unknown loss '" + name + "'");
    }
  }
  get("learning_rate", cfg.learning_rate);
  get("batch_size", cfg.batch_size);
  get("weight_decay", cfg.weight_decay);
  get("steps", cfg.steps);
  get("contrastive_temperature", cfg.contrastive_temperature);
  get("triplet_margin", cfg.triplet_margin);
  get("seed", cfg.seed);
  get("adam_beta1", cfg.adam_beta1);
  get("adam_beta2", cfg.adam_beta2);
  get("adam_epsilon", cfg.adam_epsilon);
  get("symmetric_contrastive", cfg.symmetric_contrastive);
  get("val_fraction", cfg.val_fraction);
  get("val_interval", cfg.val_interval);
  if (j.contains("semi_hard_fallback")) {
    const std::string name = j.at("semi_hard_fallback").get<std::string>();
    if (name == "farthest") {
      cfg.fallback = semi_hard_fallback::farthest_negative;
    } else if (name == "skip") {
      cfg.fallback = semi_hard_fallback::skip_pair;
    } else {
      fail(errc::parse_error, "unknown semi_hard_fallback '" + name + "'");
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace mads
