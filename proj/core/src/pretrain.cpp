#include "molkd/pretrain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace molkd {

void PretrainConfig::validate() const {
  if (margin <= 0.0) throw Error(Errc::bad_config, "margin must be positive");
  if (yield_exponent < 0.0) throw Error(Errc::bad_config, "yield exponent must be >= 0");
  if (batch_size < 2) throw Error(Errc::bad_config, "batch size must be >= 2");
  if (epochs < 0) throw Error(Errc::bad_config, "epochs must be >= 0");
  if (embedding_dim < 1 || hidden_dim < 1) throw Error(Errc::bad_config, "dims must be >= 1");
  if (layers < 1) throw Error(Errc::bad_config, "layer count must be >= 1");
}

std::vector<int> PretrainConfig::encoder_dims(int input_dim) const {
  std::vector<int> dims{input_dim};
  for (int l = 1; l < layers; ++l) dims.push_back(hidden_dim);
  dims.push_back(embedding_dim);
  return dims;
}

Tensor reaction_score(const Tensor& reactant_sum, const Tensor& product_sum) {
  if (reactant_sum.size() != product_sum.size()) {
    throw Error(Errc::dim_mismatch, "reactant and product embeddings differ in dimension");
  }
  return l2_norm(sub(reactant_sum, product_sum));
}

Tensor gtranse_loss(const std::vector<Tensor>& reactant_sums,
                    const std::vector<Tensor>& product_sums, const std::vector<double>& yields,
                    double margin, double yield_exponent) {
  const std::size_t b = reactant_sums.size();
  if (b < 2) {
    throw Error(Errc::batch_too_small, "the margin loss needs at least 2 reactions");
  }
  if (product_sums.size() != b || yields.size() != b) {
    throw Error(Errc::dim_mismatch, "batch component counts differ");
  }

  std::vector<Tensor> positive;  // f(R_i, P_i)
  positive.reserve(b);
  for (std::size_t i = 0; i < b; ++i) {
    positive.push_back(reaction_score(reactant_sums[i], product_sums[i]));
  }

  std::vector<Tensor> hinge_terms;
  hinge_terms.reserve(b * (b - 1));
  for (std::size_t i = 0; i < b; ++i) {
    const double scaled_margin = std::pow(yields[i], yield_exponent) * margin;
    for (std::size_t j = 0; j < b; ++j) {
      if (j == i) continue;
      Tensor negative = reaction_score(reactant_sums[i], product_sums[j]);
      hinge_terms.push_back(relu(add_scalar(sub(positive[i], negative), scaled_margin)));
    }
  }
  const double denom = static_cast<double>(b) * static_cast<double>(b - 1);
  return scalar_mul(sum_all(concat_rows(hinge_terms)), 1.0 / denom);
}

Tensor gtranse_batch_loss(const std::vector<ReactionRecord>& batch, const FeatureVocab& vocab,
                          const EncoderParams& meta, const std::vector<Tensor>& weights,
                          const PretrainConfig& cfg) {
  if (batch.size() < 2) {
    throw Error(Errc::batch_too_small, "the margin loss needs at least 2 reactions");
  }
  std::vector<Tensor> reactant_sums, product_sums;
  std::vector<double> yields;
  reactant_sums.reserve(batch.size());
  product_sums.reserve(batch.size());
  yields.reserve(batch.size());
  for (const ReactionRecord& r : batch) {
    Tensor rs = encode_graph_with(r.reactants[0], vocab, meta, weights);
    for (std::size_t i = 1; i < r.reactants.size(); ++i) {
      rs = add(rs, encode_graph_with(r.reactants[i], vocab, meta, weights));
    }
    Tensor ps = encode_graph_with(r.products[0], vocab, meta, weights);
    for (std::size_t i = 1; i < r.products.size(); ++i) {
      ps = add(ps, encode_graph_with(r.products[i], vocab, meta, weights));
    }
    reactant_sums.push_back(std::move(rs));
    product_sums.push_back(std::move(ps));
    yields.push_back(r.yield_fraction);
  }
  return gtranse_loss(reactant_sums, product_sums, yields, cfg.margin, cfg.yield_exponent);
}

PretrainResult run_pretrain(const std::vector<ReactionRecord>& dataset,
                            const PretrainConfig& cfg) {
  cfg.validate();
  if (dataset.empty()) {
    throw Error(Errc::empty_dataset, "pre-training dataset is empty");
  }

  std::vector<MolGraph> corpus;
  for (const ReactionRecord& r : dataset) {
    for (const MolGraph& g : r.reactants) corpus.push_back(g);
    for (const MolGraph& g : r.products) corpus.push_back(g);
  }

  PretrainResult result;
  result.vocab = build_vocab(corpus, /*unk=*/true);
  result.params = init_encoder_params(
      cfg.arch, cfg.encoder_dims(static_cast<int>(result.vocab.total_dim())), cfg.hops, cfg.seed);

  AdamState adam(result.params.weights, cfg.adam);
  std::uint64_t rng = cfg.seed ^ 0x5deece66dULL;  // shuffle stream, separate from init

  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      const std::size_t j = splitmix64(rng) % i;
      std::swap(order[i - 1], order[j]);
    }

    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      if (stop - start < 2) break;  // a trailing singleton cannot form negatives

      std::vector<ReactionRecord> batch;
      batch.reserve(stop - start);
      for (std::size_t i = start; i < stop; ++i) batch.push_back(dataset[order[i]]);

      Tape tape;
      std::vector<Tensor> weights = tape.params(result.params.weights);
      Tensor loss = gtranse_batch_loss(batch, result.vocab, result.params, weights, cfg);
      loss_sum += loss.value();
      ++batches;

      tape.backward(loss);
      std::vector<Tensor> grads;
      grads.reserve(weights.size());
      for (const Tensor& w : weights) grads.push_back(tape.grad(w));
      adam_step(result.params.weights, grads, adam);
    }
    if (batches == 0) {
      throw Error(Errc::batch_too_small, "dataset too small to form any trainable batch");
    }
    result.epoch_mean_loss.push_back(loss_sum / static_cast<double>(batches));
  }
  return result;
}

std::size_t rank_from_distances(const std::vector<double>& distances, std::size_t target_index) {
  if (distances.empty()) {
    throw Error(Errc::empty_candidates, "candidate list is empty");
  }
  if (target_index >= distances.size()) {
    throw Error(Errc::empty_candidates, "target index out of candidate range");
  }
  const double target = distances[target_index];
  std::size_t rank = 1;
  for (std::size_t i = 0; i < distances.size(); ++i) {
    if (i == target_index) continue;
    if (distances[i] <= target) ++rank;  // ties count against the target
  }
  return rank;
}

std::size_t rank_products(const std::vector<MolGraph>& reactant_graphs,
                          const std::vector<std::vector<MolGraph>>& candidate_products,
                          std::size_t target_index, const FeatureVocab& vocab,
                          const EncoderParams& params) {
  if (candidate_products.empty()) {
    throw Error(Errc::empty_candidates, "candidate list is empty");
  }
  const Tensor reactant_sum = encode_molecule_set(reactant_graphs, vocab, params);
  std::vector<double> distances(candidate_products.size());
  for (std::size_t c = 0; c < candidate_products.size(); ++c) {
    const Tensor candidate = encode_molecule_set(candidate_products[c], vocab, params);
    distances[c] = reaction_score(reactant_sum, candidate).value();
  }
  return rank_from_distances(distances, target_index);
}

RankingResult ranking_metrics(const std::vector<std::size_t>& ranks) {
  if (ranks.empty()) {
    throw Error(Errc::empty_input, "no ranks to aggregate");
  }
  RankingResult r;
  r.ranks = ranks;
  const auto n = static_cast<double>(ranks.size());
  for (std::size_t rank : ranks) {
    r.mrr += 1.0 / static_cast<double>(rank);
    r.mr += static_cast<double>(rank);
    r.hit1 += rank <= 1 ? 1.0 : 0.0;
    r.hit3 += rank <= 3 ? 1.0 : 0.0;
    r.hit5 += rank <= 5 ? 1.0 : 0.0;
    r.hit10 += rank <= 10 ? 1.0 : 0.0;
  }
  r.mrr /= n;
  r.mr /= n;
  r.hit1 /= n;
  r.hit3 /= n;
  r.hit5 /= n;
  r.hit10 /= n;
  return r;
}

std::vector<Neighbor> nearest_molecules(const MolGraph& query,
                                        const std::vector<MolGraph>& references, std::size_t k,
                                        const FeatureVocab& vocab, const EncoderParams& params) {
  const Tensor q = encode_graph(query, vocab, params);
  std::vector<Neighbor> neighbors(references.size());
  for (std::size_t i = 0; i < references.size(); ++i) {
    const Tensor r = encode_graph(references[i], vocab, params);
    neighbors[i] = Neighbor{i, 1.0 - cosine_similarity(q, r).value()};
  }
  std::sort(neighbors.begin(), neighbors.end(), [](const Neighbor& a, const Neighbor& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.index < b.index;
  });
  if (neighbors.size() > k) neighbors.resize(k);
  return neighbors;
}

}  // namespace molkd
