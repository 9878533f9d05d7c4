#pragma once

#include <cstdint>
#include <vector>

#include "molkd/chem.hpp"
#include "molkd/encoder.hpp"
#include "molkd/featurize.hpp"
#include "molkd/ndiff.hpp"

namespace molkd {

struct PretrainConfig {
  double margin = 6.0;          // gamma
  double yield_exponent = 2.0;  // alpha
  int batch_size = 32;
  int epochs = 200;
  int embedding_dim = 64;
  int hidden_dim = 64;
  int layers = 2;
  int hops = 3;
  Arch arch = Arch::TAG;
  AdamConfig adam{1e-3, 0.9, 0.999, 1e-8};
  std::uint64_t seed = 7;

  void validate() const;  // margin > 0, yield_exponent >= 0, batch_size >= 2
  std::vector<int> encoder_dims(int input_dim) const;
};

struct RankingResult {
  std::vector<std::size_t> ranks;  // 1-based
  double mrr = 0.0;
  double mr = 0.0;
  double hit1 = 0.0;
  double hit3 = 0.0;
  double hit5 = 0.0;
  double hit10 = 0.0;
};

/// Reaction fitness score ||sum_r h_r - sum_p h_p||_2 as a differentiable
/// scalar; zero iff the two sums coincide.
Tensor reaction_score(const Tensor& reactant_sum, const Tensor& product_sum);

/// Yield-scaled margin loss over one minibatch of per-reaction embedding
/// sums:
///   L = 1/(|B|(|B|-1)) * sum_i sum_{j != i}
///         max(f(R_i,P_i) - f(R_i,P_j) + y_i^alpha * margin, 0)
/// Only products are corrupted. Requires |B| >= 2.
Tensor gtranse_loss(const std::vector<Tensor>& reactant_sums,
                    const std::vector<Tensor>& product_sums, const std::vector<double>& yields,
                    double margin, double yield_exponent);

/// Record-level form: encodes every molecule with the given weights (attach
/// them to a tape for training) and delegates to gtranse_loss.
Tensor gtranse_batch_loss(const std::vector<ReactionRecord>& batch, const FeatureVocab& vocab,
                          const EncoderParams& meta, const std::vector<Tensor>& weights,
                          const PretrainConfig& cfg);

struct PretrainResult {
  EncoderParams params;
  FeatureVocab vocab;
  std::vector<double> epoch_mean_loss;
};

/// Seeded pre-training loop: builds the shared vocabulary (UNK enabled),
/// shuffles per epoch, drops a trailing batch shorter than 2, and applies
/// Adam updates. Deterministic for a fixed seed; epochs = 0 returns the
/// seeded initialization untouched.
PretrainResult run_pretrain(const std::vector<ReactionRecord>& dataset,
                            const PretrainConfig& cfg);

/// Pessimistic 1-based rank of the target among candidates by distance:
/// ties with other candidates count against the target.
std::size_t rank_from_distances(const std::vector<double>& distances, std::size_t target_index);

/// Rank the target product set among candidate product sets by L2 distance
/// to the reactant embedding sum.
std::size_t rank_products(const std::vector<MolGraph>& reactant_graphs,
                          const std::vector<std::vector<MolGraph>>& candidate_products,
                          std::size_t target_index, const FeatureVocab& vocab,
                          const EncoderParams& params);

RankingResult ranking_metrics(const std::vector<std::size_t>& ranks);

struct Neighbor {
  std::size_t index = 0;
  double distance = 0.0;
};

/// k nearest references by cosine distance 1 - cos(u, v), ascending, ties in
/// reference-index order. A zero embedding is at distance 1 from everything.
std::vector<Neighbor> nearest_molecules(const MolGraph& query,
                                        const std::vector<MolGraph>& references, std::size_t k,
                                        const FeatureVocab& vocab, const EncoderParams& params);

}  // namespace molkd
