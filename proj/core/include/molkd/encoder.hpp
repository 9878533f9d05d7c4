#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "molkd/chem.hpp"
#include "molkd/featurize.hpp"
#include "molkd/ndiff.hpp"

namespace molkd {

enum class Arch : std::uint8_t { TAG, GCN, GIN };

std::string arch_name(Arch arch);
Arch arch_from_name(const std::string& name);

/// Weights of a message-passing graph encoder with sum readout.
///
/// Layer l maps dims[l] -> dims[l+1]. Per layer, TAG holds hops+1 weight
/// matrices (one per propagation power), GCN holds one, GIN holds the two
/// matrices of its update perceptron. relu between layers, nothing after the
/// final layer.
struct EncoderParams {
  Arch arch = Arch::TAG;
  int layers = 2;
  int hops = 3;  // TAG propagation depth per layer
  std::vector<int> dims;  // layers + 1 entries
  std::vector<Tensor> weights;

  int input_dim() const { return dims.front(); }
  int output_dim() const { return dims.back(); }
};

int weights_per_layer(Arch arch, int hops);

/// Seeded uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) initialization.
EncoderParams init_encoder_params(Arch arch, std::vector<int> dims, int hops,
                                  std::uint64_t seed);

/// Symmetric normalized adjacency with self-loops:
/// D^(-1/2) (A + I) D^(-1/2), dense {n, n}.
Tensor normalized_adjacency(const MolGraph& g);

/// The propagation matrix the architecture consumes: normalized adjacency
/// for TAG/GCN, unnormalized A + I for GIN (epsilon = 0 sum aggregation).
Tensor structure_matrix(const MolGraph& g, Arch arch);

/// Final-layer node embeddings {n, output_dim}. `weights` may be
/// tape-attached copies of params.weights for training.
Tensor encode_nodes(const Tensor& features, const Tensor& structure, const EncoderParams& meta,
                    const std::vector<Tensor>& weights);

/// Graph embedding {1, output_dim}: encode_nodes followed by sum readout.
Tensor encode_graph(const MolGraph& g, const FeatureVocab& vocab, const EncoderParams& params);

/// Training-path variant with caller-supplied (typically tape-attached) weights.
Tensor encode_graph_with(const MolGraph& g, const FeatureVocab& vocab, const EncoderParams& meta,
                         const std::vector<Tensor>& weights);

/// Final-layer node embeddings of one graph (inference path).
Tensor encode_graph_node_embeddings(const MolGraph& g, const FeatureVocab& vocab,
                                    const EncoderParams& params);

/// Elementwise sum of encode_graph over a non-empty molecule set.
Tensor encode_molecule_set(const std::vector<MolGraph>& graphs, const FeatureVocab& vocab,
                           const EncoderParams& params);

/// Concatenated features, per-graph row offsets, and the block-diagonal
/// structure matrix for batched execution.
struct GraphBatch {
  Tensor features;                    // {sum n_i, feature_dim}
  Tensor structure;                   // block-diagonal {sum n_i, sum n_i}
  std::vector<std::size_t> offsets;   // size B+1, offsets[0] = 0
};

GraphBatch make_batch(const std::vector<MolGraph>& graphs, const FeatureVocab& vocab, Arch arch);

/// Per-graph embeddings {B, output_dim} of a batch; row b equals the
/// stand-alone embedding of graph b.
Tensor encode_batch(const GraphBatch& batch, const EncoderParams& meta,
                    const std::vector<Tensor>& weights);

}  // namespace molkd
