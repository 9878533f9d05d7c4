#include "molkd/encoder.hpp"

#include <cmath>

namespace molkd {

std::string arch_name(Arch arch) {
  switch (arch) {
    case Arch::TAG: return "TAG";
    case Arch::GCN: return "GCN";
    case Arch::GIN: return "GIN";
  }
  return "TAG";
}

Arch arch_from_name(const std::string& name) {
  if (name == "TAG") return Arch::TAG;
  if (name == "GCN") return Arch::GCN;
  if (name == "GIN") return Arch::GIN;
  throw Error(Errc::bad_config, "unknown encoder architecture '" + name + "'");
}

int weights_per_layer(Arch arch, int hops) {
  switch (arch) {
    case Arch::TAG: return hops + 1;
    case Arch::GCN: return 1;
    case Arch::GIN: return 2;
  }
  return 1;
}

EncoderParams init_encoder_params(Arch arch, std::vector<int> dims, int hops,
                                  std::uint64_t seed) {
  if (dims.size() < 2) {
    throw Error(Errc::dim_mismatch, "encoder needs at least input and output dims");
  }
  EncoderParams params;
  params.arch = arch;
  params.layers = static_cast<int>(dims.size()) - 1;
  params.hops = hops;
  params.dims = std::move(dims);

  std::uint64_t rng = seed;
  const int per_layer = weights_per_layer(arch, hops);
  for (int l = 0; l < params.layers; ++l) {
    const auto d_in = static_cast<std::size_t>(params.dims[l]);
    const auto d_out = static_cast<std::size_t>(params.dims[l + 1]);
    for (int k = 0; k < per_layer; ++k) {
      const bool second_gin = arch == Arch::GIN && k == 1;
      params.weights.push_back(second_gin ? init_uniform(d_out, d_out, rng)
                                          : init_uniform(d_in, d_out, rng));
    }
  }
  return params;
}

Tensor normalized_adjacency(const MolGraph& g) {
  const std::size_t n = g.atoms.size();
  if (n == 0) throw Error(Errc::empty_set, "cannot build adjacency of an empty graph");
  Tensor a({n, n});
  for (std::size_t i = 0; i < n; ++i) a.at(i, i) = 1.0;
  for (const Bond& b : g.bonds) {
    a.at(b.a, b.b) = 1.0;
    a.at(b.b, b.a) = 1.0;
  }
  std::vector<double> inv_sqrt_degree(n);
  for (std::size_t i = 0; i < n; ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < n; ++j) d += a.at(i, j);
    inv_sqrt_degree[i] = 1.0 / std::sqrt(d);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      a.at(i, j) *= inv_sqrt_degree[i] * inv_sqrt_degree[j];
    }
  }
  return a;
}

namespace {

Tensor self_loop_adjacency(const MolGraph& g) {
  const std::size_t n = g.atoms.size();
  Tensor a({n, n});
  for (std::size_t i = 0; i < n; ++i) a.at(i, i) = 1.0;
  for (const Bond& b : g.bonds) {
    a.at(b.a, b.b) = 1.0;
    a.at(b.b, b.a) = 1.0;
  }
  return a;
}

}  // namespace

Tensor structure_matrix(const MolGraph& g, Arch arch) {
  return arch == Arch::GIN ? self_loop_adjacency(g) : normalized_adjacency(g);
}

Tensor encode_nodes(const Tensor& features, const Tensor& structure, const EncoderParams& meta,
                    const std::vector<Tensor>& weights) {
  if (features.cols() != static_cast<std::size_t>(meta.input_dim())) {
    throw Error(Errc::dim_mismatch, "feature dim does not match encoder input dim");
  }
  const int per_layer = weights_per_layer(meta.arch, meta.hops);
  if (weights.size() != static_cast<std::size_t>(per_layer * meta.layers)) {
    throw Error(Errc::dim_mismatch, "weight count does not match architecture");
  }

  Tensor h = features;
  for (int l = 0; l < meta.layers; ++l) {
    const std::size_t base = static_cast<std::size_t>(l * per_layer);
    Tensor out;
    switch (meta.arch) {
      case Arch::TAG: {
        Tensor power = h;  // structure^k h, k ascending
        out = matmul(power, weights[base]);
        for (int k = 1; k <= meta.hops; ++k) {
          power = matmul(structure, power);
          out = add(out, matmul(power, weights[base + static_cast<std::size_t>(k)]));
        }
        break;
      }
      case Arch::GCN: {
        out = matmul(matmul(structure, h), weights[base]);
        break;
      }
      case Arch::GIN: {
        Tensor aggregated = matmul(structure, h);
        out = matmul(relu(matmul(aggregated, weights[base])), weights[base + 1]);
        break;
      }
    }
    h = (l + 1 < meta.layers) ? relu(out) : out;
  }
  return h;
}

Tensor encode_graph_with(const MolGraph& g, const FeatureVocab& vocab, const EncoderParams& meta,
                         const std::vector<Tensor>& weights) {
  const Tensor features = graph_features(g, vocab);
  const Tensor structure = structure_matrix(g, meta.arch);
  return sum_rows(encode_nodes(features, structure, meta, weights));
}

Tensor encode_graph(const MolGraph& g, const FeatureVocab& vocab, const EncoderParams& params) {
  return encode_graph_with(g, vocab, params, params.weights);
}

Tensor encode_graph_node_embeddings(const MolGraph& g, const FeatureVocab& vocab,
                                    const EncoderParams& params) {
  const Tensor features = graph_features(g, vocab);
  const Tensor structure = structure_matrix(g, params.arch);
  return encode_nodes(features, structure, params, params.weights);
}

Tensor encode_molecule_set(const std::vector<MolGraph>& graphs, const FeatureVocab& vocab,
                           const EncoderParams& params) {
  if (graphs.empty()) {
    throw Error(Errc::empty_set, "encode_molecule_set over an empty set");
  }
  Tensor sum = encode_graph(graphs[0], vocab, params);
  for (std::size_t i = 1; i < graphs.size(); ++i) {
    sum = add(sum, encode_graph(graphs[i], vocab, params));
  }
  return sum;
}

GraphBatch make_batch(const std::vector<MolGraph>& graphs, const FeatureVocab& vocab, Arch arch) {
  if (graphs.empty()) {
    throw Error(Errc::empty_set, "cannot batch an empty graph list");
  }
  GraphBatch batch;
  batch.offsets.push_back(0);
  std::size_t total = 0;
  for (const MolGraph& g : graphs) {
    total += g.atoms.size();
    batch.offsets.push_back(total);
  }
  batch.features = Tensor({total, vocab.total_dim()});
  batch.structure = Tensor({total, total});
  for (std::size_t b = 0; b < graphs.size(); ++b) {
    const std::size_t at = batch.offsets[b];
    const Tensor f = graph_features(graphs[b], vocab);
    const Tensor s = structure_matrix(graphs[b], arch);
    const std::size_t n = graphs[b].atoms.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < f.cols(); ++j) {
        batch.features.at(at + i, j) = f.at(i, j);
      }
      for (std::size_t j = 0; j < n; ++j) {
        batch.structure.at(at + i, at + j) = s.at(i, j);
      }
    }
  }
  return batch;
}

Tensor encode_batch(const GraphBatch& batch, const EncoderParams& meta,
                    const std::vector<Tensor>& weights) {
  const Tensor nodes = encode_nodes(batch.features, batch.structure, meta, weights);
  const std::size_t b_count = batch.offsets.size() - 1;
  // 0/1 selector rows reproduce the per-graph sum readout, in row order.
  Tensor selector({b_count, nodes.rows()});
  for (std::size_t b = 0; b < b_count; ++b) {
    for (std::size_t i = batch.offsets[b]; i < batch.offsets[b + 1]; ++i) {
      selector.at(b, i) = 1.0;
    }
  }
  return matmul(selector, nodes);
}

}  // namespace molkd
