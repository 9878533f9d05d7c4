#include "molkd/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "molkd/error.hpp"

namespace molkd {

double auc_roc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) {
    throw Error(Errc::dim_mismatch, "scores and labels differ in length");
  }
  std::size_t n_pos = 0, n_neg = 0;
  for (int l : labels) {
    if (l == 1) {
      ++n_pos;
    } else if (l == 0) {
      ++n_neg;
    } else {
      throw Error(Errc::label_out_of_domain, "classification labels must be 0 or 1");
    }
  }
  if (n_pos == 0 || n_neg == 0) {
    throw Error(Errc::single_class, "AUC needs both classes present");
  }

  // Rank statistic with midranks for ties (0.5 credit per tied pair).
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double pos_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) pos_rank_sum += midrank;
    }
    i = j;
  }
  const double n_pos_d = static_cast<double>(n_pos);
  return (pos_rank_sum - n_pos_d * (n_pos_d + 1.0) / 2.0) /
         (n_pos_d * static_cast<double>(n_neg));
}

double rmse(const std::vector<double>& predictions, const std::vector<double>& labels) {
  if (predictions.empty() || predictions.size() != labels.size()) {
    throw Error(Errc::empty_input, "rmse needs equal non-empty inputs");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double d = predictions[i] - labels[i];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(predictions.size()));
}

double mae(const std::vector<double>& predictions, const std::vector<double>& labels) {
  if (predictions.empty() || predictions.size() != labels.size()) {
    throw Error(Errc::empty_input, "mae needs equal non-empty inputs");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    s += std::abs(predictions[i] - labels[i]);
  }
  return s / static_cast<double>(predictions.size());
}

std::map<int, double> effect_score(const std::function<double(const MolGraph&)>& predictor,
                                   const PerturbationSet& pset) {
  std::map<int, std::vector<std::size_t>> by_level;
  for (std::size_t i = 0; i < pset.pairs.size(); ++i) {
    by_level[pset.pairs[i].level].push_back(i);
  }
  std::map<int, double> deltas;
  for (const auto& [level, indices] : by_level) {
    std::vector<double> p, p_perturbed, q, q_perturbed;
    for (std::size_t i : indices) {
      const PerturbationPair& pair = pset.pairs[i];
      p.push_back(predictor(pair.molecule));
      p_perturbed.push_back(predictor(pair.perturbed));
      q.push_back(pair.property);
      q_perturbed.push_back(pair.perturbed_property);
    }
    deltas[level] = rmse(p, p_perturbed) - rmse(q, q_perturbed);
  }
  return deltas;
}

std::vector<double> atom_weights(const MolGraph& g, const FeatureVocab& vocab,
                                 const EncoderParams& encoder) {
  const Tensor nodes = encode_graph_node_embeddings(g, vocab, encoder);
  const std::size_t n = nodes.rows();
  const std::size_t d = nodes.cols();
  std::vector<double> means(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) means[i] += nodes.at(i, j);
    means[i] /= static_cast<double>(d);
  }
  double max_magnitude = 0.0;
  bool all_equal = true;
  for (std::size_t i = 0; i < n; ++i) {
    max_magnitude = std::max(max_magnitude, std::abs(means[i]));
    all_equal = all_equal && means[i] == means[0];
  }
  if (max_magnitude == 0.0 || (n >= 2 && all_equal)) {
    return std::vector<double>(n, 0.0);
  }
  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i) weights[i] = means[i] / max_magnitude;
  return weights;
}

}  // namespace molkd
