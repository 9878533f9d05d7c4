#pragma once

#include <functional>
#include <map>
#include <vector>

#include "molkd/chem.hpp"
#include "molkd/encoder.hpp"
#include "molkd/featurize.hpp"

namespace molkd {

/// Mann-Whitney AUC: (wins + 0.5 * ties) / (n_pos * n_neg) over all
/// positive-negative score pairs. Requires both classes present.
double auc_roc(const std::vector<double>& scores, const std::vector<int>& labels);

double rmse(const std::vector<double>& predictions, const std::vector<double>& labels);
double mae(const std::vector<double>& predictions, const std::vector<double>& labels);

struct PerturbationPair {
  MolGraph molecule;
  MolGraph perturbed;
  double property = 0.0;
  double perturbed_property = 0.0;
  int level = 1;  // 1, 2, or 3
};

struct PerturbationSet {
  std::vector<PerturbationPair> pairs;
};

/// Perturbation effect score per level: with P = f(M), P' = f(M'),
/// delta = rmse(P, P') - rmse(Q, Q'). May be negative.
std::map<int, double> effect_score(const std::function<double(const MolGraph&)>& predictor,
                                   const PerturbationSet& pset);

/// Per-atom interpretation weights in [-1, 1]: the mean over the last-layer
/// hidden dimensions of each atom, rescaled so the largest magnitude maps
/// to 1. Degenerate inputs (all means zero, or several atoms with no
/// contrast between them) map to all-zero weights; a single atom keeps its
/// sign. The rule is intentionally isolated here so it can be swapped out.
std::vector<double> atom_weights(const MolGraph& g, const FeatureVocab& vocab,
                                 const EncoderParams& encoder);

}  // namespace molkd
