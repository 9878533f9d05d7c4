#pragma once

#include <map>
#include <string>
#include <vector>

#include "molkd/chem.hpp"
#include "molkd/distill.hpp"
#include "molkd/encoder.hpp"
#include "molkd/evalkit.hpp"
#include "molkd/featurize.hpp"

namespace molkd::io {

/// Reaction TSV: one reaction per line, `reactants<TAB>products<TAB>yield`;
/// "#" lines and blank lines are skipped. Raises EmptyDataset when nothing
/// remains.
std::vector<ReactionRecord> load_reactions_tsv(const std::string& path);

/// Property CSV: header `smiles,label[,label2,...]`; empty cells are missing
/// labels (NaN). Molecules are parsed and hydrogen-explicitized.
PropertyDataset load_property_csv(const std::string& path, TaskKind kind);

/// One 0-based row index per line; "#" lines skipped; indices must be < max.
std::vector<std::size_t> load_split_indices(const std::string& path, std::size_t max);

/// Perturbation CSV with header
/// `smiles,property,perturbed_smiles,perturbed_property,level`.
PerturbationSet load_perturbation_csv(const std::string& path);

/// Flat `key = value` config file; "#" comments and blank lines ignored.
std::map<std::string, std::string> load_config_file(const std::string& path);

/// Write via a temp file in the same directory plus rename, so failures
/// never leave a partial output behind.
void atomic_write(const std::string& path, const std::string& bytes);

std::string read_file(const std::string& path);

// ---------------------------------------------------------------------------
// Checkpoints
//
// Layout: 6 magic bytes "MOLKD1", a 4-byte little-endian unsigned manifest
// length, the UTF-8 JSON manifest, then the weight payload: row-major
// little-endian 64-bit floats, tensors in manifest order. Round-trips are
// bitwise exact.
// ---------------------------------------------------------------------------

struct TeacherModel {
  EncoderParams params;
  FeatureVocab vocab;
  std::map<std::string, std::string> config_echo;
};

struct PredictorModel {
  Predictor predictor;
  std::map<std::string, std::string> config_echo;
};

void save_teacher(const std::string& path, const TeacherModel& model);
TeacherModel load_teacher(const std::string& path);

void save_predictor(const std::string& path, const PredictorModel& model);
PredictorModel load_predictor(const std::string& path);

/// "teacher" or "predictor" from the manifest, without loading the payload.
std::string checkpoint_kind(const std::string& path);

}  // namespace molkd::io
