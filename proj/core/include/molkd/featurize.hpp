#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "molkd/chem.hpp"

namespace molkd {

class Tensor;

/// The six atom properties, in feature-block order.
enum class AtomProperty : int {
  element = 0,
  aromatic = 1,
  mass_bucket = 2,
  implicit_h = 3,  // count at parse time; hydrogen nodes carry 0
  charge = 4,
  class_id = 5,
};
inline constexpr int kAtomPropertyCount = 6;

/// Frozen categorical vocabulary over the six atom properties. Features are
/// the concatenation of six one-hot blocks; block index ranges are disjoint
/// and contiguous in the property order above.
class FeatureVocab {
 public:
  FeatureVocab() = default;

  /// Values per block, in index order. `element` holds symbols; the other
  /// five blocks hold integers (aromatic as 0/1).
  FeatureVocab(std::vector<std::string> element_values,
               std::array<std::vector<int>, 5> numeric_values,
               std::array<bool, kAtomPropertyCount> unk);

  std::size_t total_dim() const { return total_dim_; }
  std::array<std::size_t, kAtomPropertyCount> block_sizes() const;  // incl UNK slot
  std::size_t block_offset(AtomProperty p) const;
  bool unk_enabled(AtomProperty p) const { return unk_[static_cast<int>(p)]; }

  const std::vector<std::string>& element_values() const { return element_values_; }
  const std::vector<int>& numeric_values(AtomProperty p) const;

  /// Column index within the full feature vector for an atom's value of
  /// property `p`; the UNK slot when enabled and unseen, otherwise throws
  /// UnseenValue.
  std::size_t feature_index(AtomProperty p, const AtomRecord& atom) const;

  std::string to_json() const;
  static FeatureVocab from_json(const std::string& text);

  bool operator==(const FeatureVocab& other) const;

 private:
  std::vector<std::string> element_values_;
  std::array<std::vector<int>, 5> numeric_values_;  // aromatic, mass, implicit_h, charge, class
  std::array<bool, kAtomPropertyCount> unk_{};
  std::unordered_map<std::string, std::size_t> element_index_;
  std::array<std::unordered_map<int, std::size_t>, 5> numeric_index_;
  std::size_t total_dim_ = 0;

  void rebuild_index();
};

/// Build a vocabulary over every atom of the given graphs. Values are sorted
/// deterministically (lexical for element, numeric otherwise) so the result
/// is invariant to corpus ordering.
FeatureVocab build_vocab(const std::vector<MolGraph>& graphs, bool unk);

/// N x total_dim one-hot matrix; row i encodes atom i. Requires a
/// hydrogen-explicit graph.
Tensor graph_features(const MolGraph& g, const FeatureVocab& vocab);

}  // namespace molkd
