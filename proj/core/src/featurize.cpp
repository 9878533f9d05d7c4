#include "molkd/featurize.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"
#include "molkd/ndiff.hpp"

namespace molkd {

namespace {

int numeric_value(AtomProperty p, const AtomRecord& atom) {
  switch (p) {
    case AtomProperty::aromatic: return atom.aromatic ? 1 : 0;
    case AtomProperty::mass_bucket: return atom.mass_bucket;
    case AtomProperty::implicit_h: return atom.implicit_h_at_parse;
    case AtomProperty::charge: return atom.charge;
    case AtomProperty::class_id: return atom.class_id;
    default: throw Error(Errc::unseen_value, "element is not a numeric property");
  }
}

const char* property_name(int i) {
  static const char* names[kAtomPropertyCount] = {"element",    "aromatic", "mass_bucket",
                                                  "implicit_h", "charge",   "class_id"};
  return names[i];
}

}  // namespace

FeatureVocab::FeatureVocab(std::vector<std::string> element_values,
                           std::array<std::vector<int>, 5> numeric_values,
                           std::array<bool, kAtomPropertyCount> unk)
    : element_values_(std::move(element_values)),
      numeric_values_(std::move(numeric_values)),
      unk_(unk) {
  rebuild_index();
}

void FeatureVocab::rebuild_index() {
  element_index_.clear();
  for (std::size_t i = 0; i < element_values_.size(); ++i) {
    element_index_[element_values_[i]] = i;
  }
  for (int p = 0; p < 5; ++p) {
    numeric_index_[p].clear();
    for (std::size_t i = 0; i < numeric_values_[p].size(); ++i) {
      numeric_index_[p][numeric_values_[p][i]] = i;
    }
  }
  total_dim_ = 0;
  for (std::size_t s : block_sizes()) total_dim_ += s;
}

std::array<std::size_t, kAtomPropertyCount> FeatureVocab::block_sizes() const {
  std::array<std::size_t, kAtomPropertyCount> sizes{};
  sizes[0] = element_values_.size() + (unk_[0] ? 1 : 0);
  for (int p = 1; p < kAtomPropertyCount; ++p) {
    sizes[p] = numeric_values_[p - 1].size() + (unk_[p] ? 1 : 0);
  }
  return sizes;
}

std::size_t FeatureVocab::block_offset(AtomProperty p) const {
  const auto sizes = block_sizes();
  std::size_t offset = 0;
  for (int i = 0; i < static_cast<int>(p); ++i) offset += sizes[i];
  return offset;
}

const std::vector<int>& FeatureVocab::numeric_values(AtomProperty p) const {
  if (p == AtomProperty::element) {
    throw Error(Errc::unseen_value, "element block holds strings, not numbers");
  }
  return numeric_values_[static_cast<int>(p) - 1];
}

std::size_t FeatureVocab::feature_index(AtomProperty p, const AtomRecord& atom) const {
  const int pi = static_cast<int>(p);
  const std::size_t offset = block_offset(p);
  std::size_t local;
  bool found;
  if (p == AtomProperty::element) {
    auto it = element_index_.find(atom.element);
    found = it != element_index_.end();
    local = found ? it->second : element_values_.size();
  } else {
    const auto& index = numeric_index_[pi - 1];
    auto it = index.find(numeric_value(p, atom));
    found = it != index.end();
    local = found ? it->second : numeric_values_[pi - 1].size();
  }
  if (!found && !unk_[pi]) {
    throw Error(Errc::unseen_value,
                std::string("unseen ") + property_name(pi) + " value with UNK disabled");
  }
  return offset + local;  // the UNK slot is the extra trailing index
}

bool FeatureVocab::operator==(const FeatureVocab& other) const {
  return element_values_ == other.element_values_ && numeric_values_ == other.numeric_values_ &&
         unk_ == other.unk_;
}

std::string FeatureVocab::to_json() const {
  nlohmann::json j;
  j["element"] = element_values_;
  for (int p = 1; p < kAtomPropertyCount; ++p) {
    j[property_name(p)] = numeric_values_[p - 1];
  }
  nlohmann::json unk;
  for (int p = 0; p < kAtomPropertyCount; ++p) {
    unk[property_name(p)] = unk_[p];
  }
  j["unk"] = unk;
  return j.dump();
}

FeatureVocab FeatureVocab::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    throw Error(Errc::bad_config, "vocabulary JSON is malformed");
  }
  std::vector<std::string> element = j.at("element").get<std::vector<std::string>>();
  std::array<std::vector<int>, 5> numeric;
  for (int p = 1; p < kAtomPropertyCount; ++p) {
    numeric[p - 1] = j.at(property_name(p)).get<std::vector<int>>();
  }
  std::array<bool, kAtomPropertyCount> unk{};
  for (int p = 0; p < kAtomPropertyCount; ++p) {
    unk[p] = j.at("unk").at(property_name(p)).get<bool>();
  }
  return FeatureVocab(std::move(element), std::move(numeric), unk);
}

FeatureVocab build_vocab(const std::vector<MolGraph>& graphs, bool unk) {
  if (graphs.empty()) {
    throw Error(Errc::empty_corpus, "cannot build a vocabulary from an empty corpus");
  }
  std::set<std::string> elements;
  std::array<std::set<int>, 5> numeric;
  for (const MolGraph& g : graphs) {
    for (const AtomRecord& atom : g.atoms) {
      elements.insert(atom.element);
      for (int p = 1; p < kAtomPropertyCount; ++p) {
        numeric[p - 1].insert(numeric_value(static_cast<AtomProperty>(p), atom));
      }
    }
  }
  std::array<std::vector<int>, 5> numeric_sorted;
  for (int p = 0; p < 5; ++p) {
    numeric_sorted[p].assign(numeric[p].begin(), numeric[p].end());
  }
  std::array<bool, kAtomPropertyCount> unk_flags{};
  unk_flags.fill(unk);
  return FeatureVocab(std::vector<std::string>(elements.begin(), elements.end()),
                      std::move(numeric_sorted), unk_flags);
}

Tensor graph_features(const MolGraph& g, const FeatureVocab& vocab) {
  Tensor features({g.atoms.size(), vocab.total_dim()});
  for (std::size_t i = 0; i < g.atoms.size(); ++i) {
    for (int p = 0; p < kAtomPropertyCount; ++p) {
      const std::size_t col = vocab.feature_index(static_cast<AtomProperty>(p), g.atoms[i]);
      features.at(i, col) = 1.0;
    }
  }
  return features;
}

}  // namespace molkd
