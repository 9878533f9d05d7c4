#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace molkd {

enum class Errc {
  // SMILES / reaction parsing
  unclosed_ring,
  unbalanced_paren,
  unknown_element,
  malformed_bracket_atom,
  empty_input,
  bad_column_count,
  yield_out_of_range,
  // featurization
  empty_corpus,
  unseen_value,
  vocab_mismatch,
  // tensor engine
  shape_mismatch,
  dim_mismatch,
  non_finite_value,
  tape_reuse,
  // training / evaluation
  empty_set,
  batch_too_small,
  empty_candidates,
  empty_dataset,
  single_class,
  label_out_of_domain,
  beta_out_of_range,
  // persistence / config
  bad_magic,
  truncated_payload,
  io_error,
  bad_config,
};

/// Library-wide exception. `offset` is the byte offset of the fault for
/// parse errors, -1 otherwise.
class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message, std::ptrdiff_t offset = -1)
      : std::runtime_error(std::move(message)), code_(code), offset_(offset) {}

  Errc code() const noexcept { return code_; }
  std::ptrdiff_t offset() const noexcept { return offset_; }

 private:
  Errc code_;
  std::ptrdiff_t offset_;
};

}  // namespace molkd
