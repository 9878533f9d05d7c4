#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "molkd/error.hpp"

namespace molkd {

class Tape;

/// Dense row-major 64-bit float tensor. A tensor is either free-standing or
/// attached to a gradient tape; ops on attached tensors record backward
/// rules, ops on free tensors just compute values.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape);
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);
  static Tensor scalar(double value);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  std::size_t rank() const { return shape_.size(); }
  std::size_t rows() const;
  std::size_t cols() const;

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }
  double& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }

  /// Scalar extraction; requires size() == 1.
  double value() const;

  bool on_tape() const { return tape_ != nullptr; }
  Tape* tape() const { return tape_; }
  std::ptrdiff_t node() const { return node_; }

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
  Tape* tape_ = nullptr;
  std::ptrdiff_t node_ = -1;
  friend class Tape;
};

/// Append-only reverse-mode gradient tape. Topological order is append
/// order; backward() traverses in reverse exactly once and then locks the
/// tape (a second backward raises TapeReuse).
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Leaf with gradient accumulation.
  Tensor param(Tensor value);
  std::vector<Tensor> params(const std::vector<Tensor>& values);
  /// Leaf without gradient accumulation.
  Tensor constant(Tensor value);

  void backward(const Tensor& scalar_loss);
  bool backward_done() const { return backward_done_; }
  Tensor grad(const Tensor& t) const;

  /// Sign bits of every relu input and every norm-at-zero decision recorded
  /// during forward, in append order. Two evaluations of the same function
  /// whose signatures differ straddle a kink.
  const std::vector<std::uint8_t>& kink_signature() const { return kink_signature_; }

  std::size_t node_count() const { return nodes_.size(); }

 private:
  enum class Op : std::uint8_t {
    leaf,
    matmul,
    add,
    sub,
    mul,
    scalar_mul,
    add_scalar,
    add_rowvec,
    relu,
    sum_rows,
    sum_all,
    l2_norm,
    cosine,
    logsumexp,
    log_ew,
    exp_ew,
    concat_rows,
    row,
  };

  struct Node {
    Op op;
    std::vector<std::ptrdiff_t> parents;
    Tensor value;  // forward output (detached copy)
    Tensor grad;   // lazily sized on backward
    double aux = 0.0;
    bool requires_grad = false;
  };

  std::vector<Node> nodes_;
  std::vector<std::uint8_t> kink_signature_;
  bool backward_done_ = false;

  std::ptrdiff_t push(Op op, std::vector<std::ptrdiff_t> parents, Tensor value, double aux,
                      bool requires_grad);
  Tensor wrap(std::ptrdiff_t node) const;
  std::ptrdiff_t adopt(const Tensor& t);  // constant-wrap free tensors
  void accumulate(std::ptrdiff_t node, const Tensor& g);
  void backprop_node(std::size_t index);

  friend Tensor matmul(const Tensor&, const Tensor&);
  friend Tensor add(const Tensor&, const Tensor&);
  friend Tensor sub(const Tensor&, const Tensor&);
  friend Tensor mul(const Tensor&, const Tensor&);
  friend Tensor scalar_mul(const Tensor&, double);
  friend Tensor add_scalar(const Tensor&, double);
  friend Tensor add_rowvec(const Tensor&, const Tensor&);
  friend Tensor relu(const Tensor&);
  friend Tensor sum_rows(const Tensor&);
  friend Tensor sum_all(const Tensor&);
  friend Tensor l2_norm(const Tensor&);
  friend Tensor cosine_similarity(const Tensor&, const Tensor&);
  friend Tensor logsumexp(const Tensor&);
  friend Tensor log_elementwise(const Tensor&);
  friend Tensor exp_elementwise(const Tensor&);
  friend Tensor concat_rows(const std::vector<Tensor>&);
  friend Tensor row(const Tensor&, std::size_t);
};

// Op suite. Each op dispatches on whether an operand is tape-attached; mixed
// operands adopt the free one as a constant on the attached one's tape.
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);  // elementwise
Tensor scalar_mul(const Tensor& a, double c);
Tensor add_scalar(const Tensor& a, double c);
Tensor add_rowvec(const Tensor& a, const Tensor& rowvec);  // broadcast over rows
Tensor relu(const Tensor& a);
Tensor sum_rows(const Tensor& a);  // {m,n} -> {1,n}, adds the rows together
Tensor sum_all(const Tensor& a);   // -> {1,1}
/// Euclidean norm over all entries; 0 at the zero tensor with zero subgradient.
Tensor l2_norm(const Tensor& a);
/// Cosine similarity over all entries; 0 when either operand is the zero
/// tensor (zero gradient there).
Tensor cosine_similarity(const Tensor& a, const Tensor& b);
Tensor logsumexp(const Tensor& a);  // over all entries, max-shifted
Tensor log_elementwise(const Tensor& a);
Tensor exp_elementwise(const Tensor& a);
Tensor concat_rows(const std::vector<Tensor>& parts);
Tensor row(const Tensor& a, std::size_t index);  // {m,n} -> {1,n}

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Per-parameter first/second moment buffers plus the shared step counter.
class AdamState {
 public:
  AdamState(const std::vector<Tensor>& params, AdamConfig config);

  const AdamConfig& config() const { return config_; }
  std::int64_t step_count() const { return step_; }

  friend void adam_step(std::vector<Tensor>& params, const std::vector<Tensor>& grads,
                        AdamState& state);

 private:
  AdamConfig config_;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
  std::int64_t step_ = 0;
};

/// Standard Adam update with bias correction; deterministic given inputs.
void adam_step(std::vector<Tensor>& params, const std::vector<Tensor>& grads, AdamState& state);

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::vector<std::size_t> skipped;  // coordinates straddling a kink
};

/// Central-difference check of the analytic gradient of a scalar-valued
/// function. Per coordinate: |analytic - central| / max(1, |central|).
/// Coordinates whose two perturbed evaluations disagree on any relu/norm
/// sign are reported in `skipped` rather than failed. Raises NonFiniteValue
/// if any evaluation is not finite.
GradCheckResult grad_check(const std::function<Tensor(Tape&, const Tensor&)>& f, const Tensor& x,
                           double h);

/// Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) matrix from a seeded PRNG.
Tensor init_uniform(std::size_t rows, std::size_t cols, std::uint64_t& rng_state);

/// SplitMix64 step; the library-wide deterministic PRNG primitive.
std::uint64_t splitmix64(std::uint64_t& state);
/// Uniform double in [0, 1).
double uniform01(std::uint64_t& state);

}  // namespace molkd
