#include "molkd/ndiff.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace molkd {

namespace {

std::size_t shape_size(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t e : shape) {
    if (e == 0) throw Error(Errc::shape_mismatch, "zero extent in tensor shape");
    n *= e;
  }
  return shape.empty() ? 0 : n;
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(Errc::shape_mismatch, what);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(shape_size(shape_), 0.0) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_size(shape_) != data_.size()) {
    throw Error(Errc::shape_mismatch, "data length does not match shape");
  }
}

Tensor Tensor::scalar(double value) { return Tensor({1, 1}, {value}); }

std::size_t Tensor::rows() const {
  if (rank() == 2) return shape_[0];
  if (rank() == 1) return 1;
  throw Error(Errc::shape_mismatch, "rows() requires rank 1 or 2");
}

std::size_t Tensor::cols() const {
  if (rank() == 2) return shape_[1];
  if (rank() == 1) return shape_[0];
  throw Error(Errc::shape_mismatch, "cols() requires rank 1 or 2");
}

double Tensor::value() const {
  if (size() != 1) throw Error(Errc::shape_mismatch, "value() requires a single-element tensor");
  return data_[0];
}

// ---------------------------------------------------------------------------
// Tape
// ---------------------------------------------------------------------------

std::ptrdiff_t Tape::push(Op op, std::vector<std::ptrdiff_t> parents, Tensor value, double aux,
                          bool requires_grad) {
  if (backward_done_) {
    throw Error(Errc::tape_reuse, "tape already consumed by backward()");
  }
  Node node;
  node.op = op;
  node.parents = std::move(parents);
  node.value = std::move(value);
  node.value.tape_ = nullptr;
  node.value.node_ = -1;
  node.aux = aux;
  if (op == Op::leaf) {
    node.requires_grad = requires_grad;
  } else {
    node.requires_grad = false;
    for (std::ptrdiff_t p : node.parents) {
      node.requires_grad = node.requires_grad || nodes_[static_cast<std::size_t>(p)].requires_grad;
    }
  }
  nodes_.push_back(std::move(node));
  return static_cast<std::ptrdiff_t>(nodes_.size()) - 1;
}

Tensor Tape::wrap(std::ptrdiff_t node) const {
  Tensor t = nodes_[static_cast<std::size_t>(node)].value;
  t.tape_ = const_cast<Tape*>(this);
  t.node_ = node;
  return t;
}

Tensor Tape::param(Tensor value) {
  return wrap(push(Op::leaf, {}, std::move(value), 0.0, /*requires_grad=*/true));
}

std::vector<Tensor> Tape::params(const std::vector<Tensor>& values) {
  std::vector<Tensor> out;
  out.reserve(values.size());
  for (const Tensor& v : values) out.push_back(param(v));
  return out;
}

Tensor Tape::constant(Tensor value) {
  return wrap(push(Op::leaf, {}, std::move(value), 0.0, /*requires_grad=*/false));
}

std::ptrdiff_t Tape::adopt(const Tensor& t) {
  if (t.tape_ == this) return t.node_;
  if (t.tape_ != nullptr) {
    throw Error(Errc::shape_mismatch, "operands belong to different tapes");
  }
  return push(Op::leaf, {}, t, 0.0, /*requires_grad=*/false);
}

void Tape::accumulate(std::ptrdiff_t index, const Tensor& g) {
  Node& node = nodes_[static_cast<std::size_t>(index)];
  if (!node.requires_grad) return;
  if (node.grad.size() == 0) {
    node.grad = Tensor(node.value.shape());
  }
  for (std::size_t i = 0; i < g.size(); ++i) node.grad[i] += g[i];
}

void Tape::backward(const Tensor& scalar_loss) {
  if (backward_done_) {
    throw Error(Errc::tape_reuse, "backward() already ran on this tape");
  }
  if (scalar_loss.tape_ != this) {
    throw Error(Errc::shape_mismatch, "loss tensor is not on this tape");
  }
  if (scalar_loss.size() != 1) {
    throw Error(Errc::shape_mismatch, "backward() needs a scalar loss");
  }
  backward_done_ = true;

  Node& seed = nodes_[static_cast<std::size_t>(scalar_loss.node_)];
  seed.grad = Tensor(seed.value.shape());
  seed.grad[0] = 1.0;

  for (std::size_t i = nodes_.size(); i-- > 0;) {
    Node& node = nodes_[i];
    if (node.op == Op::leaf || !node.requires_grad || node.grad.size() == 0) continue;
    backprop_node(i);
  }
}

void Tape::backprop_node(std::size_t index) {
  Node& node = nodes_[index];
  const Tensor& g = node.grad;
  auto parent_value = [&](std::size_t k) -> const Tensor& {
    return nodes_[static_cast<std::size_t>(node.parents[k])].value;
  };

  switch (node.op) {
    case Op::leaf:
      break;
    case Op::matmul: {
      const Tensor& a = parent_value(0);
      const Tensor& b = parent_value(1);
      const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
      Tensor da({m, k});
      Tensor db({k, n});
      // da = g * b^T ; db = a^T * g
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          const double gij = g.data()[i * n + j];
          if (gij == 0.0) continue;
          for (std::size_t p = 0; p < k; ++p) {
            da.data()[i * k + p] += gij * b.data()[p * n + j];
            db.data()[p * n + j] += a.data()[i * k + p] * gij;
          }
        }
      }
      accumulate(node.parents[0], da);
      accumulate(node.parents[1], db);
      break;
    }
    case Op::add: {
      accumulate(node.parents[0], g);
      accumulate(node.parents[1], g);
      break;
    }
    case Op::sub: {
      accumulate(node.parents[0], g);
      Tensor neg(g.shape());
      for (std::size_t i = 0; i < g.size(); ++i) neg[i] = -g[i];
      accumulate(node.parents[1], neg);
      break;
    }
    case Op::mul: {
      const Tensor& a = parent_value(0);
      const Tensor& b = parent_value(1);
      Tensor da(a.shape());
      Tensor db(b.shape());
      for (std::size_t i = 0; i < g.size(); ++i) {
        da[i] = g[i] * b[i];
        db[i] = g[i] * a[i];
      }
      accumulate(node.parents[0], da);
      accumulate(node.parents[1], db);
      break;
    }
    case Op::scalar_mul: {
      Tensor da(g.shape());
      for (std::size_t i = 0; i < g.size(); ++i) da[i] = g[i] * node.aux;
      accumulate(node.parents[0], da);
      break;
    }
    case Op::add_scalar: {
      accumulate(node.parents[0], g);
      break;
    }
    case Op::add_rowvec: {
      accumulate(node.parents[0], g);
      const std::size_t n = node.value.cols();
      Tensor drow({std::size_t{1}, n});
      for (std::size_t i = 0; i < node.value.rows(); ++i) {
        for (std::size_t j = 0; j < n; ++j) drow[j] += g.data()[i * n + j];
      }
      accumulate(node.parents[1], drow);
      break;
    }
    case Op::relu: {
      const Tensor& x = parent_value(0);
      Tensor da(x.shape());
      for (std::size_t i = 0; i < x.size(); ++i) da[i] = x[i] > 0.0 ? g[i] : 0.0;
      accumulate(node.parents[0], da);
      break;
    }
    case Op::sum_rows: {
      const Tensor& x = parent_value(0);
      const std::size_t m = x.rows(), n = x.cols();
      Tensor da({m, n});
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) da.data()[i * n + j] = g[j];
      }
      accumulate(node.parents[0], da);
      break;
    }
    case Op::sum_all: {
      const Tensor& x = parent_value(0);
      Tensor da(x.shape());
      for (std::size_t i = 0; i < x.size(); ++i) da[i] = g[0];
      accumulate(node.parents[0], da);
      break;
    }
    case Op::l2_norm: {
      const Tensor& x = parent_value(0);
      const double norm = node.value[0];
      Tensor da(x.shape());
      if (norm > 0.0) {
        for (std::size_t i = 0; i < x.size(); ++i) da[i] = g[0] * x[i] / norm;
      }
      accumulate(node.parents[0], da);
      break;
    }
    case Op::cosine: {
      const Tensor& a = parent_value(0);
      const Tensor& b = parent_value(1);
      const double na = norm2(a.data());
      const double nb = norm2(b.data());
      Tensor da(a.shape());
      Tensor db(b.shape());
      if (na > 0.0 && nb > 0.0) {
        const double c = node.value[0];
        for (std::size_t i = 0; i < a.size(); ++i) {
          da[i] = g[0] * (b[i] / (na * nb) - c * a[i] / (na * na));
          db[i] = g[0] * (a[i] / (na * nb) - c * b[i] / (nb * nb));
        }
      }
      accumulate(node.parents[0], da);
      accumulate(node.parents[1], db);
      break;
    }
    case Op::logsumexp: {
      const Tensor& x = parent_value(0);
      const double lse = node.value[0];
      Tensor da(x.shape());
      for (std::size_t i = 0; i < x.size(); ++i) da[i] = g[0] * std::exp(x[i] - lse);
      accumulate(node.parents[0], da);
      break;
    }
    case Op::log_ew: {
      const Tensor& x = parent_value(0);
      Tensor da(x.shape());
      for (std::size_t i = 0; i < x.size(); ++i) da[i] = g[i] / x[i];
      accumulate(node.parents[0], da);
      break;
    }
    case Op::exp_ew: {
      Tensor da(node.value.shape());
      for (std::size_t i = 0; i < da.size(); ++i) da[i] = g[i] * node.value[i];
      accumulate(node.parents[0], da);
      break;
    }
    case Op::concat_rows: {
      const std::size_t n = node.value.cols();
      std::size_t row_at = 0;
      for (std::size_t k = 0; k < node.parents.size(); ++k) {
        const Tensor& part = parent_value(k);
        Tensor dp(part.shape());
        for (std::size_t i = 0; i < part.size(); ++i) {
          dp[i] = g.data()[row_at * n + i];
        }
        accumulate(node.parents[k], dp);
        row_at += part.rows();
      }
      break;
    }
    case Op::row: {
      const Tensor& x = parent_value(0);
      const std::size_t n = x.cols();
      const auto index = static_cast<std::size_t>(node.aux);
      Tensor da(x.shape());
      for (std::size_t j = 0; j < n; ++j) da.data()[index * n + j] = g[j];
      accumulate(node.parents[0], da);
      break;
    }
  }
}

Tensor Tape::grad(const Tensor& t) const {
  if (t.tape_ != this) {
    throw Error(Errc::shape_mismatch, "tensor is not on this tape");
  }
  const Node& node = nodes_[static_cast<std::size_t>(t.node_)];
  if (node.grad.size() == 0) return Tensor(node.value.shape());
  return node.grad;
}

// ---------------------------------------------------------------------------
// Ops
// ---------------------------------------------------------------------------

namespace {

Tape* common_tape(const Tensor& a) { return a.tape(); }

Tape* common_tape(const Tensor& a, const Tensor& b) {
  if (a.tape() && b.tape() && a.tape() != b.tape()) {
    throw Error(Errc::shape_mismatch, "operands belong to different tapes");
  }
  return a.tape() ? a.tape() : b.tape();
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require(a.rank() == 2 && b.rank() == 2, "matmul needs rank-2 operands");
  require(a.cols() == b.rows(), "matmul inner dimensions differ");
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  Tensor out({m, n});
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  double* po = out.data().data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = pa[i * k + p];
      if (aip == 0.0) continue;
      const double* brow = pb + p * n;
      double* orow = po + i * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += aip * brow[j];
    }
  }
  if (Tape* t = common_tape(a, b)) {
    return t->wrap(t->push(Tape::Op::matmul, {t->adopt(a), t->adopt(b)}, std::move(out), 0.0,
                           true));
  }
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  require(a.shape() == b.shape(), "elementwise operands differ in shape");
  Tensor out(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  if (Tape* t = common_tape(a, b)) {
    return t->wrap(t->push(Tape::Op::add, {t->adopt(a), t->adopt(b)}, std::move(out), 0.0, true));
  }
  return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require(a.shape() == b.shape(), "elementwise operands differ in shape");
  Tensor out(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  if (Tape* t = common_tape(a, b)) {
    return t->wrap(t->push(Tape::Op::sub, {t->adopt(a), t->adopt(b)}, std::move(out), 0.0, true));
  }
  return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require(a.shape() == b.shape(), "elementwise operands differ in shape");
  Tensor out(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  if (Tape* t = common_tape(a, b)) {
    return t->wrap(t->push(Tape::Op::mul, {t->adopt(a), t->adopt(b)}, std::move(out), 0.0, true));
  }
  return out;
}

Tensor scalar_mul(const Tensor& a, double c) {
  Tensor out(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * c;
  if (Tape* t = common_tape(a)) {
    return t->wrap(t->push(Tape::Op::scalar_mul, {t->adopt(a)}, std::move(out), c, true));
  }
  return out;
}

Tensor add_scalar(const Tensor& a, double c) {
  Tensor out(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + c;
  if (Tape* t = common_tape(a)) {
    return t->wrap(t->push(Tape::Op::add_scalar, {t->adopt(a)}, std::move(out), c, true));
  }
  return out;
}

Tensor add_rowvec(const Tensor& a, const Tensor& rowvec) {
  require(a.rank() == 2, "add_rowvec needs a rank-2 left operand");
  require(rowvec.size() == a.cols(), "row vector length does not match columns");
  Tensor out(a.shape());
  const std::size_t m = a.rows(), n = a.cols();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out.data()[i * n + j] = a.data()[i * n + j] + rowvec[j];
  }
  if (Tape* t = common_tape(a, rowvec)) {
    return t->wrap(
        t->push(Tape::Op::add_rowvec, {t->adopt(a), t->adopt(rowvec)}, std::move(out), 0.0, true));
  }
  return out;
}

Tensor relu(const Tensor& a) {
  Tensor out(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] > 0.0 ? a[i] : 0.0;
  if (Tape* t = common_tape(a)) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      t->kink_signature_.push_back(a[i] > 0.0 ? 1 : 0);
    }
    return t->wrap(t->push(Tape::Op::relu, {t->adopt(a)}, std::move(out), 0.0, true));
  }
  return out;
}

Tensor sum_rows(const Tensor& a) {
  require(a.rank() == 2, "sum_rows needs a rank-2 operand");
  const std::size_t m = a.rows(), n = a.cols();
  Tensor out({std::size_t{1}, n});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[j] += a.data()[i * n + j];
  }
  if (Tape* t = common_tape(a)) {
    return t->wrap(t->push(Tape::Op::sum_rows, {t->adopt(a)}, std::move(out), 0.0, true));
  }
  return out;
}

Tensor sum_all(const Tensor& a) {
  double s = 0.0;
  for (double x : a.data()) s += x;
  Tensor out = Tensor::scalar(s);
  if (Tape* t = common_tape(a)) {
    return t->wrap(t->push(Tape::Op::sum_all, {t->adopt(a)}, std::move(out), 0.0, true));
  }
  return out;
}

Tensor l2_norm(const Tensor& a) {
  Tensor out = Tensor::scalar(norm2(a.data()));
  if (Tape* t = common_tape(a)) {
    t->kink_signature_.push_back(out[0] > 0.0 ? 1 : 0);
    return t->wrap(t->push(Tape::Op::l2_norm, {t->adopt(a)}, std::move(out), 0.0, true));
  }
  return out;
}

Tensor cosine_similarity(const Tensor& a, const Tensor& b) {
  require(a.shape() == b.shape(), "cosine operands differ in shape");
  const double na = norm2(a.data());
  const double nb = norm2(b.data());
  const double c = (na > 0.0 && nb > 0.0) ? dot(a.data(), b.data()) / (na * nb) : 0.0;
  Tensor out = Tensor::scalar(c);
  if (Tape* t = common_tape(a, b)) {
    t->kink_signature_.push_back((na > 0.0 && nb > 0.0) ? 1 : 0);
    return t->wrap(
        t->push(Tape::Op::cosine, {t->adopt(a), t->adopt(b)}, std::move(out), 0.0, true));
  }
  return out;
}

Tensor logsumexp(const Tensor& a) {
  require(a.size() > 0, "logsumexp of an empty tensor");
  double hi = a[0];
  for (double x : a.data()) hi = std::max(hi, x);
  double s = 0.0;
  for (double x : a.data()) s += std::exp(x - hi);
  Tensor out = Tensor::scalar(hi + std::log(s));
  if (Tape* t = common_tape(a)) {
    return t->wrap(t->push(Tape::Op::logsumexp, {t->adopt(a)}, std::move(out), 0.0, true));
  }
  return out;
}

Tensor log_elementwise(const Tensor& a) {
  Tensor out(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::log(a[i]);
  if (Tape* t = common_tape(a)) {
    return t->wrap(t->push(Tape::Op::log_ew, {t->adopt(a)}, std::move(out), 0.0, true));
  }
  return out;
}

Tensor exp_elementwise(const Tensor& a) {
  Tensor out(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::exp(a[i]);
  if (Tape* t = common_tape(a)) {
    return t->wrap(t->push(Tape::Op::exp_ew, {t->adopt(a)}, std::move(out), 0.0, true));
  }
  return out;
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
  require(!parts.empty(), "concat_rows of an empty list");
  const std::size_t n = parts[0].cols();
  std::size_t m = 0;
  Tape* tape = nullptr;
  for (const Tensor& p : parts) {
    require(p.cols() == n, "concat_rows operands differ in columns");
    m += p.rows();
    if (p.tape()) {
      if (tape && tape != p.tape()) {
        throw Error(Errc::shape_mismatch, "operands belong to different tapes");
      }
      tape = p.tape();
    }
  }
  Tensor out({m, n});
  std::size_t at = 0;
  for (const Tensor& p : parts) {
    std::copy(p.data().begin(), p.data().end(), out.data().begin() + static_cast<long>(at));
    at += p.size();
  }
  if (tape) {
    std::vector<std::ptrdiff_t> parents;
    parents.reserve(parts.size());
    for (const Tensor& p : parts) parents.push_back(tape->adopt(p));
    return tape->wrap(tape->push(Tape::Op::concat_rows, std::move(parents), std::move(out), 0.0,
                                 true));
  }
  return out;
}

Tensor row(const Tensor& a, std::size_t index) {
  require(a.rank() == 2, "row() needs a rank-2 operand");
  require(index < a.rows(), "row index out of range");
  const std::size_t n = a.cols();
  Tensor out({std::size_t{1}, n});
  std::copy(a.data().begin() + static_cast<long>(index * n),
            a.data().begin() + static_cast<long>((index + 1) * n), out.data().begin());
  if (Tape* t = common_tape(a)) {
    return t->wrap(t->push(Tape::Op::row, {t->adopt(a)}, std::move(out),
                           static_cast<double>(index), true));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Adam
// ---------------------------------------------------------------------------

AdamState::AdamState(const std::vector<Tensor>& params, AdamConfig config) : config_(config) {
  m_.reserve(params.size());
  v_.reserve(params.size());
  for (const Tensor& p : params) {
    m_.emplace_back(p.shape());
    v_.emplace_back(p.shape());
  }
}

void adam_step(std::vector<Tensor>& params, const std::vector<Tensor>& grads, AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.m_.size()) {
    throw Error(Errc::shape_mismatch, "parameter, gradient, and state counts differ");
  }
  state.step_ += 1;
  const AdamConfig& c = state.config_;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step_));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor& p = params[k];
    const Tensor& g = grads[k];
    if (p.shape() != g.shape()) {
      throw Error(Errc::shape_mismatch, "gradient shape does not match parameter");
    }
    Tensor& m = state.m_[k];
    Tensor& v = state.v_[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      p[i] -= c.lr * mhat / (std::sqrt(vhat) + c.epsilon);
    }
  }
}

// ---------------------------------------------------------------------------
// Gradient check
// ---------------------------------------------------------------------------

GradCheckResult grad_check(const std::function<Tensor(Tape&, const Tensor&)>& f, const Tensor& x,
                           double h) {
  auto evaluate = [&](const Tensor& point, std::vector<std::uint8_t>* signature) {
    Tape tape;
    Tensor p = tape.param(point);
    Tensor loss = f(tape, p);
    const double value = loss.value();
    if (!std::isfinite(value)) {
      throw Error(Errc::non_finite_value, "loss is not finite during grad_check");
    }
    if (signature) *signature = tape.kink_signature();
    return value;
  };

  Tape tape;
  Tensor p = tape.param(x);
  Tensor loss = f(tape, p);
  if (!std::isfinite(loss.value())) {
    throw Error(Errc::non_finite_value, "loss is not finite during grad_check");
  }
  tape.backward(loss);
  Tensor analytic = tape.grad(p);

  GradCheckResult result;
  for (std::size_t i = 0; i < x.size(); ++i) {
    Tensor plus = x;
    Tensor minus = x;
    plus[i] += h;
    minus[i] -= h;
    std::vector<std::uint8_t> sig_plus, sig_minus;
    const double f_plus = evaluate(plus, &sig_plus);
    const double f_minus = evaluate(minus, &sig_minus);
    if (sig_plus != sig_minus) {
      result.skipped.push_back(i);
      continue;
    }
    const double central = (f_plus - f_minus) / (2.0 * h);
    const double rel = std::abs(analytic[i] - central) / std::max(1.0, std::abs(central));
    result.max_rel_error = std::max(result.max_rel_error, rel);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Seeded init
// ---------------------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

Tensor init_uniform(std::size_t rows, std::size_t cols, std::uint64_t& rng_state) {
  Tensor out({rows, cols});
  const double bound = 1.0 / std::sqrt(static_cast<double>(rows));
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (2.0 * uniform01(rng_state) - 1.0) * bound;
  }
  return out;
}

}  // namespace molkd
