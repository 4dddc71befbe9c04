#pragma once

// Small reverse-mode differentiation substrate: dense rank-1/rank-2 tensors,
// a recording tape, and the handful of primitives the summarizer needs.
// Everything is double precision.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace copycat::nd {

class ParameterStore;

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::size_t n, double fill = 0.0);
  Tensor(std::size_t rows, std::size_t cols, double fill = 0.0);

  static Tensor vector(std::vector<double> values);
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rank() const { return rank_; }
  // For rank 1, rows() is the length and cols() is 1.
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  std::vector<std::size_t> shape() const;
  bool same_shape(const Tensor& other) const {
    return rank_ == other.rank_ && rows_ == other.rows_ && cols_ == other.cols_;
  }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(data_).subspan(r * cols_, cols_);
  }
  std::vector<double> to_vector() const { return data_; }

  void fill(double v);
  bool all_finite() const;

 private:
  std::size_t rank_ = 0;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

class Tape;

// Handle to a node on a Tape. Cheap to copy; only valid while its tape lives.
class Var {
 public:
  Var() = default;

  bool valid() const { return tape_ != nullptr; }
  const Tensor& value() const;
  std::size_t size() const { return value().size(); }
  double scalar() const;
  Tape& tape() const { return *tape_; }
  std::uint32_t id() const { return id_; }

 private:
  friend class Tape;
  Var(Tape* tape, std::uint32_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::uint32_t id_ = 0;
};

class Tape {
 public:
  // Receives the node's accumulated gradient and pushes it into the inputs.
  using Backprop = std::function<void(Tape&, const Tensor&)>;

  // A non-recording tape evaluates values only; no closures are stored.
  explicit Tape(bool recording = true) : recording_(recording) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  // Constant that aliases caller-owned storage; it must outlive the tape.
  Var reference(const Tensor& value);
  // Leaf that accumulates gradient locally (read with grad()).
  Var variable(Tensor value);
  // Leaf bound to a stored parameter; gradients accumulate straight into the
  // store's gradient buffer. Repeated calls with the same name return the
  // same node.
  Var parameter(ParameterStore& store, std::string_view name);

  Var record(Tensor value, std::span<const Var> inputs, Backprop backprop);
  Var record(Tensor value, std::initializer_list<Var> inputs, Backprop backprop) {
    return record(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()),
                  std::move(backprop));
  }

  const Tensor& value(Var v) const;
  bool needs_grad(Var v) const { return nodes_[v.id_].needs_grad; }
  // Gradient buffer of a node, allocated on first touch.
  Tensor& grad_ref(Var v);
  // Gradient after backward(); zero tensor when nothing flowed into it.
  Tensor grad(Var v) const;

  void backward(Var scalar_output);

  bool recording() const { return recording_; }
  std::size_t size() const { return nodes_.size(); }

  void count_floor_event(std::size_t n = 1) { floor_events_ += n; }
  std::size_t floor_events() const { return floor_events_; }

 private:
  struct Node {
    Tensor value;
    const Tensor* external_value = nullptr;
    Tensor grad;
    Tensor* external_grad = nullptr;
    Backprop backprop;
    bool needs_grad = false;
  };

  Var push(Node node);

  bool recording_;
  std::vector<Node> nodes_;
  std::unordered_map<std::string, Var> parameters_;
  const ParameterStore* bound_store_ = nullptr;
  std::size_t floor_events_ = 0;
};

// ---- primitives -----------------------------------------------------------

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double factor);
Var add_scalar(Var a, double offset);
// a * s where s holds a single value.
Var scale_by(Var a, Var s);
Var one_minus(Var a);

Var tanh(Var a);
Var sigmoid(Var a);
Var exp(Var a);
// log(max(a, floor)); every floored element is counted on the tape and
// receives zero gradient.
Var log_floor(Var a, double floor);

// W[m x n] * x[n] -> [m]. Also serves rows-times-vector for a matrix of rows.
Var matvec(Var w, Var x);
// X[p x n]^T * a[p] -> [n]
Var matvec_t(Var x, Var a);
// X[p x n] * W[m x n]^T -> [p x m]
Var matmul_nt(Var x, Var w);
// Adds v[m] to every row of M[p x m].
Var add_row(Var m, Var v);
Var affine(Var x, Var w, Var b);

Var concat(std::span<const Var> parts);
Var concat(std::initializer_list<Var> parts);
Var slice(Var a, std::size_t offset, std::size_t length);
Var stack_rows(std::span<const Var> rows);
Var concat_rows(std::span<const Var> blocks);
Var row(Var m, std::size_t index);

// Masked, max-shifted softmax. keep[i] == false forces output i to exactly 0.
Var softmax(Var scores);
Var softmax(Var scores, const std::vector<bool>& keep);

// Zero-extends a vector to the given length.
Var pad_to(Var a, std::size_t length);
// out[index[i]] += a[i]
Var scatter_add(Var a, std::span<const std::size_t> index, std::size_t length);
Var pick(Var a, std::size_t index);
Var sum(Var a);
Var dot(Var a, Var b);

// Closed-form KL(N(mq, exp(lvq)) || N(mp, exp(lvp))) summed over dimensions.
Var kl_diag(Var mean_q, Var logvar_q, Var mean_p, Var logvar_p);

// ---- layers ---------------------------------------------------------------

// Gate order in the stacked weights: reset, update, candidate.
struct GruWeights {
  Var input;      // [3H x d_x]
  Var recurrent;  // [3H x H]
  Var bias;       // [3H]
};

// h' = (1 - u) * h + u * n, with
//   r = sigmoid(Wx_r x + Wh_r h + b_r), u = sigmoid(Wx_u x + Wh_u h + b_u),
//   n = tanh(Wx_n x + b_n + r * (Wh_n h)).
Var gru_cell(Var x, Var h, const GruWeights& w);

struct FfnnWeights {
  Var hidden;       // [k x d_in]
  Var hidden_bias;  // [k]
  Var output;       // [d_out x k]
  Var output_bias;  // [d_out], may be left invalid
};

Var ffnn_tanh(Var x, const FfnnWeights& w);

}  // namespace copycat::nd
