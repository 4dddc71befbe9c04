#include "copycat/ndiff.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "copycat/parameters.hpp"

namespace copycat::nd {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

bool is_vector(const Tensor& t) { return t.rank() == 1; }
bool is_matrix(const Tensor& t) { return t.rank() == 2; }

}  // namespace

// ---- Tensor -----------------------------------------------------------------

Tensor::Tensor(std::size_t n, double fill) : rank_(1), rows_(n), cols_(1), data_(n, fill) {}

Tensor::Tensor(std::size_t rows, std::size_t cols, double fill)
    : rank_(2), rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Tensor Tensor::vector(std::vector<double> values) {
  Tensor t;
  t.rank_ = 1;
  t.rows_ = values.size();
  t.cols_ = 1;
  t.data_ = std::move(values);
  return t;
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
  require(values.size() == rows * cols, "Tensor::matrix: value count does not match shape");
  Tensor t;
  t.rank_ = 2;
  t.rows_ = rows;
  t.cols_ = cols;
  t.data_ = std::move(values);
  return t;
}

std::vector<std::size_t> Tensor::shape() const {
  if (rank_ == 1) return {rows_};
  if (rank_ == 2) return {rows_, cols_};
  return {};
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

// ---- Var / Tape -------------------------------------------------------------

const Tensor& Var::value() const { return tape_->value(*this); }

double Var::scalar() const {
  const Tensor& v = value();
  require(v.size() == 1, "Var::scalar: not a single value");
  return v[0];
}

Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Var Tape::constant(Tensor value) {
  Node n;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::reference(const Tensor& value) {
  Node n;
  n.external_value = &value;
  return push(std::move(n));
}

Var Tape::variable(Tensor value) {
  Node n;
  n.value = std::move(value);
  n.needs_grad = recording_;
  return push(std::move(n));
}

Var Tape::parameter(ParameterStore& store, std::string_view name) {
  if (bound_store_ != nullptr && bound_store_ != &store)
    throw std::logic_error("Tape::parameter: tape already bound to another store");
  bound_store_ = &store;
  std::string key(name);
  if (auto it = parameters_.find(key); it != parameters_.end()) return it->second;
  auto& e = store.entry(name);
  Node n;
  n.external_value = &e.value;
  if (recording_) {
    n.external_grad = &e.grad;
    n.needs_grad = true;
  }
  Var v = push(std::move(n));
  parameters_.emplace(std::move(key), v);
  return v;
}

Var Tape::record(Tensor value, std::span<const Var> inputs, Backprop backprop) {
  Node n;
  n.value = std::move(value);
  if (recording_) {
    for (const Var& in : inputs) {
      if (in.valid() && nodes_[in.id_].needs_grad) {
        n.needs_grad = true;
        break;
      }
    }
    if (n.needs_grad) n.backprop = std::move(backprop);
  }
  return push(std::move(n));
}

const Tensor& Tape::value(Var v) const {
  const Node& n = nodes_[v.id_];
  return n.external_value != nullptr ? *n.external_value : n.value;
}

Tensor& Tape::grad_ref(Var v) {
  Node& n = nodes_[v.id_];
  if (n.external_grad != nullptr) return *n.external_grad;
  if (n.grad.size() == 0 && value(v).size() != 0) {
    const Tensor& val = value(v);
    n.grad = val.rank() == 2 ? Tensor(val.rows(), val.cols()) : Tensor(val.size());
  }
  return n.grad;
}

Tensor Tape::grad(Var v) const {
  const Node& n = nodes_[v.id_];
  if (n.external_grad != nullptr) return *n.external_grad;
  if (n.grad.size() != 0) return n.grad;
  const Tensor& val = value(v);
  return val.rank() == 2 ? Tensor(val.rows(), val.cols()) : Tensor(val.size());
}

void Tape::backward(Var output) {
  require(recording_, "Tape::backward: tape is not recording");
  require(value(output).size() == 1, "Tape::backward: output must be a single value");
  if (!nodes_[output.id_].needs_grad) return;
  grad_ref(output)[0] += 1.0;
  for (std::size_t i = output.id_ + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.backprop) continue;
    if (n.grad.size() == 0) continue;  // nothing flowed here
    n.backprop(*this, n.grad);
  }
}

// ---- primitives -------------------------------------------------------------

namespace {

Tensor like(const Tensor& t) { return t.rank() == 2 ? Tensor(t.rows(), t.cols()) : Tensor(t.size()); }

template <typename Fn>
Tensor map(const Tensor& a, Fn fn) {
  Tensor out = like(a);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = fn(a[i]);
  return out;
}

void accumulate(Tape& t, Var v, const Tensor& g, double factor = 1.0) {
  if (!t.needs_grad(v)) return;
  Tensor& dst = t.grad_ref(v);
  for (std::size_t i = 0; i < g.size(); ++i) dst[i] += factor * g[i];
}

}  // namespace

Var add(Var a, Var b) {
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  require(x.same_shape(y), "add: shape mismatch");
  Tensor out = like(x);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
  return a.tape().record(std::move(out), {a, b}, [a, b](Tape& t, const Tensor& g) {
    accumulate(t, a, g);
    accumulate(t, b, g);
  });
}

Var sub(Var a, Var b) {
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  require(x.same_shape(y), "sub: shape mismatch");
  Tensor out = like(x);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
  return a.tape().record(std::move(out), {a, b}, [a, b](Tape& t, const Tensor& g) {
    accumulate(t, a, g);
    accumulate(t, b, g, -1.0);
  });
}

Var mul(Var a, Var b) {
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  require(x.same_shape(y), "mul: shape mismatch");
  Tensor out = like(x);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * y[i];
  return a.tape().record(std::move(out), {a, b}, [a, b](Tape& t, const Tensor& g) {
    if (t.needs_grad(a)) {
      const Tensor& y = t.value(b);
      Tensor& ga = t.grad_ref(a);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i];
    }
    if (t.needs_grad(b)) {
      const Tensor& x = t.value(a);
      Tensor& gb = t.grad_ref(b);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * x[i];
    }
  });
}

Var scale(Var a, double factor) {
  Tensor out = map(a.value(), [factor](double v) { return factor * v; });
  return a.tape().record(std::move(out), {a},
                         [a, factor](Tape& t, const Tensor& g) { accumulate(t, a, g, factor); });
}

Var add_scalar(Var a, double offset) {
  Tensor out = map(a.value(), [offset](double v) { return v + offset; });
  return a.tape().record(std::move(out), {a}, [a](Tape& t, const Tensor& g) { accumulate(t, a, g); });
}

Var scale_by(Var a, Var s) {
  require(s.value().size() == 1, "scale_by: factor must hold one value");
  const double f = s.value()[0];
  Tensor out = map(a.value(), [f](double v) { return f * v; });
  return a.tape().record(std::move(out), {a, s}, [a, s](Tape& t, const Tensor& g) {
    if (t.needs_grad(a)) accumulate(t, a, g, t.value(s)[0]);
    if (t.needs_grad(s)) {
      const Tensor& x = t.value(a);
      double acc = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) acc += g[i] * x[i];
      t.grad_ref(s)[0] += acc;
    }
  });
}

Var one_minus(Var a) { return add_scalar(scale(a, -1.0), 1.0); }

Var tanh(Var a) {
  Tensor out = map(a.value(), [](double v) { return std::tanh(v); });
  return a.tape().record(std::move(out), {a}, [a](Tape& t, const Tensor& g) {
    if (!t.needs_grad(a)) return;
    const Tensor& x = t.value(a);
    Tensor& ga = t.grad_ref(a);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double y = std::tanh(x[i]);
      ga[i] += g[i] * (1.0 - y * y);
    }
  });
}

Var sigmoid(Var a) {
  auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  Tensor out = map(a.value(), sig);
  return a.tape().record(std::move(out), {a}, [a, sig](Tape& t, const Tensor& g) {
    if (!t.needs_grad(a)) return;
    const Tensor& x = t.value(a);
    Tensor& ga = t.grad_ref(a);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double y = sig(x[i]);
      ga[i] += g[i] * y * (1.0 - y);
    }
  });
}

Var exp(Var a) {
  Tensor out = map(a.value(), [](double v) { return std::exp(v); });
  return a.tape().record(std::move(out), {a}, [a](Tape& t, const Tensor& g) {
    if (!t.needs_grad(a)) return;
    const Tensor& x = t.value(a);
    Tensor& ga = t.grad_ref(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * std::exp(x[i]);
  });
}

Var log_floor(Var a, double floor) {
  const Tensor& x = a.value();
  Tensor out = like(x);
  std::size_t floored = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > floor)) {
      out[i] = std::log(floor);
      ++floored;
    } else {
      out[i] = std::log(x[i]);
    }
  }
  a.tape().count_floor_event(floored);
  return a.tape().record(std::move(out), {a}, [a, floor](Tape& t, const Tensor& g) {
    if (!t.needs_grad(a)) return;
    const Tensor& x = t.value(a);
    Tensor& ga = t.grad_ref(a);
    for (std::size_t i = 0; i < g.size(); ++i)
      if (x[i] > floor) ga[i] += g[i] / x[i];
  });
}

Var matvec(Var w, Var x) {
  const Tensor& m = w.value();
  const Tensor& v = x.value();
  require(is_matrix(m) && is_vector(v) && m.cols() == v.size(), "matvec: shape mismatch");
  Tensor out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double* row = &m.values()[r * m.cols()];
    double acc = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) acc += row[c] * v[c];
    out[r] = acc;
  }
  return w.tape().record(std::move(out), {w, x}, [w, x](Tape& t, const Tensor& g) {
    const Tensor& m = t.value(w);
    const Tensor& v = t.value(x);
    const std::size_t cols = m.cols();
    if (t.needs_grad(w)) {
      Tensor& gw = t.grad_ref(w);
      for (std::size_t r = 0; r < m.rows(); ++r) {
        const double gr = g[r];
        if (gr == 0.0) continue;
        double* dst = &gw.values()[r * cols];
        for (std::size_t c = 0; c < cols; ++c) dst[c] += gr * v[c];
      }
    }
    if (t.needs_grad(x)) {
      Tensor& gx = t.grad_ref(x);
      for (std::size_t r = 0; r < m.rows(); ++r) {
        const double gr = g[r];
        if (gr == 0.0) continue;
        const double* row = &m.values()[r * cols];
        for (std::size_t c = 0; c < cols; ++c) gx[c] += gr * row[c];
      }
    }
  });
}

Var matvec_t(Var x, Var a) {
  const Tensor& m = x.value();
  const Tensor& w = a.value();
  require(is_matrix(m) && is_vector(w) && m.rows() == w.size(), "matvec_t: shape mismatch");
  Tensor out(m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double wr = w[r];
    const double* row = &m.values()[r * m.cols()];
    for (std::size_t c = 0; c < m.cols(); ++c) out[c] += wr * row[c];
  }
  return x.tape().record(std::move(out), {x, a}, [x, a](Tape& t, const Tensor& g) {
    const Tensor& m = t.value(x);
    const Tensor& w = t.value(a);
    const std::size_t cols = m.cols();
    if (t.needs_grad(x)) {
      Tensor& gm = t.grad_ref(x);
      for (std::size_t r = 0; r < m.rows(); ++r) {
        double* dst = &gm.values()[r * cols];
        for (std::size_t c = 0; c < cols; ++c) dst[c] += w[r] * g[c];
      }
    }
    if (t.needs_grad(a)) {
      Tensor& ga = t.grad_ref(a);
      for (std::size_t r = 0; r < m.rows(); ++r) {
        const double* row = &m.values()[r * cols];
        double acc = 0.0;
        for (std::size_t c = 0; c < cols; ++c) acc += row[c] * g[c];
        ga[r] += acc;
      }
    }
  });
}

Var matmul_nt(Var x, Var w) {
  const Tensor& a = x.value();
  const Tensor& b = w.value();
  require(is_matrix(a) && is_matrix(b) && a.cols() == b.cols(), "matmul_nt: shape mismatch");
  const std::size_t p = a.rows(), m = b.rows(), n = a.cols();
  Tensor out(p, m);
  for (std::size_t i = 0; i < p; ++i) {
    const double* ar = &a.values()[i * n];
    for (std::size_t j = 0; j < m; ++j) {
      const double* br = &b.values()[j * n];
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += ar[k] * br[k];
      out.at(i, j) = acc;
    }
  }
  return x.tape().record(std::move(out), {x, w}, [x, w, p, m, n](Tape& t, const Tensor& g) {
    const Tensor& a = t.value(x);
    const Tensor& b = t.value(w);
    if (t.needs_grad(x)) {
      Tensor& ga = t.grad_ref(x);
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < m; ++j) {
          const double gij = g.at(i, j);
          if (gij == 0.0) continue;
          for (std::size_t k = 0; k < n; ++k) ga.at(i, k) += gij * b.at(j, k);
        }
    }
    if (t.needs_grad(w)) {
      Tensor& gb = t.grad_ref(w);
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < m; ++j) {
          const double gij = g.at(i, j);
          if (gij == 0.0) continue;
          for (std::size_t k = 0; k < n; ++k) gb.at(j, k) += gij * a.at(i, k);
        }
    }
  });
}

Var add_row(Var m, Var v) {
  const Tensor& a = m.value();
  const Tensor& b = v.value();
  require(is_matrix(a) && is_vector(b) && a.cols() == b.size(), "add_row: shape mismatch");
  Tensor out = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out.at(i, j) += b[j];
  return m.tape().record(std::move(out), {m, v}, [m, v](Tape& t, const Tensor& g) {
    accumulate(t, m, g);
    if (t.needs_grad(v)) {
      Tensor& gv = t.grad_ref(v);
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) gv[j] += g.at(i, j);
    }
  });
}

Var affine(Var x, Var w, Var b) { return add(matvec(w, x), b); }

Var concat(std::span<const Var> parts) {
  require(!parts.empty(), "concat: no parts");
  std::size_t total = 0;
  for (const Var& p : parts) {
    require(is_vector(p.value()), "concat: parts must be vectors");
    total += p.value().size();
  }
  Tensor out(total);
  std::size_t off = 0;
  for (const Var& p : parts) {
    const Tensor& v = p.value();
    std::copy(v.values().begin(), v.values().end(), out.values().begin() + static_cast<long>(off));
    off += v.size();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return parts.front().tape().record(std::move(out), parts, [inputs](Tape& t, const Tensor& g) {
    std::size_t off = 0;
    for (const Var& p : inputs) {
      const std::size_t n = t.value(p).size();
      if (t.needs_grad(p)) {
        Tensor& gp = t.grad_ref(p);
        for (std::size_t i = 0; i < n; ++i) gp[i] += g[off + i];
      }
      off += n;
    }
  });
}

Var concat(std::initializer_list<Var> parts) {
  return concat(std::span<const Var>(parts.begin(), parts.size()));
}

Var slice(Var a, std::size_t offset, std::size_t length) {
  const Tensor& v = a.value();
  require(is_vector(v) && offset + length <= v.size() && length > 0, "slice: out of range");
  std::vector<double> vals(v.values().begin() + static_cast<long>(offset),
                           v.values().begin() + static_cast<long>(offset + length));
  return a.tape().record(Tensor::vector(std::move(vals)), {a},
                         [a, offset, length](Tape& t, const Tensor& g) {
                           if (!t.needs_grad(a)) return;
                           Tensor& ga = t.grad_ref(a);
                           for (std::size_t i = 0; i < length; ++i) ga[offset + i] += g[i];
                         });
}

Var stack_rows(std::span<const Var> rows) {
  require(!rows.empty(), "stack_rows: no rows");
  const std::size_t n = rows.front().value().size();
  Tensor out(rows.size(), n);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Tensor& v = rows[r].value();
    require(is_vector(v) && v.size() == n, "stack_rows: rows must be equal-length vectors");
    std::copy(v.values().begin(), v.values().end(), out.values().begin() + static_cast<long>(r * n));
  }
  std::vector<Var> inputs(rows.begin(), rows.end());
  return rows.front().tape().record(std::move(out), rows, [inputs, n](Tape& t, const Tensor& g) {
    for (std::size_t r = 0; r < inputs.size(); ++r) {
      if (!t.needs_grad(inputs[r])) continue;
      Tensor& gr = t.grad_ref(inputs[r]);
      for (std::size_t c = 0; c < n; ++c) gr[c] += g.at(r, c);
    }
  });
}

Var concat_rows(std::span<const Var> blocks) {
  require(!blocks.empty(), "concat_rows: no blocks");
  const std::size_t n = blocks.front().value().cols();
  std::size_t rows = 0;
  for (const Var& b : blocks) {
    require(is_matrix(b.value()) && b.value().cols() == n, "concat_rows: column mismatch");
    rows += b.value().rows();
  }
  Tensor out(rows, n);
  std::size_t off = 0;
  for (const Var& b : blocks) {
    const Tensor& v = b.value();
    std::copy(v.values().begin(), v.values().end(), out.values().begin() + static_cast<long>(off));
    off += v.size();
  }
  std::vector<Var> inputs(blocks.begin(), blocks.end());
  return blocks.front().tape().record(std::move(out), blocks, [inputs](Tape& t, const Tensor& g) {
    std::size_t off = 0;
    for (const Var& b : inputs) {
      const std::size_t len = t.value(b).size();
      if (t.needs_grad(b)) {
        Tensor& gb = t.grad_ref(b);
        for (std::size_t i = 0; i < len; ++i) gb[i] += g[off + i];
      }
      off += len;
    }
  });
}

Var row(Var m, std::size_t index) {
  const Tensor& a = m.value();
  require(is_matrix(a) && index < a.rows(), "row: index out of range");
  auto r = a.row(index);
  return m.tape().record(Tensor::vector(std::vector<double>(r.begin(), r.end())), {m},
                         [m, index](Tape& t, const Tensor& g) {
                           if (!t.needs_grad(m)) return;
                           Tensor& gm = t.grad_ref(m);
                           for (std::size_t c = 0; c < g.size(); ++c) gm.at(index, c) += g[c];
                         });
}

namespace {

Var softmax_impl(Var scores, const std::vector<bool>* keep) {
  const Tensor& s = scores.value();
  require(is_vector(s) && s.size() >= 1, "softmax: scores must be a non-empty vector");
  if (keep != nullptr) require(keep->size() == s.size(), "softmax: mask length mismatch");
  auto kept = [keep](std::size_t i) { return keep == nullptr || (*keep)[i]; };
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.size(); ++i)
    if (kept(i)) mx = std::max(mx, s[i]);
  require(std::isfinite(mx), "softmax: every position is masked or scores are not finite");
  Tensor out(s.size());
  double z = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!kept(i)) continue;
    out[i] = std::exp(s[i] - mx);
    z += out[i];
  }
  for (std::size_t i = 0; i < s.size(); ++i) out[i] /= z;
  Tensor probs = out;
  return scores.tape().record(std::move(out), {scores},
                              [scores, probs = std::move(probs)](Tape& t, const Tensor& g) {
                                if (!t.needs_grad(scores)) return;
                                double inner = 0.0;
                                for (std::size_t i = 0; i < g.size(); ++i) inner += probs[i] * g[i];
                                Tensor& gs = t.grad_ref(scores);
                                for (std::size_t i = 0; i < g.size(); ++i)
                                  gs[i] += probs[i] * (g[i] - inner);
                              });
}

}  // namespace

Var softmax(Var scores) { return softmax_impl(scores, nullptr); }
Var softmax(Var scores, const std::vector<bool>& keep) { return softmax_impl(scores, &keep); }

Var pad_to(Var a, std::size_t length) {
  const Tensor& v = a.value();
  require(is_vector(v) && length >= v.size(), "pad_to: target shorter than input");
  if (length == v.size()) return a;
  Tensor out(length);
  std::copy(v.values().begin(), v.values().end(), out.values().begin());
  return a.tape().record(std::move(out), {a}, [a](Tape& t, const Tensor& g) {
    if (!t.needs_grad(a)) return;
    Tensor& ga = t.grad_ref(a);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i];
  });
}

Var scatter_add(Var a, std::span<const std::size_t> index, std::size_t length) {
  const Tensor& v = a.value();
  require(is_vector(v) && index.size() == v.size(), "scatter_add: index length mismatch");
  Tensor out(length);
  for (std::size_t i = 0; i < v.size(); ++i) {
    require(index[i] < length, "scatter_add: index out of range");
    out[index[i]] += v[i];
  }
  std::vector<std::size_t> idx(index.begin(), index.end());
  return a.tape().record(std::move(out), {a}, [a, idx = std::move(idx)](Tape& t, const Tensor& g) {
    if (!t.needs_grad(a)) return;
    Tensor& ga = t.grad_ref(a);
    for (std::size_t i = 0; i < idx.size(); ++i) ga[i] += g[idx[i]];
  });
}

Var pick(Var a, std::size_t index) {
  const Tensor& v = a.value();
  require(index < v.size(), "pick: index out of range");
  return a.tape().record(Tensor::vector({v[index]}), {a}, [a, index](Tape& t, const Tensor& g) {
    if (t.needs_grad(a)) t.grad_ref(a)[index] += g[0];
  });
}

Var sum(Var a) {
  double acc = 0.0;
  for (double v : a.value().values()) acc += v;
  return a.tape().record(Tensor::vector({acc}), {a}, [a](Tape& t, const Tensor& g) {
    if (!t.needs_grad(a)) return;
    Tensor& ga = t.grad_ref(a);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[0];
  });
}

Var dot(Var a, Var b) {
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  require(x.same_shape(y), "dot: shape mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return a.tape().record(Tensor::vector({acc}), {a, b}, [a, b](Tape& t, const Tensor& g) {
    if (t.needs_grad(a)) accumulate(t, a, t.value(b), g[0]);
    if (t.needs_grad(b)) accumulate(t, b, t.value(a), g[0]);
  });
}

Var kl_diag(Var mean_q, Var logvar_q, Var mean_p, Var logvar_p) {
  const Tensor& mq = mean_q.value();
  const Tensor& lq = logvar_q.value();
  const Tensor& mp = mean_p.value();
  const Tensor& lp = logvar_p.value();
  require(mq.same_shape(lq) && mq.same_shape(mp) && mq.same_shape(lp), "kl_diag: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < mq.size(); ++i) {
    const double d = mq[i] - mp[i];
    acc += 0.5 * ((std::exp(lq[i]) + d * d) / std::exp(lp[i]) - 1.0 + lp[i] - lq[i]);
  }
  return mean_q.tape().record(
      Tensor::vector({acc}), {mean_q, logvar_q, mean_p, logvar_p},
      [mean_q, logvar_q, mean_p, logvar_p](Tape& t, const Tensor& g) {
        const Tensor& mq = t.value(mean_q);
        const Tensor& lq = t.value(logvar_q);
        const Tensor& mp = t.value(mean_p);
        const Tensor& lp = t.value(logvar_p);
        const double up = g[0];
        for (std::size_t i = 0; i < mq.size(); ++i) {
          const double d = mq[i] - mp[i];
          const double inv_vp = std::exp(-lp[i]);
          const double vq = std::exp(lq[i]);
          if (t.needs_grad(mean_q)) t.grad_ref(mean_q)[i] += up * d * inv_vp;
          if (t.needs_grad(mean_p)) t.grad_ref(mean_p)[i] -= up * d * inv_vp;
          if (t.needs_grad(logvar_q)) t.grad_ref(logvar_q)[i] += up * 0.5 * (vq * inv_vp - 1.0);
          if (t.needs_grad(logvar_p))
            t.grad_ref(logvar_p)[i] += up * 0.5 * (1.0 - (vq + d * d) * inv_vp);
        }
      });
}

// ---- layers -----------------------------------------------------------------

Var gru_cell(Var x, Var h, const GruWeights& w) {
  if (!x.value().all_finite() || !h.value().all_finite())
    throw std::invalid_argument("gru_cell: non-finite input");
  const std::size_t hd = h.value().size();
  require(w.recurrent.value().rows() == 3 * hd && w.recurrent.value().cols() == hd,
          "gru_cell: recurrent weight shape mismatch");
  Var gx = add(matvec(w.input, x), w.bias);
  Var gh = matvec(w.recurrent, h);
  Var gates = sigmoid(add(slice(gx, 0, 2 * hd), slice(gh, 0, 2 * hd)));
  Var reset = slice(gates, 0, hd);
  Var update = slice(gates, hd, hd);
  Var candidate = tanh(add(slice(gx, 2 * hd, hd), mul(reset, slice(gh, 2 * hd, hd))));
  return add(h, mul(update, sub(candidate, h)));
}

Var ffnn_tanh(Var x, const FfnnWeights& w) {
  Var hidden = tanh(affine(x, w.hidden, w.hidden_bias));
  Var out = matvec(w.output, hidden);
  return w.output_bias.valid() ? add(out, w.output_bias) : out;
}

}  // namespace copycat::nd
