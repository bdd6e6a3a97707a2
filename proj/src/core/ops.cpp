#include "rahp/core/ops.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rahp::core {

namespace {

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<RowMatrix<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const RowMatrix<T>>;

void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

template <typename T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* op) {
  require(a.defined() && b.defined(), std::string(op) + ": undefined operand");
  require(a.shape() == b.shape(), std::string(op) + ": shape mismatch " + shape_to_string(a.shape()) + " vs " +
                                      shape_to_string(b.shape()));
}

template <typename T>
void require_matrix(const Tensor<T>& a, const char* op) {
  require(a.defined() && a.rank() == 2, std::string(op) + ": expected a matrix, got " +
                                            (a.defined() ? shape_to_string(a.shape()) : std::string("undefined")));
}

template <typename T>
void require_vector(const Tensor<T>& a, const char* op) {
  require(a.defined() && a.rank() == 1, std::string(op) + ": expected a vector, got " +
                                            (a.defined() ? shape_to_string(a.shape()) : std::string("undefined")));
}

template <typename T>
Node<T>* raw(const Tensor<T>& t) {
  return t.node().get();
}

template <typename T, typename Forward, typename Derivative>
Tensor<T> unary_elementwise(const Tensor<T>& a, Forward forward, Derivative derivative_from_output) {
  std::vector<T> out(a.size());
  const auto in = a.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = forward(in[i]);
  Node<T>* pa = raw(a);
  return make_op_result<T>(a.shape(), std::move(out), {a}, [pa, derivative_from_output](Node<T>& self) {
    if (!pa->requires_grad) return;
    auto g = pa->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) {
      g[i] += self.grad[i] * derivative_from_output(pa->data[i], self.data[i]);
    }
  });
}

}  // namespace

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a, b, "add");
  std::vector<T> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
  Node<T>* pa = raw(a);
  Node<T>* pb = raw(b);
  return make_op_result<T>(a.shape(), std::move(out), {a, b}, [pa, pb](Node<T>& self) {
    for (Node<T>* p : {pa, pb}) {
      if (!p->requires_grad) continue;
      auto g = p->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
  });
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a, b, "sub");
  std::vector<T> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] - b.data()[i];
  Node<T>* pa = raw(a);
  Node<T>* pb = raw(b);
  return make_op_result<T>(a.shape(), std::move(out), {a, b}, [pa, pb](Node<T>& self) {
    if (pa->requires_grad) {
      auto g = pa->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (pb->requires_grad) {
      auto g = pb->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= self.grad[i];
    }
  });
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a, b, "mul");
  std::vector<T> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * b.data()[i];
  Node<T>* pa = raw(a);
  Node<T>* pb = raw(b);
  return make_op_result<T>(a.shape(), std::move(out), {a, b}, [pa, pb](Node<T>& self) {
    if (pa->requires_grad) {
      auto g = pa->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * pb->data[i];
    }
    if (pb->requires_grad) {
      auto g = pb->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * pa->data[i];
    }
  });
}

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T factor) {
  std::vector<T> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * factor;
  Node<T>* pa = raw(a);
  return make_op_result<T>(a.shape(), std::move(out), {a}, [pa, factor](Node<T>& self) {
    if (!pa->requires_grad) return;
    auto g = pa->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * factor;
  });
}

template <typename T>
Tensor<T> tanh(const Tensor<T>& a) {
  return unary_elementwise(
      a, [](T x) { return std::tanh(x); }, [](T, T y) { return T(1) - y * y; });
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& a) {
  return unary_elementwise(
      a,
      [](T x) {
        if (x >= 0) return T(1) / (T(1) + std::exp(-x));
        const T e = std::exp(x);
        return e / (T(1) + e);
      },
      [](T, T y) { return y * (T(1) - y); });
}

template <typename T>
Tensor<T> relu(const Tensor<T>& a) {
  return unary_elementwise(
      a, [](T x) { return x > T(0) ? x : T(0); }, [](T x, T) { return x > T(0) ? T(1) : T(0); });
}

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  require(a.defined() && b.defined(), "matmul: undefined operand");
  require(a.rank() == 1 || a.rank() == 2, "matmul: left operand must be rank 1 or 2");
  require(b.rank() == 1 || b.rank() == 2, "matmul: right operand must be rank 1 or 2");
  const std::size_t m = a.rank() == 2 ? a.dim(0) : 1;
  const std::size_t k = a.rank() == 2 ? a.dim(1) : a.dim(0);
  const std::size_t kb = b.dim(0);
  const std::size_t n = b.rank() == 2 ? b.dim(1) : 1;
  require(k == kb, "matmul: inner dimension mismatch " + shape_to_string(a.shape()) + " x " +
                       shape_to_string(b.shape()));
  Shape shape;
  if (a.rank() == 2) shape.push_back(m);
  if (b.rank() == 2) shape.push_back(n);
  if (shape.empty()) shape.push_back(1);

  std::vector<T> out(m * n);
  MatMap<T>(out.data(), m, n).noalias() = ConstMatMap<T>(a.data().data(), m, k) * ConstMatMap<T>(b.data().data(), k, n);
  Node<T>* pa = raw(a);
  Node<T>* pb = raw(b);
  return make_op_result<T>(std::move(shape), std::move(out), {a, b}, [pa, pb, m, k, n](Node<T>& self) {
    ConstMatMap<T> grad_out(self.grad.data(), m, n);
    if (pa->requires_grad) {
      MatMap<T>(pa->ensure_grad().data(), m, k).noalias() +=
          grad_out * ConstMatMap<T>(pb->data.data(), k, n).transpose();
    }
    if (pb->requires_grad) {
      MatMap<T>(pb->ensure_grad().data(), k, n).noalias() +=
          ConstMatMap<T>(pa->data.data(), m, k).transpose() * grad_out;
    }
  });
}

template <typename T>
Tensor<T> transpose(const Tensor<T>& a) {
  require_matrix(a, "transpose");
  const std::size_t m = a.dim(0);
  const std::size_t n = a.dim(1);
  std::vector<T> out(m * n);
  MatMap<T>(out.data(), n, m) = ConstMatMap<T>(a.data().data(), m, n).transpose();
  Node<T>* pa = raw(a);
  return make_op_result<T>({n, m}, std::move(out), {a}, [pa, m, n](Node<T>& self) {
    if (!pa->requires_grad) return;
    MatMap<T>(pa->ensure_grad().data(), m, n) += ConstMatMap<T>(self.grad.data(), n, m).transpose();
  });
}

template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias) {
  require(x.defined() && (x.rank() == 1 || x.rank() == 2), "linear: input must be rank 1 or 2");
  require_matrix(weight, "linear");
  const std::size_t rows = x.rank() == 2 ? x.dim(0) : 1;
  const std::size_t in = x.rank() == 2 ? x.dim(1) : x.dim(0);
  const std::size_t out_dim = weight.dim(0);
  require(weight.dim(1) == in, "linear: weight " + shape_to_string(weight.shape()) + " does not accept input " +
                                   shape_to_string(x.shape()));
  if (bias.defined()) {
    require(bias.rank() == 1 && bias.dim(0) == out_dim,
            "linear: bias " + shape_to_string(bias.shape()) + " does not match weight " + shape_to_string(weight.shape()));
  }
  Shape shape = x.rank() == 2 ? Shape{rows, out_dim} : Shape{out_dim};
  std::vector<T> out(rows * out_dim);
  MatMap<T> result(out.data(), rows, out_dim);
  result.noalias() = ConstMatMap<T>(x.data().data(), rows, in) * ConstMatMap<T>(weight.data().data(), out_dim, in).transpose();
  if (bias.defined()) {
    const auto bias_row = ConstMatMap<T>(bias.data().data(), 1, out_dim);
    result.rowwise() += bias_row.row(0);
  }
  Node<T>* px = raw(x);
  Node<T>* pw = raw(weight);
  Node<T>* pb = bias.defined() ? raw(bias) : nullptr;
  return make_op_result<T>(std::move(shape), std::move(out), {x, weight, bias},
                           [px, pw, pb, rows, in, out_dim](Node<T>& self) {
                             ConstMatMap<T> grad_out(self.grad.data(), rows, out_dim);
                             if (px->requires_grad) {
                               MatMap<T>(px->ensure_grad().data(), rows, in).noalias() +=
                                   grad_out * ConstMatMap<T>(pw->data.data(), out_dim, in);
                             }
                             if (pw->requires_grad) {
                               MatMap<T>(pw->ensure_grad().data(), out_dim, in).noalias() +=
                                   grad_out.transpose() * ConstMatMap<T>(px->data.data(), rows, in);
                             }
                             if (pb && pb->requires_grad) {
                               MatMap<T>(pb->ensure_grad().data(), 1, out_dim) += grad_out.colwise().sum();
                             }
                           });
}

template <typename T>
Tensor<T> sum(const Tensor<T>& a) {
  T total = T(0);
  for (T v : a.data()) total += v;
  Node<T>* pa = raw(a);
  return make_op_result<T>({1}, {total}, {a}, [pa](Node<T>& self) {
    if (!pa->requires_grad) return;
    auto g = pa->ensure_grad();
    for (auto& v : g) v += self.grad[0];
  });
}

template <typename T>
Tensor<T> dot(const Tensor<T>& a, const Tensor<T>& b) {
  require_vector(a, "dot");
  require_same_shape(a, b, "dot");
  T total = T(0);
  for (std::size_t i = 0; i < a.size(); ++i) total += a.data()[i] * b.data()[i];
  Node<T>* pa = raw(a);
  Node<T>* pb = raw(b);
  return make_op_result<T>({1}, {total}, {a, b}, [pa, pb](Node<T>& self) {
    const T upstream = self.grad[0];
    if (pa->requires_grad) {
      auto g = pa->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += upstream * pb->data[i];
    }
    if (pb->requires_grad) {
      auto g = pb->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += upstream * pa->data[i];
    }
  });
}

template <typename T>
Tensor<T> concat(const std::vector<Tensor<T>>& parts) {
  require(!parts.empty(), "concat: no parts");
  std::vector<T> out;
  std::vector<Node<T>*> nodes;
  for (const auto& p : parts) {
    require_vector(p, "concat");
    out.insert(out.end(), p.data().begin(), p.data().end());
    nodes.push_back(raw(p));
  }
  const std::size_t total = out.size();
  return make_op_result<T>({total}, std::move(out), parts, [nodes](Node<T>& self) {
    std::size_t offset = 0;
    for (Node<T>* p : nodes) {
      const std::size_t n = p->data.size();
      if (p->requires_grad) {
        auto g = p->ensure_grad();
        for (std::size_t i = 0; i < n; ++i) g[i] += self.grad[offset + i];
      }
      offset += n;
    }
  });
}

template <typename T>
Tensor<T> concat_columns(const std::vector<Tensor<T>>& parts) {
  require(!parts.empty(), "concat_columns: no parts");
  const std::size_t rows = parts.front().defined() && parts.front().rank() == 2 ? parts.front().dim(0) : 0;
  std::size_t cols = 0;
  std::vector<Node<T>*> nodes;
  std::vector<std::size_t> widths;
  for (const auto& p : parts) {
    require_matrix(p, "concat_columns");
    require(p.dim(0) == rows, "concat_columns: row count mismatch");
    cols += p.dim(1);
    nodes.push_back(raw(p));
    widths.push_back(p.dim(1));
  }
  std::vector<T> out(rows * cols);
  std::size_t offset = 0;
  for (const auto& p : parts) {
    const std::size_t w = p.dim(1);
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy_n(p.data().begin() + r * w, w, out.begin() + r * cols + offset);
    }
    offset += w;
  }
  return make_op_result<T>({rows, cols}, std::move(out), parts, [nodes, widths, rows, cols](Node<T>& self) {
    std::size_t col_offset = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const std::size_t w = widths[i];
      if (nodes[i]->requires_grad) {
        auto g = nodes[i]->ensure_grad();
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t c = 0; c < w; ++c) g[r * w + c] += self.grad[r * cols + col_offset + c];
        }
      }
      col_offset += w;
    }
  });
}

template <typename T>
Tensor<T> stack_rows(const std::vector<Tensor<T>>& rows) {
  require(!rows.empty(), "stack_rows: no rows");
  require_vector(rows.front(), "stack_rows");
  const std::size_t n = rows.front().dim(0);
  std::vector<T> out;
  out.reserve(rows.size() * n);
  std::vector<Node<T>*> nodes;
  for (const auto& r : rows) {
    require_vector(r, "stack_rows");
    require(r.dim(0) == n, "stack_rows: row length mismatch");
    out.insert(out.end(), r.data().begin(), r.data().end());
    nodes.push_back(raw(r));
  }
  return make_op_result<T>({rows.size(), n}, std::move(out), rows, [nodes, n](Node<T>& self) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (!nodes[i]->requires_grad) continue;
      auto g = nodes[i]->ensure_grad();
      for (std::size_t c = 0; c < n; ++c) g[c] += self.grad[i * n + c];
    }
  });
}

template <typename T>
Tensor<T> row(const Tensor<T>& matrix, std::size_t index) {
  require_matrix(matrix, "row");
  require(index < matrix.dim(0), "row: index out of range");
  const std::size_t n = matrix.dim(1);
  std::vector<T> out(matrix.data().begin() + index * n, matrix.data().begin() + (index + 1) * n);
  Node<T>* pm = raw(matrix);
  return make_op_result<T>({n}, std::move(out), {matrix}, [pm, index, n](Node<T>& self) {
    if (!pm->requires_grad) return;
    auto g = pm->ensure_grad();
    for (std::size_t c = 0; c < n; ++c) g[index * n + c] += self.grad[c];
  });
}

template <typename T>
Tensor<T> slice(const Tensor<T>& vector, std::size_t begin, std::size_t length) {
  require_vector(vector, "slice");
  require(length > 0 && begin + length <= vector.dim(0), "slice: range out of bounds");
  std::vector<T> out(vector.data().begin() + begin, vector.data().begin() + begin + length);
  Node<T>* pv = raw(vector);
  return make_op_result<T>({length}, std::move(out), {vector}, [pv, begin, length](Node<T>& self) {
    if (!pv->requires_grad) return;
    auto g = pv->ensure_grad();
    for (std::size_t i = 0; i < length; ++i) g[begin + i] += self.grad[i];
  });
}

namespace {

// Row-wise masked softmax on raw buffers; shared by the vector and matrix ops.
template <typename T>
void masked_softmax_rows(std::span<const T> in, std::span<T> out, std::size_t rows, std::size_t cols,
                         const std::vector<bool>& mask) {
  for (std::size_t r = 0; r < rows; ++r) {
    const T* x = in.data() + r * cols;
    T* y = out.data() + r * cols;
    T max_logit = -std::numeric_limits<T>::infinity();
    for (std::size_t c = 0; c < cols; ++c) {
      if (mask[c]) max_logit = std::max(max_logit, x[c]);
    }
    T total = T(0);
    for (std::size_t c = 0; c < cols; ++c) {
      y[c] = mask[c] ? std::exp(x[c] - max_logit) : T(0);
      total += y[c];
    }
    for (std::size_t c = 0; c < cols; ++c) y[c] /= total;
  }
}

template <typename T>
void masked_softmax_backward(Node<T>& self, Node<T>* parent, std::size_t rows, std::size_t cols) {
  if (!parent->requires_grad) return;
  auto g = parent->ensure_grad();
  for (std::size_t r = 0; r < rows; ++r) {
    const T* y = self.data.data() + r * cols;
    const T* gy = self.grad.data() + r * cols;
    T inner = T(0);
    for (std::size_t c = 0; c < cols; ++c) inner += y[c] * gy[c];
    for (std::size_t c = 0; c < cols; ++c) g[r * cols + c] += y[c] * (gy[c] - inner);
  }
}

void require_support(const std::vector<bool>& mask, std::size_t cols) {
  require(mask.size() == cols, "softmax_masked: mask length " + std::to_string(mask.size()) +
                                   " does not match " + std::to_string(cols) + " logits");
  if (std::none_of(mask.begin(), mask.end(), [](bool b) { return b; })) {
    throw std::domain_error("empty attention support");
  }
}

}  // namespace

template <typename T>
Tensor<T> softmax_masked(const Tensor<T>& logits, const std::vector<bool>& mask) {
  require_vector(logits, "softmax_masked");
  const std::size_t n = logits.dim(0);
  require_support(mask, n);
  for (T v : logits.data()) {
    if (!std::isfinite(v)) throw std::domain_error("softmax_masked: non-finite logit");
  }
  std::vector<T> out(n);
  masked_softmax_rows<T>(logits.data(), out, 1, n, mask);
  Node<T>* pl = raw(logits);
  return make_op_result<T>({n}, std::move(out), {logits},
                           [pl, n](Node<T>& self) { masked_softmax_backward(self, pl, 1, n); });
}

template <typename T>
Tensor<T> softmax_masked_rows(const Tensor<T>& logits, const std::vector<bool>& column_mask) {
  require_matrix(logits, "softmax_masked_rows");
  const std::size_t rows = logits.dim(0);
  const std::size_t cols = logits.dim(1);
  require_support(column_mask, cols);
  for (T v : logits.data()) {
    if (!std::isfinite(v)) throw std::domain_error("softmax_masked_rows: non-finite logit");
  }
  std::vector<T> out(rows * cols);
  masked_softmax_rows<T>(logits.data(), out, rows, cols, column_mask);
  Node<T>* pl = raw(logits);
  return make_op_result<T>({rows, cols}, std::move(out), {logits},
                           [pl, rows, cols](Node<T>& self) { masked_softmax_backward(self, pl, rows, cols); });
}

template <typename T>
Tensor<T> softmax(const Tensor<T>& logits) {
  require_vector(logits, "softmax");
  return softmax_masked(logits, std::vector<bool>(logits.dim(0), true));
}

template <typename T>
Tensor<T> embedding_lookup(const Tensor<T>& table, std::span<const std::size_t> ids,
                           std::shared_ptr<const std::vector<bool>> trainable_rows) {
  require_matrix(table, "embedding_lookup");
  require(!ids.empty(), "embedding_lookup: no ids");
  const std::size_t vocab = table.dim(0);
  const std::size_t d = table.dim(1);
  if (trainable_rows) require(trainable_rows->size() == vocab, "embedding_lookup: trainable mask size mismatch");
  std::vector<T> out(ids.size() * d);
  for (std::size_t t = 0; t < ids.size(); ++t) {
    require(ids[t] < vocab, "embedding_lookup: id " + std::to_string(ids[t]) + " out of range");
    std::copy_n(table.data().begin() + ids[t] * d, d, out.begin() + t * d);
  }
  std::vector<std::size_t> id_copy(ids.begin(), ids.end());
  Node<T>* pt = raw(table);
  return make_op_result<T>({ids.size(), d}, std::move(out), {table},
                           [pt, id_copy = std::move(id_copy), trainable_rows, d](Node<T>& self) {
                             if (!pt->requires_grad) return;
                             auto g = pt->ensure_grad();
                             for (std::size_t t = 0; t < id_copy.size(); ++t) {
                               const std::size_t id = id_copy[t];
                               if (trainable_rows && !(*trainable_rows)[id]) continue;
                               for (std::size_t c = 0; c < d; ++c) g[id * d + c] += self.grad[t * d + c];
                             }
                           });
}

template <typename T>
Tensor<T> unfold_rows(const Tensor<T>& matrix, std::size_t width) {
  require_matrix(matrix, "unfold_rows");
  const std::size_t length = matrix.dim(0);
  const std::size_t d = matrix.dim(1);
  require(width >= 1 && width <= length, "unfold_rows: window wider than sequence");
  const std::size_t windows = length - width + 1;
  const std::size_t span_width = width * d;
  std::vector<T> out(windows * span_width);
  for (std::size_t r = 0; r < windows; ++r) {
    std::copy_n(matrix.data().begin() + r * d, span_width, out.begin() + r * span_width);
  }
  Node<T>* pm = raw(matrix);
  return make_op_result<T>({windows, span_width}, std::move(out), {matrix},
                           [pm, windows, span_width, d](Node<T>& self) {
                             if (!pm->requires_grad) return;
                             auto g = pm->ensure_grad();
                             for (std::size_t r = 0; r < windows; ++r) {
                               for (std::size_t c = 0; c < span_width; ++c) g[r * d + c] += self.grad[r * span_width + c];
                             }
                           });
}

template <typename T>
Tensor<T> max_over_rows(const Tensor<T>& matrix) {
  require_matrix(matrix, "max_over_rows");
  const std::size_t rows = matrix.dim(0);
  const std::size_t cols = matrix.dim(1);
  std::vector<T> out(cols);
  std::vector<std::size_t> argmax(cols, 0);
  const auto in = matrix.data();
  for (std::size_t c = 0; c < cols; ++c) {
    T best = in[c];
    for (std::size_t r = 1; r < rows; ++r) {
      if (in[r * cols + c] > best) {
        best = in[r * cols + c];
        argmax[c] = r;
      }
    }
    out[c] = best;
  }
  Node<T>* pm = raw(matrix);
  return make_op_result<T>({cols}, std::move(out), {matrix}, [pm, argmax = std::move(argmax), cols](Node<T>& self) {
    if (!pm->requires_grad) return;
    auto g = pm->ensure_grad();
    for (std::size_t c = 0; c < cols; ++c) g[argmax[c] * cols + c] += self.grad[c];
  });
}

template <typename T>
Tensor<T> dropout(const Tensor<T>& a, double probability, Rng& rng) {
  require(probability >= 0.0 && probability < 1.0, "dropout: probability must be in [0, 1)");
  if (probability == 0.0) return a;
  const T keep_scale = T(1.0 / (1.0 - probability));
  std::vector<T> factors(a.size());
  for (auto& f : factors) f = rng.uniform() < probability ? T(0) : keep_scale;
  std::vector<T> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * factors[i];
  Node<T>* pa = raw(a);
  return make_op_result<T>(a.shape(), std::move(out), {a}, [pa, factors = std::move(factors)](Node<T>& self) {
    if (!pa->requires_grad) return;
    auto g = pa->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * factors[i];
  });
}

template <typename T>
Tensor<T> bce_with_logits(const Tensor<T>& logit, double label, double clamp) {
  require(logit.defined() && logit.size() == 1, "bce_with_logits: expected a single logit");
  require(label >= 0.0 && label <= 1.0, "bce_with_logits: label must be in [0, 1]");
  const double z = std::clamp(static_cast<double>(logit.item()), -clamp, clamp);
  const double loss = std::max(z, 0.0) - z * label + std::log1p(std::exp(-std::abs(z)));
  const double slope = 1.0 / (1.0 + std::exp(-z)) - label;
  Node<T>* pl = raw(logit);
  return make_op_result<T>({1}, {static_cast<T>(loss)}, {logit}, [pl, slope](Node<T>& self) {
    if (!pl->requires_grad) return;
    pl->ensure_grad()[0] += self.grad[0] * static_cast<T>(slope);
  });
}

template <typename T>
Tensor<T> cross_entropy(const Tensor<T>& logits, std::size_t label) {
  require_vector(logits, "cross_entropy");
  const std::size_t n = logits.dim(0);
  require(label < n, "cross_entropy: label out of range");
  const auto x = logits.data();
  const T max_logit = *std::max_element(x.begin(), x.end());
  T total = T(0);
  for (T v : x) total += std::exp(v - max_logit);
  const T log_normalizer = max_logit + std::log(total);
  std::vector<T> probabilities(n);
  for (std::size_t i = 0; i < n; ++i) probabilities[i] = std::exp(x[i] - log_normalizer);
  Node<T>* pl = raw(logits);
  return make_op_result<T>({1}, {log_normalizer - x[label]}, {logits},
                           [pl, probabilities = std::move(probabilities), label](Node<T>& self) {
                             if (!pl->requires_grad) return;
                             auto g = pl->ensure_grad();
                             for (std::size_t i = 0; i < g.size(); ++i) {
                               g[i] += self.grad[0] * (probabilities[i] - (i == label ? T(1) : T(0)));
                             }
                           });
}

#define RAHP_INSTANTIATE_OPS(T)                                                                              \
  template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                                                \
  template Tensor<T> sub(const Tensor<T>&, const Tensor<T>&);                                                \
  template Tensor<T> mul(const Tensor<T>&, const Tensor<T>&);                                                \
  template Tensor<T> scale(const Tensor<T>&, T);                                                             \
  template Tensor<T> tanh(const Tensor<T>&);                                                                 \
  template Tensor<T> sigmoid(const Tensor<T>&);                                                              \
  template Tensor<T> relu(const Tensor<T>&);                                                                 \
  template Tensor<T> matmul(const Tensor<T>&, const Tensor<T>&);                                             \
  template Tensor<T> transpose(const Tensor<T>&);                                                            \
  template Tensor<T> linear(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);                           \
  template Tensor<T> sum(const Tensor<T>&);                                                                  \
  template Tensor<T> dot(const Tensor<T>&, const Tensor<T>&);                                                \
  template Tensor<T> concat(const std::vector<Tensor<T>>&);                                                  \
  template Tensor<T> concat_columns(const std::vector<Tensor<T>>&);                                          \
  template Tensor<T> stack_rows(const std::vector<Tensor<T>>&);                                              \
  template Tensor<T> row(const Tensor<T>&, std::size_t);                                                     \
  template Tensor<T> slice(const Tensor<T>&, std::size_t, std::size_t);                                      \
  template Tensor<T> softmax_masked(const Tensor<T>&, const std::vector<bool>&);                             \
  template Tensor<T> softmax_masked_rows(const Tensor<T>&, const std::vector<bool>&);                        \
  template Tensor<T> softmax(const Tensor<T>&);                                                              \
  template Tensor<T> embedding_lookup(const Tensor<T>&, std::span<const std::size_t>,                        \
                                      std::shared_ptr<const std::vector<bool>>);                             \
  template Tensor<T> unfold_rows(const Tensor<T>&, std::size_t);                                             \
  template Tensor<T> max_over_rows(const Tensor<T>&);                                                        \
  template Tensor<T> dropout(const Tensor<T>&, double, Rng&);                                                \
  template Tensor<T> bce_with_logits(const Tensor<T>&, double, double);                                      \
  template Tensor<T> cross_entropy(const Tensor<T>&, std::size_t);

RAHP_INSTANTIATE_OPS(float)
RAHP_INSTANTIATE_OPS(double)

#undef RAHP_INSTANTIATE_OPS

}  // namespace rahp::core
