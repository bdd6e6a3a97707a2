#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace rahp::core {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string shape_to_string(const Shape& shape);

/// Graph node behind a Tensor handle. Data is written once at creation;
/// only `grad` changes afterwards (and parameter data, via the optimizer).
template <typename T>
struct Node {
  Shape shape;
  std::vector<T> data;
  std::vector<T> grad;  // empty until a backward pass reaches this node
  bool requires_grad = false;
  bool is_leaf = true;
  std::vector<std::shared_ptr<Node>> parents;
  // Propagates this node's grad into its parents' grads.
  std::function<void(Node&)> backward_fn;

  std::span<T> ensure_grad();
};

/// Shared handle to a node in a reverse-mode computation graph.
///
/// Leaves (parameters, inputs) accumulate gradients across backward calls
/// until `zero_grad()` is called. Intermediate nodes are reset at the start
/// of each backward call, so calling backward twice on the same root doubles
/// leaf gradients and nothing else.
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;
  explicit Tensor(std::shared_ptr<Node<T>> node) : node_(std::move(node)) {}

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor filled(Shape shape, T value, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<T> values, bool requires_grad = false);
  static Tensor scalar(T value, bool requires_grad = false);
  static Tensor vector(std::vector<T> values, bool requires_grad = false);

  bool defined() const { return static_cast<bool>(node_); }
  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t dim(std::size_t axis) const { return node_->shape.at(axis); }
  std::size_t size() const { return node_->data.size(); }

  std::span<const T> data() const { return node_->data; }
  // Direct write access; intended for leaves (initialization, optimizer).
  std::span<T> mutable_data() { return node_->data; }

  bool has_grad() const { return !node_->grad.empty(); }
  std::span<const T> grad() const { return node_->grad; }
  std::span<T> mutable_grad() { return node_->ensure_grad(); }
  void zero_grad();

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool value);
  bool is_leaf() const { return node_->is_leaf; }

  T item() const;
  T at(std::size_t i) const;
  T at(std::size_t row, std::size_t col) const;

  /// New leaf sharing no lineage with this tensor; gradients stop here.
  Tensor detach() const;

  /// Reverse sweep from a scalar root. Throws std::invalid_argument when
  /// the root is not a single element.
  void backward() const;

  const std::shared_ptr<Node<T>>& node() const { return node_; }

 private:
  std::shared_ptr<Node<T>> node_;
};

/// While alive, ops on this thread record no lineage (evaluation mode).
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_recording_enabled();

/// Builds an op result. When recording is on and any parent requires a
/// gradient, the result keeps `parents` and `backward_fn`; otherwise it is
/// a constant. Exposed so callers can define custom differentiable ops.
template <typename T>
Tensor<T> make_op_result(Shape shape, std::vector<T> values, std::vector<Tensor<T>> parents,
                         std::function<void(Node<T>&)> backward_fn);

extern template struct Node<float>;
extern template struct Node<double>;
extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace rahp::core
