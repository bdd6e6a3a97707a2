#include "rahp/core/tensor.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace rahp::core {

namespace {
thread_local bool g_record_grad = true;
}

std::size_t numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t extent : shape) n *= extent;
  return n;
}

std::string shape_to_string(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << ", ";
    out << shape[i];
  }
  out << ']';
  return out.str();
}

NoGradGuard::NoGradGuard() : previous_(g_record_grad) { g_record_grad = false; }
NoGradGuard::~NoGradGuard() { g_record_grad = previous_; }

bool grad_recording_enabled() { return g_record_grad; }

template <typename T>
std::span<T> Node<T>::ensure_grad() {
  if (grad.empty()) grad.assign(data.size(), T(0));
  return grad;
}

template <typename T>
Tensor<T> Tensor<T>::from(Shape shape, std::vector<T> values, bool requires_grad) {
  for (std::size_t extent : shape) {
    if (extent == 0) throw std::invalid_argument("tensor extents must be positive, got " + shape_to_string(shape));
  }
  if (numel(shape) != values.size()) {
    throw std::invalid_argument("tensor shape " + shape_to_string(shape) + " does not match " +
                                std::to_string(values.size()) + " values");
  }
  auto node = std::make_shared<Node<T>>();
  node->shape = std::move(shape);
  node->data = std::move(values);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

template <typename T>
Tensor<T> Tensor<T>::zeros(Shape shape, bool requires_grad) {
  const std::size_t n = numel(shape);
  return from(std::move(shape), std::vector<T>(n, T(0)), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::filled(Shape shape, T value, bool requires_grad) {
  const std::size_t n = numel(shape);
  return from(std::move(shape), std::vector<T>(n, value), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::scalar(T value, bool requires_grad) {
  return from({1}, {value}, requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::vector(std::vector<T> values, bool requires_grad) {
  const std::size_t n = values.size();
  return from({n}, std::move(values), requires_grad);
}

template <typename T>
void Tensor<T>::zero_grad() {
  if (!node_->grad.empty()) std::fill(node_->grad.begin(), node_->grad.end(), T(0));
}

template <typename T>
void Tensor<T>::set_requires_grad(bool value) {
  if (!node_->is_leaf) throw std::logic_error("requires_grad can only be changed on leaf tensors");
  node_->requires_grad = value;
}

template <typename T>
T Tensor<T>::item() const {
  if (size() != 1) throw std::invalid_argument("item() on tensor of shape " + shape_to_string(shape()));
  return node_->data[0];
}

template <typename T>
T Tensor<T>::at(std::size_t i) const {
  return node_->data.at(i);
}

template <typename T>
T Tensor<T>::at(std::size_t row, std::size_t col) const {
  if (rank() != 2) throw std::invalid_argument("at(row, col) needs a matrix");
  if (row >= dim(0) || col >= dim(1)) throw std::out_of_range("matrix index out of range");
  return node_->data[row * dim(1) + col];
}

template <typename T>
Tensor<T> Tensor<T>::detach() const {
  return from(node_->shape, node_->data, false);
}

template <typename T>
void Tensor<T>::backward() const {
  if (size() != 1) {
    throw std::invalid_argument("backward() needs a scalar root, got shape " + shape_to_string(shape()));
  }
  if (!node_->requires_grad) return;

  // Iterative post-order DFS gives a topological order with each node once.
  std::vector<Node<T>*> order;
  std::unordered_set<Node<T>*> visited;
  std::vector<std::pair<Node<T>*, std::size_t>> stack;
  stack.emplace_back(node_.get(), 0);
  visited.insert(node_.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node<T>* parent = node->parents[next++].get();
      if (parent->requires_grad && visited.insert(parent).second) stack.emplace_back(parent, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (Node<T>* node : order) {
    if (!node->is_leaf) node->grad.assign(node->data.size(), T(0));
  }
  node_->ensure_grad()[0] += T(1);

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node<T>* node = *it;
    if (!node->is_leaf && node->backward_fn) node->backward_fn(*node);
  }
}

template <typename T>
Tensor<T> make_op_result(Shape shape, std::vector<T> values, std::vector<Tensor<T>> parents,
                         std::function<void(Node<T>&)> backward_fn) {
  Tensor<T> result = Tensor<T>::from(std::move(shape), std::move(values), false);
  if (!g_record_grad) return result;
  const bool any = std::any_of(parents.begin(), parents.end(),
                               [](const Tensor<T>& p) { return p.defined() && p.requires_grad(); });
  if (!any) return result;
  auto& node = *result.node();
  node.requires_grad = true;
  node.is_leaf = false;
  node.parents.reserve(parents.size());
  for (auto& p : parents) {
    if (p.defined()) node.parents.push_back(p.node());
  }
  node.backward_fn = std::move(backward_fn);
  return result;
}

template struct Node<float>;
template struct Node<double>;
template class Tensor<float>;
template class Tensor<double>;
template Tensor<float> make_op_result(Shape, std::vector<float>, std::vector<Tensor<float>>,
                                      std::function<void(Node<float>&)>);
template Tensor<double> make_op_result(Shape, std::vector<double>, std::vector<Tensor<double>>,
                                       std::function<void(Node<double>&)>);

}  // namespace rahp::core
