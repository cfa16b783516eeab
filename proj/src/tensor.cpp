#include "alphagan/tensor.hpp"

#include <numeric>
#include <sstream>

namespace alphagan {

std::string shape_str(const Shape& s) {
    std::ostringstream out;
    out << '[';
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out << ',';
        out << s[i];
    }
    out << ']';
    return out.str();
}

static std::size_t shape_numel(const Shape& s) {
    std::size_t n = 1;
    for (std::size_t d : s) n *= d;
    return n;
}

Tensor::Tensor(Shape shape, std::vector<double> values) : shape_(std::move(shape)) {
    for (std::size_t d : shape_) {
        if (d == 0) throw ShapeError("tensor dimensions must be positive, got " + shape_str(shape_));
    }
    if (shape_numel(shape_) != values.size()) {
        throw ShapeError("shape " + shape_str(shape_) + " does not match " +
                         std::to_string(values.size()) + " values");
    }
    values_ = std::make_shared<const std::vector<double>>(std::move(values));
}

Tensor Tensor::scalar(double v) { return Tensor({1}, {v}); }

Tensor Tensor::zeros(Shape shape) {
    std::size_t n = shape_numel(shape);
    return Tensor(std::move(shape), std::vector<double>(n, 0.0));
}

Tensor Tensor::full(Shape shape, double v) {
    std::size_t n = shape_numel(shape);
    return Tensor(std::move(shape), std::vector<double>(n, v));
}

Tensor Tensor::row_vector(std::vector<double> values) {
    Shape s{values.size()};
    return Tensor(std::move(s), std::move(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
    return Tensor({rows, cols}, std::move(values));
}

std::size_t Tensor::numel() const { return values_ ? values_->size() : 0; }

std::size_t Tensor::rows() const {
    if (rank() != 2) throw ShapeError("rows(): tensor is not 2-D, shape " + shape_str(shape_));
    return shape_[0];
}

std::size_t Tensor::cols() const {
    if (rank() != 2) throw ShapeError("cols(): tensor is not 2-D, shape " + shape_str(shape_));
    return shape_[1];
}

const std::vector<double>& Tensor::values() const {
    if (!values_) throw std::logic_error("access to default-constructed tensor");
    return *values_;
}

double Tensor::value() const {
    if (numel() != 1) {
        throw ShapeError("value(): tensor has shape " + shape_str(shape_) + ", expected one element");
    }
    return (*values_)[0];
}

const std::vector<double>* Tensor::grad() const {
    if (!tape_) return nullptr;
    return tape_->grad_of(node_);
}

Tensor Tensor::detached() const {
    Tensor t = *this;
    t.tape_ = nullptr;
    t.node_ = -1;
    return t;
}

Tensor Tape::watch(const Tensor& t) {
    if (consumed_) throw TapeError("cannot watch a tensor on a consumed tape");
    if (t.on_tape()) throw TapeError("tensor is already attached to a tape");
    Tensor out = t;
    out.tape_ = this;
    out.node_ = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{t.numel(), {}, {}});
    return out;
}

Tensor Tape::emit(Shape shape, std::vector<double> values, BackwardFn back) {
    if (consumed_) throw TapeError("cannot record an op on a consumed tape");
    Tensor out(std::move(shape), std::move(values));
    out.tape_ = this;
    out.node_ = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{out.numel(), {}, std::move(back)});
    return out;
}

void Tape::accumulate(int node, const double* g, std::size_t n) {
    if (node < 0) return;  // constant input
    Node& nd = nodes_[static_cast<std::size_t>(node)];
    if (nd.grad.empty()) nd.grad.assign(nd.size, 0.0);
    for (std::size_t i = 0; i < n; ++i) nd.grad[i] += g[i];
}

void Tape::accumulate_at(int node, std::size_t index, double g) {
    if (node < 0) return;
    Node& nd = nodes_[static_cast<std::size_t>(node)];
    if (nd.grad.empty()) nd.grad.assign(nd.size, 0.0);
    nd.grad[index] += g;
}

const std::vector<double>* Tape::grad_of(int node) const {
    if (node < 0 || static_cast<std::size_t>(node) >= nodes_.size()) return nullptr;
    const Node& nd = nodes_[static_cast<std::size_t>(node)];
    return nd.grad.empty() ? nullptr : &nd.grad;
}

void Tape::backward(const Tensor& output) {
    if (consumed_) throw TapeError("backward() called twice on the same tape");
    if (nodes_.empty()) throw TapeError("backward() on an empty tape");
    if (output.tape_ != this) throw TapeError("output tensor does not belong to this tape");
    if (output.numel() != 1) {
        throw ShapeError("backward() requires a single-element output, got shape " +
                         shape_str(output.shape()));
    }
    consumed_ = true;
    nodes_[static_cast<std::size_t>(output.node_)].grad.assign(1, 1.0);
    for (int i = output.node_; i >= 0; --i) {
        Node& nd = nodes_[static_cast<std::size_t>(i)];
        if (nd.grad.empty() || !nd.back) continue;
        nd.back(*this, nd.grad);
    }
}

Tape* common_tape(std::initializer_list<const Tensor*> ts) {
    Tape* tape = nullptr;
    for (const Tensor* t : ts) {
        if (!t->on_tape()) continue;
        if (tape && tape != t->tape()) throw TapeError("operands belong to different tapes");
        tape = t->tape();
    }
    return tape;
}

}  // namespace alphagan
