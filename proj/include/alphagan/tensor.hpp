#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace alphagan {

struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Shape = std::vector<std::size_t>;

std::string shape_str(const Shape& s);

class Tape;

/// Dense row-major tensor of f64 values. Immutable after construction; copies
/// share storage. A tensor is either a constant or attached to one Tape.
class Tensor {
  public:
    Tensor() = default;
    Tensor(Shape shape, std::vector<double> values);

    static Tensor scalar(double v);
    static Tensor zeros(Shape shape);
    static Tensor full(Shape shape, double v);
    static Tensor row_vector(std::vector<double> values);
    static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    const Shape& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t numel() const;
    bool defined() const { return values_ != nullptr; }

    // 2-D helpers
    std::size_t rows() const;
    std::size_t cols() const;

    const std::vector<double>& values() const;
    const std::shared_ptr<const std::vector<double>>& storage() const { return values_; }
    double value() const;  // single-element tensors only
    double at(std::size_t i) const { return values()[i]; }
    double at(std::size_t r, std::size_t c) const { return values()[r * cols() + c]; }

    bool on_tape() const { return tape_ != nullptr; }
    Tape* tape() const { return tape_; }
    int node() const { return node_; }

    /// Gradient of the last backward() pass w.r.t. this tensor, or nullptr if
    /// the tensor is a constant or received no gradient.
    const std::vector<double>* grad() const;

    /// Same tensor detached from any tape.
    Tensor detached() const;

  private:
    friend class Tape;
    Shape shape_;
    std::shared_ptr<const std::vector<double>> values_;
    Tape* tape_ = nullptr;
    int node_ = -1;
};

/// Records operations for one reverse pass. Single-threaded; backward() may
/// run once, after which the tape only serves gradient reads.
class Tape {
  public:
    using BackwardFn = std::function<void(Tape&, const std::vector<double>&)>;

    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    /// Registers a leaf variable; returns a tape-attached view of `t`.
    Tensor watch(const Tensor& t);

    /// Runs the reverse pass from a single-element output and consumes the
    /// tape. Gradients stay readable afterwards.
    void backward(const Tensor& output);

    bool consumed() const { return consumed_; }
    std::size_t size() const { return nodes_.size(); }

    // Used by the op implementations.
    Tensor emit(Shape shape, std::vector<double> values, BackwardFn back);
    void accumulate(int node, const double* g, std::size_t n);
    void accumulate_at(int node, std::size_t index, double g);
    const std::vector<double>* grad_of(int node) const;

  private:
    struct Node {
        std::size_t size = 0;
        std::vector<double> grad;  // allocated on first contribution
        BackwardFn back;           // empty for leaves
    };
    std::vector<Node> nodes_;
    bool consumed_ = false;
};

/// Throws TapeError if the tensors live on different tapes; returns the
/// common tape (nullptr when all inputs are constants).
Tape* common_tape(std::initializer_list<const Tensor*> ts);

}  // namespace alphagan
