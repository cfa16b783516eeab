#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "alphagan/networks.hpp"
#include "alphagan/tensor.hpp"

namespace alphagan {

/// Training aborted on a non-finite quantity; carries the network and
/// iteration for the diagnostic.
struct NumericAbort : std::runtime_error {
    NumericAbort(const std::string& network, std::uint64_t iteration)
        : std::runtime_error("non-finite gradient or loss in " + network + " update at iteration " +
                             std::to_string(iteration)),
          network(network),
          iteration(iteration) {}
    std::string network;
    std::uint64_t iteration;
};

/// Bias-corrected Adam over one network's parameters. Moment buffers follow
/// the watch order (w0, b0, w1, b1, ...).
class AdamState {
  public:
    AdamState() = default;
    AdamState(double learning_rate, double beta1 = 0.5, double beta2 = 0.9, double epsilon = 1e-8);

    /// Applies one update. `grads` must match the watch order; missing
    /// gradients (untouched parameters) count as zero. Non-finite gradients
    /// raise NumericAbort tagged with `network` and `iteration`.
    void step(NetworkParams& params, const WatchedParams& watched, std::uint64_t iteration);

    std::uint64_t steps_taken() const { return step_; }
    double learning_rate() const { return lr_; }

  private:
    void ensure_buffers(const NetworkParams& params);
    void update_tensor(Tensor& param, const std::vector<double>* grad, std::vector<double>& m,
                       std::vector<double>& v, const std::string& network, std::uint64_t iteration);

    double lr_ = 1e-4;
    double beta1_ = 0.5;
    double beta2_ = 0.9;
    double eps_ = 1e-8;
    std::uint64_t step_ = 0;
    std::vector<std::vector<double>> m_;  // one buffer per tensor, weights then bias per layer
    std::vector<std::vector<double>> v_;
};

}  // namespace alphagan
