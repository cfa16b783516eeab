#include "alphagan/adam.hpp"

#include <cmath>

namespace alphagan {

AdamState::AdamState(double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {
    if (!(learning_rate >= 0.0)) throw std::invalid_argument("Adam: learning rate must be non-negative");
}

void AdamState::ensure_buffers(const NetworkParams& params) {
    if (!m_.empty()) return;
    for (std::size_t i = 0; i < params.weights.size(); ++i) {
        m_.emplace_back(params.weights[i].numel(), 0.0);
        v_.emplace_back(params.weights[i].numel(), 0.0);
        m_.emplace_back(params.biases[i].numel(), 0.0);
        v_.emplace_back(params.biases[i].numel(), 0.0);
    }
}

void AdamState::update_tensor(Tensor& param, const std::vector<double>* grad,
                              std::vector<double>& m, std::vector<double>& v,
                              const std::string& network, std::uint64_t iteration) {
    const std::size_t n = param.numel();
    std::vector<double> values = param.values();
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
    for (std::size_t i = 0; i < n; ++i) {
        const double g = grad ? (*grad)[i] : 0.0;
        if (!std::isfinite(g)) throw NumericAbort(network, iteration);
        m[i] = beta1_ * m[i] + (1.0 - beta1_) * g;
        v[i] = beta2_ * v[i] + (1.0 - beta2_) * g * g;
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        values[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
    param = Tensor(param.shape(), std::move(values));
}

void AdamState::step(NetworkParams& params, const WatchedParams& watched, std::uint64_t iteration) {
    ensure_buffers(params);
    ++step_;
    const std::string name = role_name(params.role);
    for (std::size_t i = 0; i < params.weights.size(); ++i) {
        update_tensor(params.weights[i], watched.weights[i].grad(), m_[2 * i], v_[2 * i], name,
                      iteration);
        update_tensor(params.biases[i], watched.biases[i].grad(), m_[2 * i + 1], v_[2 * i + 1],
                      name, iteration);
    }
}

}  // namespace alphagan
