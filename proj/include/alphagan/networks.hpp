#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "alphagan/tensor.hpp"

namespace alphagan {

enum class Activation { identity, relu, leaky_relu, tanh, sigmoid };
enum class InitKind { normal, uniform };
enum class Role { generator, encoder, discriminator, code_discriminator, critic, classifier };

std::string role_name(Role r);

struct MLPSpec {
    std::vector<std::size_t> layer_sizes;  // input .. output
    Activation hidden_activation = Activation::relu;
    double leaky_slope = 0.2;
    Activation output_activation = Activation::identity;
    InitKind init = InitKind::normal;
    double init_scale = 0.02;  // sigma for normal, +/-a for uniform

    void validate() const;
};

/// Weights and biases for one network. Layer i maps layer_sizes[i] ->
/// layer_sizes[i+1]; weights are [in,out], biases [out] (zero at init).
struct NetworkParams {
    Role role = Role::generator;
    MLPSpec spec;
    std::vector<Tensor> weights;
    std::vector<Tensor> biases;

    std::size_t layer_count() const { return weights.size(); }
    std::size_t input_size() const { return spec.layer_sizes.front(); }
    std::size_t output_size() const { return spec.layer_sizes.back(); }
    std::size_t parameter_count() const;
};

NetworkParams init_params(Role role, const MLPSpec& spec, std::uint64_t seed);

/// Tape-attached copies of a network's parameters, in a fixed order
/// (w0, b0, w1, b1, ...). Forward passes accept either these or the stored
/// constants, so the caller decides which network receives gradients.
struct WatchedParams {
    std::vector<Tensor> weights;
    std::vector<Tensor> biases;
};

WatchedParams watch(Tape& tape, const NetworkParams& params);

Tensor apply_activation(const Tensor& x, Activation act, double leaky_slope);

// Activation policy shared by the trainer's network builders and the
// checkpoint loader. tanh hidden units place mass far more reliably on
// low-dimensional point data; image generators keep the conventional
// ReLU-into-tanh stack.
inline Activation generator_hidden_activation(bool images) {
    return images ? Activation::relu : Activation::tanh;
}
inline Activation generator_output_activation(bool images) {
    return images ? Activation::tanh : Activation::identity;
}

/// x: [batch, input]; returns [batch, output].
Tensor mlp_forward(const MLPSpec& spec, const std::vector<Tensor>& weights,
                   const std::vector<Tensor>& biases, const Tensor& x);
Tensor mlp_forward(const NetworkParams& params, const Tensor& x);
Tensor mlp_forward(const NetworkParams& params, const WatchedParams& live, const Tensor& x);

/// Projects every row of z onto the unit ball: row / max(1, ||row||).
Tensor project_unit_ball(const Tensor& z);

Tensor generator_forward(const NetworkParams& generator, const Tensor& z);
Tensor generator_forward(const NetworkParams& generator, const WatchedParams& live, const Tensor& z);

/// Encoder; when noise has zero columns the map is deterministic, otherwise
/// noise is concatenated to x before the first layer. `unit_ball` applies the
/// AGE prior projection to the codes.
Tensor encoder_forward(const NetworkParams& encoder, const Tensor& x, const Tensor& noise,
                       bool unit_ball = false);
Tensor encoder_forward(const NetworkParams& encoder, const WatchedParams& live, const Tensor& x,
                       const Tensor& noise, bool unit_ball = false);

/// Returns raw logits, one per row; D = sigmoid(logit).
Tensor discriminator_forward(const NetworkParams& discriminator, const Tensor& x);
Tensor discriminator_forward(const NetworkParams& discriminator, const WatchedParams& live,
                             const Tensor& x);

Tensor code_discriminator_forward(const NetworkParams& code_discriminator, const Tensor& z);
Tensor code_discriminator_forward(const NetworkParams& code_discriminator, const WatchedParams& live,
                                  const Tensor& z);

}  // namespace alphagan
