#include "alphagan/networks.hpp"

#include <stdexcept>

#include "alphagan/ops.hpp"
#include "alphagan/rng.hpp"

namespace alphagan {

std::string role_name(Role r) {
    switch (r) {
        case Role::generator: return "generator";
        case Role::encoder: return "encoder";
        case Role::discriminator: return "discriminator";
        case Role::code_discriminator: return "code_discriminator";
        case Role::critic: return "critic";
        case Role::classifier: return "classifier";
    }
    return "unknown";
}

void MLPSpec::validate() const {
    if (layer_sizes.size() < 2) {
        throw ShapeError("MLPSpec: need at least input and output sizes");
    }
    for (std::size_t s : layer_sizes) {
        if (s == 0) throw ShapeError("MLPSpec: layer sizes must be positive");
    }
    if (hidden_activation == Activation::sigmoid) {
        throw std::invalid_argument("MLPSpec: sigmoid is not an allowed hidden activation");
    }
    if (output_activation == Activation::relu || output_activation == Activation::leaky_relu) {
        throw std::invalid_argument("MLPSpec: output activation must be identity, tanh or sigmoid");
    }
    if (!(init_scale > 0.0)) throw std::invalid_argument("MLPSpec: init scale must be positive");
}

std::size_t NetworkParams::parameter_count() const {
    std::size_t n = 0;
    for (const Tensor& w : weights) n += w.numel();
    for (const Tensor& b : biases) n += b.numel();
    return n;
}

NetworkParams init_params(Role role, const MLPSpec& spec, std::uint64_t seed) {
    spec.validate();
    NetworkParams p;
    p.role = role;
    p.spec = spec;
    Rng rng(seed);
    for (std::size_t i = 0; i + 1 < spec.layer_sizes.size(); ++i) {
        const std::size_t in = spec.layer_sizes[i];
        const std::size_t out = spec.layer_sizes[i + 1];
        std::vector<double> w(in * out);
        for (double& v : w) {
            v = spec.init == InitKind::normal ? rng.normal(0.0, spec.init_scale)
                                              : rng.uniform(-spec.init_scale, spec.init_scale);
        }
        p.weights.emplace_back(Shape{in, out}, std::move(w));
        p.biases.push_back(Tensor::zeros({out}));
    }
    return p;
}

WatchedParams watch(Tape& tape, const NetworkParams& params) {
    WatchedParams live;
    for (std::size_t i = 0; i < params.weights.size(); ++i) {
        live.weights.push_back(tape.watch(params.weights[i]));
        live.biases.push_back(tape.watch(params.biases[i]));
    }
    return live;
}

Tensor apply_activation(const Tensor& x, Activation act, double leaky_slope) {
    switch (act) {
        case Activation::identity: return x;
        case Activation::relu: return relu(x);
        case Activation::leaky_relu: return leaky_relu(x, leaky_slope);
        case Activation::tanh: return tanh(x);
        case Activation::sigmoid: return sigmoid(x);
    }
    return x;
}

Tensor mlp_forward(const MLPSpec& spec, const std::vector<Tensor>& weights,
                   const std::vector<Tensor>& biases, const Tensor& x) {
    if (x.rank() != 2 || x.cols() != spec.layer_sizes.front()) {
        throw ShapeError("mlp_forward: input shape " + shape_str(x.shape()) + " does not match layer " +
                         shape_str({x.rank() == 2 ? x.rows() : 0, spec.layer_sizes.front()}));
    }
    Tensor h = x;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        h = bias_add(matmul(h, weights[i]), biases[i]);
        const bool last = i + 1 == weights.size();
        h = apply_activation(h, last ? spec.output_activation : spec.hidden_activation,
                             spec.leaky_slope);
    }
    return h;
}

Tensor mlp_forward(const NetworkParams& params, const Tensor& x) {
    return mlp_forward(params.spec, params.weights, params.biases, x);
}

Tensor mlp_forward(const NetworkParams& params, const WatchedParams& live, const Tensor& x) {
    return mlp_forward(params.spec, live.weights, live.biases, x);
}

Tensor project_unit_ball(const Tensor& z) {
    Tensor norm = sqrt(sum(mul(z, z), 1));           // [B,1]
    Tensor denom = maximum(norm, 1.0);
    return rowwise_scale(z, reciprocal(denom));
}

Tensor generator_forward(const NetworkParams& generator, const Tensor& z) {
    return mlp_forward(generator, z);
}

Tensor generator_forward(const NetworkParams& generator, const WatchedParams& live, const Tensor& z) {
    return mlp_forward(generator, live, z);
}

static Tensor encoder_input(const Tensor& x, const Tensor& noise) {
    if (!noise.defined() || noise.numel() == 0) return x;
    if (noise.rows() != x.rows()) {
        throw ShapeError("encoder_forward: noise rows " + shape_str(noise.shape()) +
                         " do not match input " + shape_str(x.shape()));
    }
    return concat(x, noise, 1);
}

Tensor encoder_forward(const NetworkParams& encoder, const Tensor& x, const Tensor& noise,
                       bool unit_ball) {
    Tensor z = mlp_forward(encoder, encoder_input(x, noise));
    return unit_ball ? project_unit_ball(z) : z;
}

Tensor encoder_forward(const NetworkParams& encoder, const WatchedParams& live, const Tensor& x,
                       const Tensor& noise, bool unit_ball) {
    Tensor z = mlp_forward(encoder, live, encoder_input(x, noise));
    return unit_ball ? project_unit_ball(z) : z;
}

Tensor discriminator_forward(const NetworkParams& discriminator, const Tensor& x) {
    return mlp_forward(discriminator, x);
}

Tensor discriminator_forward(const NetworkParams& discriminator, const WatchedParams& live,
                             const Tensor& x) {
    return mlp_forward(discriminator, live, x);
}

Tensor code_discriminator_forward(const NetworkParams& code_discriminator, const Tensor& z) {
    return mlp_forward(code_discriminator, z);
}

Tensor code_discriminator_forward(const NetworkParams& code_discriminator, const WatchedParams& live,
                                  const Tensor& z) {
    return mlp_forward(code_discriminator, live, z);
}

}  // namespace alphagan
