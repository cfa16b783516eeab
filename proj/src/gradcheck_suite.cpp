#include "alphagan/gradcheck_suite.hpp"

#include <cmath>
#include <functional>

#include "alphagan/gradcheck.hpp"
#include "alphagan/losses.hpp"
#include "alphagan/networks.hpp"
#include "alphagan/ops.hpp"
#include "alphagan/rng.hpp"

namespace alphagan {

namespace {

using PointGen = std::function<Tensor(Rng&)>;

// uniform in [lo,hi] with the sign flipped half the time; keeps points away
// from zero so kinks stay out of the sample
Tensor away_from_zero(Rng& rng, Shape shape, double lo = 0.2, double hi = 1.5) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    std::vector<double> v(n);
    for (double& x : v) {
        x = rng.uniform(lo, hi);
        if (rng.uniform() < 0.5) x = -x;
    }
    return Tensor(std::move(shape), std::move(v));
}

Tensor positive(Rng& rng, Shape shape, double lo = 0.3, double hi = 3.0) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(lo, hi);
    return Tensor(std::move(shape), std::move(v));
}

Tensor gaussian(Rng& rng, Shape shape, double sigma = 1.0) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return Tensor(std::move(shape), rng.normal_vector(n, 0.0, sigma));
}

struct Case {
    std::string name;
    double threshold;
    ScalarFn fn;
    PointGen point;
    double step = 1e-5;
};

Tensor rows(const Tensor& x, std::size_t start, std::size_t len) { return narrow(x, 0, start, len); }

// critic parameters packed into one flat row; unpacked into an MLP so the
// whole WGAN-GP expression can be checked with respect to them
struct PackedCritic {
    MLPSpec spec;
    std::size_t total = 0;

    explicit PackedCritic(std::vector<std::size_t> sizes, Activation hidden) {
        spec.layer_sizes = std::move(sizes);
        spec.hidden_activation = hidden;
        spec.output_activation = Activation::identity;
        for (std::size_t i = 0; i + 1 < spec.layer_sizes.size(); ++i) {
            total += spec.layer_sizes[i] * spec.layer_sizes[i + 1] + spec.layer_sizes[i + 1];
        }
    }

    CriticFn make(const Tensor& flat) const {
        std::vector<Tensor> weights, biases;
        std::size_t offset = 0;
        for (std::size_t i = 0; i + 1 < spec.layer_sizes.size(); ++i) {
            const std::size_t in = spec.layer_sizes[i], out = spec.layer_sizes[i + 1];
            weights.push_back(reshape(narrow(flat, 1, offset, in * out), {in, out}));
            offset += in * out;
            biases.push_back(reshape(narrow(flat, 1, offset, out), {out}));
            offset += out;
        }
        MLPSpec s = spec;
        return [s, weights, biases](const Tensor& x) { return mlp_forward(s, weights, biases, x); };
    }
};

std::vector<Case> build_cases() {
    std::vector<Case> cases;
    auto add = [&](std::string name, double threshold, ScalarFn fn, PointGen point) {
        cases.push_back({std::move(name), threshold, std::move(fn), std::move(point), 1e-5});
    };

    const double prim = 1e-5;
    const double comp = 1e-4;

    // --- primitives ---
    add("matmul_lhs", prim,
        [](const Tensor& x) {
            static const Tensor b = Tensor::matrix(4, 3, {0.3, -1.2, 0.7, 1.1, 0.4, -0.6, -0.9,
                                                          0.2, 0.8, 0.5, -0.3, 1.4});
            return sum(matmul(x, b));
        },
        [](Rng& rng) { return gaussian(rng, {3, 4}); });
    add("matmul_rhs", prim,
        [](const Tensor& x) {
            static const Tensor a = Tensor::matrix(3, 4, {0.3, -1.2, 0.7, 1.1, 0.4, -0.6, -0.9,
                                                          0.2, 0.8, 0.5, -0.3, 1.4});
            return sum(matmul(a, x));
        },
        [](Rng& rng) { return gaussian(rng, {4, 2}); });
    add("add", prim,
        [](const Tensor& x) { return sum(rows(x, 0, 2) + rows(x, 2, 2)); },
        [](Rng& rng) { return gaussian(rng, {4, 3}); });
    add("sub", prim,
        [](const Tensor& x) { return sum(mul(rows(x, 0, 2) - rows(x, 2, 2), rows(x, 0, 2))); },
        [](Rng& rng) { return gaussian(rng, {4, 3}); });
    add("mul", prim,
        [](const Tensor& x) { return sum(rows(x, 0, 2) * rows(x, 2, 2)); },
        [](Rng& rng) { return gaussian(rng, {4, 3}); });
    add("scalar_mul_add", prim,
        [](const Tensor& x) { return sum(2.5 * x + mul(x + 0.7, x)); },
        [](Rng& rng) { return gaussian(rng, {2, 5}); });
    add("relu", prim, [](const Tensor& x) { return sum(relu(x)); },
        [](Rng& rng) { return away_from_zero(rng, {2, 6}); });
    add("leaky_relu", prim, [](const Tensor& x) { return sum(leaky_relu(x, 0.2)); },
        [](Rng& rng) { return away_from_zero(rng, {2, 6}); });
    add("sigmoid", prim, [](const Tensor& x) { return sum(sigmoid(x)); },
        [](Rng& rng) { return gaussian(rng, {2, 5}); });
    add("tanh", prim, [](const Tensor& x) { return sum(tanh(x)); },
        [](Rng& rng) { return gaussian(rng, {2, 5}); });
    add("log", prim, [](const Tensor& x) { return sum(log(x)); },
        [](Rng& rng) { return positive(rng, {2, 5}); });
    add("exp", prim, [](const Tensor& x) { return sum(exp(x)); },
        [](Rng& rng) { return gaussian(rng, {2, 5}); });
    add("abs", prim, [](const Tensor& x) { return sum(abs(x)); },
        [](Rng& rng) { return away_from_zero(rng, {2, 6}); });
    add("sqrt", prim, [](const Tensor& x) { return sum(sqrt(x)); },
        [](Rng& rng) { return positive(rng, {2, 5}); });
    add("reciprocal", prim, [](const Tensor& x) { return sum(reciprocal(x)); },
        [](Rng& rng) { return positive(rng, {2, 5}); });
    add("softplus", prim, [](const Tensor& x) { return sum(softplus(x)); },
        [](Rng& rng) { return gaussian(rng, {2, 5}); });
    add("maximum", prim, [](const Tensor& x) { return sum(maximum(x, 0.5)); },
        [](Rng& rng) {
            Tensor t = positive(rng, {2, 5}, 0.1, 2.0);
            std::vector<double> v = t.values();  // keep clear of the hinge at 0.5
            for (double& d : v) {
                if (std::fabs(d - 0.5) < 0.05) d += 0.1;
            }
            return Tensor(t.shape(), std::move(v));
        });
    add("sum_axis0", prim,
        [](const Tensor& x) { return sum(mul(sum(x, 0), sum(x, 0))); },
        [](Rng& rng) { return gaussian(rng, {3, 4}); });
    add("sum_axis1", prim,
        [](const Tensor& x) { return sum(mul(sum(x, 1), sum(x, 1))); },
        [](Rng& rng) { return gaussian(rng, {3, 4}); });
    add("mean_full", prim, [](const Tensor& x) { return mean(mul(x, x)); },
        [](Rng& rng) { return gaussian(rng, {3, 4}); });
    add("mean_axis", prim,
        [](const Tensor& x) {
            return sum(mul(mean(x, 0), mean(x, 0))) + sum(mul(mean(x, 1), mean(x, 1)));
        },
        [](Rng& rng) { return gaussian(rng, {3, 3}); });
    add("concat_axis0", prim,
        [](const Tensor& x) {
            Tensor c = concat(rows(x, 0, 2), rows(x, 2, 1), 0);
            return sum(mul(c, c));
        },
        [](Rng& rng) { return gaussian(rng, {3, 4}); });
    add("concat_axis1", prim,
        [](const Tensor& x) {
            Tensor c = concat(narrow(x, 1, 0, 2), narrow(x, 1, 2, 2), 1);
            return sum(mul(c, c + 1.0));
        },
        [](Rng& rng) { return gaussian(rng, {3, 4}); });
    add("narrow", prim,
        [](const Tensor& x) { return sum(mul(narrow(x, 1, 1, 2), narrow(x, 1, 0, 2))); },
        [](Rng& rng) { return gaussian(rng, {3, 4}); });
    add("reshape", prim,
        [](const Tensor& x) {
            Tensor r = reshape(x, {4, 3});
            return sum(matmul(r, Tensor::matrix(3, 1, {0.5, -0.4, 1.2})));
        },
        [](Rng& rng) { return gaussian(rng, {3, 4}); });
    add("softmax", prim,
        [](const Tensor& x) {
            static const Tensor w = Tensor::matrix(4, 1, {1.0, -0.5, 0.25, 2.0});
            return sum(matmul(softmax(x, 1), w));
        },
        [](Rng& rng) { return gaussian(rng, {3, 4}); });
    add("bias_add", prim,
        [](const Tensor& x) {
            Tensor b = reshape(rows(x, 3, 1), {4});
            Tensor y = bias_add(rows(x, 0, 3), b);
            return sum(mul(y, y));
        },
        [](Rng& rng) { return gaussian(rng, {4, 4}); });
    add("rowwise_scale", prim,
        [](const Tensor& x) {
            Tensor s = narrow(x, 1, 0, 1);
            Tensor y = rowwise_scale(narrow(x, 1, 1, 3), s);
            return sum(mul(y, y));
        },
        [](Rng& rng) { return gaussian(rng, {3, 4}); });
    add("softmax_cross_entropy", prim,
        [](const Tensor& x) { return softmax_cross_entropy(x, {0, 2, 1}); },
        [](Rng& rng) { return gaussian(rng, {3, 4}); });

    // --- composite losses ---
    add("gan_discriminator_loss", comp,
        [](const Tensor& x) {
            return gan_discriminator_loss(rows(x, 0, 1), rows(x, 1, 1)).total;
        },
        [](Rng& rng) { return gaussian(rng, {2, 6}, 2.0); });
    add("gan_generator_saturating", comp,
        [](const Tensor& x) { return gan_generator_loss(x, GeneratorVariant::saturating).total; },
        [](Rng& rng) { return gaussian(rng, {6, 1}, 2.0); });
    add("gan_generator_alternative", comp,
        [](const Tensor& x) { return gan_generator_loss(x, GeneratorVariant::alternative).total; },
        [](Rng& rng) { return gaussian(rng, {6, 1}, 2.0); });
    add("gan_generator_reverse_kl", comp,
        [](const Tensor& x) { return gan_generator_loss(x, GeneratorVariant::reverse_kl).total; },
        [](Rng& rng) { return gaussian(rng, {6, 1}, 2.0); });
    add("l1_reconstruction", comp,
        [](const Tensor& x) { return l1_reconstruction(rows(x, 0, 3), rows(x, 3, 3), 10.0); },
        [](Rng& rng) {
            // keep |x - recon| away from the abs kink
            Tensor x = gaussian(rng, {6, 4});
            std::vector<double> v = x.values();
            for (std::size_t i = 0; i < 12; ++i) {
                if (std::fabs(v[i] - v[i + 12]) < 0.05) v[i] += 0.1;
            }
            return Tensor(x.shape(), std::move(v));
        });
    add("kl_via_code_discriminator", comp,
        [](const Tensor& x) { return kl_via_code_discriminator(x); },
        [](Rng& rng) { return gaussian(rng, {6, 1}, 2.0); });
    add("empirical_kl_corrected", comp,
        [](const Tensor& x) { return empirical_kl(x, true); },
        [](Rng& rng) { return gaussian(rng, {8, 4}); });
    add("empirical_kl_normalized", comp,
        [](const Tensor& x) { return empirical_kl(x, true, true); },
        [](Rng& rng) { return gaussian(rng, {8, 4}); });
    add("alpha_gan_encoder_loss", comp,
        [](const Tensor& x) {
            return alpha_gan_encoder_loss(rows(x, 0, 3), rows(x, 3, 3),
                                          narrow(rows(x, 6, 1), 1, 0, 4), 5.0)
                .total;
        },
        [](Rng& rng) {
            Tensor x = gaussian(rng, {7, 4});
            std::vector<double> v = x.values();
            for (std::size_t i = 0; i < 12; ++i) {
                if (std::fabs(v[i] - v[i + 12]) < 0.05) v[i] += 0.1;
            }
            return Tensor(x.shape(), std::move(v));
        });
    add("alpha_gan_generator_loss", comp,
        [](const Tensor& x) {
            return alpha_gan_generator_loss(rows(x, 0, 3), rows(x, 3, 3),
                                            narrow(rows(x, 6, 1), 1, 0, 4),
                                            narrow(rows(x, 7, 1), 1, 0, 4), 5.0)
                .total;
        },
        [](Rng& rng) {
            Tensor x = gaussian(rng, {8, 4});
            std::vector<double> v = x.values();
            for (std::size_t i = 0; i < 12; ++i) {
                if (std::fabs(v[i] - v[i + 12]) < 0.05) v[i] += 0.1;
            }
            return Tensor(x.shape(), std::move(v));
        });
    add("alpha_gan_discriminator_loss", comp,
        [](const Tensor& x) {
            return alpha_gan_discriminator_loss(rows(x, 0, 1), rows(x, 1, 1), rows(x, 2, 1)).total;
        },
        [](Rng& rng) { return gaussian(rng, {3, 6}, 2.0); });
    add("code_discriminator_loss", comp,
        [](const Tensor& x) { return code_discriminator_loss(rows(x, 0, 1), rows(x, 1, 1)); },
        [](Rng& rng) { return gaussian(rng, {2, 6}, 2.0); });
    add("vae_loss", comp,
        [](const Tensor& x) {
            Tensor data = narrow(x, 1, 0, 4);
            Tensor mu = narrow(x, 1, 4, 3);
            Tensor log_sigma = narrow(x, 1, 7, 3);
            Tensor recon = narrow(x, 1, 10, 4);
            return vae_loss(data, mu, log_sigma, recon, 2.0).total;
        },
        [](Rng& rng) {
            Tensor x = gaussian(rng, {5, 14}, 0.5);
            std::vector<double> v = x.values();
            for (std::size_t r = 0; r < 5; ++r) {
                for (std::size_t c = 0; c < 4; ++c) {
                    if (std::fabs(v[r * 14 + c] - v[r * 14 + 10 + c]) < 0.05) v[r * 14 + c] += 0.1;
                }
            }
            return Tensor(x.shape(), std::move(v));
        });
    add("cosine_distance", comp,
        [](const Tensor& x) { return cosine_distance(rows(x, 0, 3), rows(x, 3, 3)); },
        [](Rng& rng) { return gaussian(rng, {6, 5}); });
    add("age_encoder_loss", comp,
        [](const Tensor& x) {
            AgeWeights w;
            w.data_reconstruction = 100.0;
            return age_encoder_loss(rows(x, 0, 6), rows(x, 6, 6), rows(x, 12, 6), rows(x, 18, 6), w)
                .total;
        },
        [](Rng& rng) {
            Tensor x = gaussian(rng, {24, 3});
            std::vector<double> v = x.values();
            for (std::size_t i = 0; i < 18; ++i) {
                if (std::fabs(v[i] - v[i + 18]) < 0.05) v[i] += 0.1;
            }
            return Tensor(x.shape(), std::move(v));
        });
    add("age_generator_loss", comp,
        [](const Tensor& x) {
            AgeWeights w;
            return age_generator_loss(rows(x, 0, 6), rows(x, 6, 6), w).total;
        },
        [](Rng& rng) { return gaussian(rng, {12, 3}); });

    // WGAN-GP with respect to packed critic parameters; tanh keeps the
    // surrogate smooth for the finite-difference comparison
    static const PackedCritic critic({2, 8, 1}, Activation::tanh);
    add("wgan_critic_ex_penalty", comp,
        [](const Tensor& flat) {
            Rng fixed(7);
            Tensor real = gaussian(fixed, {6, 2});
            Tensor fake = gaussian(fixed, {6, 2});
            Rng interp_rng(11);
            return wgan_gp_critic_loss(critic.make(flat), real, fake, 0.0, interp_rng).total;
        },
        [](Rng& rng) { return gaussian(rng, {1, critic.total}, 0.5); });
    cases.push_back(
        {"wgan_penalty_path", 1e-3,
         [](const Tensor& flat) {
             Rng fixed(7);
             Tensor real = gaussian(fixed, {6, 2});
             Tensor fake = gaussian(fixed, {6, 2});
             Rng interp_rng(11);
             return wgan_gp_critic_loss(critic.make(flat), real, fake, 10.0, interp_rng).total;
         },
         [](Rng& rng) { return gaussian(rng, {1, critic.total}, 0.5); }, 1e-5});
    add("wgan_generator_loss", comp,
        [](const Tensor& fake) {
            Rng fixed(7);
            Tensor flat = gaussian(fixed, {1, critic.total}, 0.5);
            return wgan_generator_loss(critic.make(flat.detached()), fake);
        },
        [](Rng& rng) { return gaussian(rng, {6, 2}); });

    return cases;
}

}  // namespace

std::vector<GradCheckResult> run_gradcheck_suite(std::uint64_t seed, int points_per_case,
                                                 bool inject_fault) {
    std::vector<Case> cases = build_cases();
    if (inject_fault) {
        // detached second factor: the tape sees x, numeric sees x^2
        cases.push_back({"injected_fault", 1e-5,
                         [](const Tensor& x) { return sum(mul(x, x.detached())); },
                         [](Rng& rng) { return gaussian(rng, {2, 3}); }, 1e-5});
    }
    std::vector<GradCheckResult> results;
    Rng rng(seed);
    for (const Case& c : cases) {
        GradCheckResult r;
        r.name = c.name;
        r.threshold = c.threshold;
        for (int p = 0; p < points_per_case; ++p) {
            const double err = grad_check(c.fn, c.point(rng), c.step);
            r.max_rel_err = std::max(r.max_rel_err, err);
        }
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace alphagan
