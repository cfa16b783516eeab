#pragma once

#include <functional>
#include <map>
#include <string>

#include "alphagan/rng.hpp"
#include "alphagan/tensor.hpp"

namespace alphagan {

/// A scalar loss with its named parts. `total` is the weighted sum of the
/// components as documented per loss (within 1e-10).
struct LossTerms {
    Tensor total;
    std::map<std::string, Tensor> components;

    double value() const { return total.value(); }
    double component(const std::string& name) const { return components.at(name).value(); }
};

/// Log density ratio log(D/(1-D)) of a discriminator output; in logit space
/// this is the logit itself.
Tensor log_density_ratio(const Tensor& d_logit);

/// The ratio D/(1-D) = exp(logit). Errors when a logit exceeds 700.
Tensor density_ratio(const Tensor& d_logit);

/// Binary cross entropy of the discriminator: mean[-log D(real)] +
/// mean[-log(1-D(fake))], softplus form.
LossTerms gan_discriminator_loss(const Tensor& real_logits, const Tensor& fake_logits);

enum class GeneratorVariant { saturating, alternative, reverse_kl };

/// saturating: mean log(1-D); alternative: mean -log D;
/// reverse_kl: their sum, equal to mean(-logit).
LossTerms gan_generator_loss(const Tensor& fake_logits, GeneratorVariant variant);

/// lambda * mean over the batch of per-example L1 norms.
Tensor l1_reconstruction(const Tensor& x, const Tensor& x_recon, double lambda);

/// KL(q||p) estimate from code-discriminator logits at encoder outputs:
/// mean(-logit), where C = p(code is a prior sample) = sigmoid(logit).
Tensor kl_via_code_discriminator(const Tensor& code_logits);

/// Batch-moment KL(q || N(0,I)) from per-dimension sample means and
/// variances. corrected subtracts n/2 (the closed form); uncorrected adds it.
/// Requires batch >= 2 and non-degenerate per-dimension variance.
Tensor empirical_kl(const Tensor& codes, bool corrected, bool normalize_by_dim = false);

/// lambda*||x - x_recon||_1 + mean(-code_logit).
LossTerms alpha_gan_encoder_loss(const Tensor& x, const Tensor& x_recon, const Tensor& code_logits,
                                 double lambda);

/// lambda*||x - x_recon||_1 + mean(-recon_logit) + mean(-sample_logit).
LossTerms alpha_gan_generator_loss(const Tensor& x, const Tensor& x_recon,
                                   const Tensor& recon_logits, const Tensor& sample_logits,
                                   double lambda);

/// real_weight*mean[-log D(real)] + mean[-log(1-D(recon))] +
/// mean[-log(1-D(sample))]. real_weight 1 follows the approximation form;
/// 2 matches the expectation form.
LossTerms alpha_gan_discriminator_loss(const Tensor& real_logits, const Tensor& recon_logits,
                                       const Tensor& sample_logits, double real_weight = 1.0);

/// mean[-log C(prior)] + mean[-log(1-C(posterior))].
Tensor code_discriminator_loss(const Tensor& prior_logits, const Tensor& posterior_logits);

/// Scalar critic scores for a batch, one per row. The callable must run the
/// critic with whatever parameters (watched or constant) the caller set up.
using CriticFn = std::function<Tensor(const Tensor&)>;

/// Critic objective mean f(fake) - mean f(real) plus the gradient penalty
/// gp_coeff * mean (||grad f(interp)|| - 1)^2 at per-example random
/// interpolates. The inner input gradient is formed by central differences
/// with step fd_step, so one reverse pass differentiates the whole
/// expression with respect to the critic parameters.
LossTerms wgan_gp_critic_loss(const CriticFn& critic, const Tensor& real, const Tensor& fake,
                              double gp_coeff, Rng& rng, double fd_step = 1e-4);

/// -mean f(fake).
Tensor wgan_generator_loss(const CriticFn& critic, const Tensor& fake);

/// Negative ELBO with a Laplace likelihood: lambda*||x - x_recon||_1 +
/// mean KL(N(mu, sigma^2) || N(0,I)), sigma = exp(log_sigma).
LossTerms vae_loss(const Tensor& x, const Tensor& mu, const Tensor& log_sigma,
                   const Tensor& x_recon, double lambda);

/// Mean over rows of 1 - cos(angle between paired rows). Zero-norm rows are
/// an error.
Tensor cosine_distance(const Tensor& a, const Tensor& b);

struct AgeWeights {
    double data_reconstruction = 1000.0;  // encoder data term
    double code_reconstruction = 10.0;    // generator code term
};

/// w_data*||x - x_recon||_1 + KL_emp(codes_data) - KL_emp(codes_samples).
LossTerms age_encoder_loss(const Tensor& x, const Tensor& x_recon, const Tensor& codes_data,
                           const Tensor& codes_samples, const AgeWeights& weights,
                           bool normalize_kl = true);

/// w_code*cosine_distance(z_prior, codes_of_samples) + KL_emp(codes_of_samples).
LossTerms age_generator_loss(const Tensor& z_prior, const Tensor& codes_of_samples,
                             const AgeWeights& weights, bool normalize_kl = true);

}  // namespace alphagan
