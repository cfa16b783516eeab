#include "alphagan/losses.hpp"

#include <cmath>

#include "alphagan/ops.hpp"

namespace alphagan {

namespace {

// mean of -log sigmoid(l) == mean softplus(-l)
Tensor mean_nlog_d(const Tensor& logits) { return mean(softplus(-logits)); }
// mean of -log(1 - sigmoid(l)) == mean softplus(l)
Tensor mean_nlog_1md(const Tensor& logits) { return mean(softplus(logits)); }

}  // namespace

Tensor log_density_ratio(const Tensor& d_logit) { return d_logit; }

Tensor density_ratio(const Tensor& d_logit) {
    for (double v : d_logit.values()) {
        if (v > 700.0) throw DomainError("density_ratio: logit > 700 overflows the ratio");
    }
    return exp(maximum(d_logit, -700.0));
}

LossTerms gan_discriminator_loss(const Tensor& real_logits, const Tensor& fake_logits) {
    LossTerms lt;
    lt.components["real"] = mean_nlog_d(real_logits);
    lt.components["fake"] = mean_nlog_1md(fake_logits);
    lt.total = lt.components["real"] + lt.components["fake"];
    return lt;
}

LossTerms gan_generator_loss(const Tensor& fake_logits, GeneratorVariant variant) {
    LossTerms lt;
    switch (variant) {
        case GeneratorVariant::saturating:
            lt.total = -mean_nlog_1md(fake_logits);  // mean log(1-D)
            break;
        case GeneratorVariant::alternative:
            lt.total = mean_nlog_d(fake_logits);  // mean -log D
            break;
        case GeneratorVariant::reverse_kl:
            // sum of the other two; equals mean(-logit)
            lt.total = mean_nlog_d(fake_logits) + (-mean_nlog_1md(fake_logits));
            break;
    }
    lt.components["adversarial"] = lt.total;
    return lt;
}

Tensor l1_reconstruction(const Tensor& x, const Tensor& x_recon, double lambda) {
    if (x.shape() != x_recon.shape()) {
        throw ShapeError("l1_reconstruction: shape mismatch " + shape_str(x.shape()) + " vs " +
                         shape_str(x_recon.shape()));
    }
    if (!(lambda > 0.0)) throw DomainError("l1_reconstruction: lambda must be positive");
    return lambda * mean(sum(abs(x - x_recon), 1));
}

Tensor kl_via_code_discriminator(const Tensor& code_logits) {
    return mean(-code_logits);
}

Tensor empirical_kl(const Tensor& codes, bool corrected, bool normalize_by_dim) {
    if (codes.rank() != 2 || codes.rows() < 2) {
        throw ShapeError("empirical_kl: need a [batch>=2, dim] tensor, got " +
                         shape_str(codes.shape()));
    }
    const std::size_t b = codes.rows();
    const std::size_t n = codes.cols();
    Tensor m = mean(codes, 0);  // [1,n]
    Tensor centered = bias_add(codes, reshape(-m, {n}));
    Tensor var = (1.0 / static_cast<double>(b - 1)) * sum(centered * centered, 0);  // [1,n]
    for (std::size_t i = 0; i < n; ++i) {
        if (var.at(i) <= 0.0) {
            throw DomainError("empirical_kl: degenerate batch, zero variance in dimension " +
                              std::to_string(i));
        }
    }
    // sum_i [(s_i^2 + m_i^2)/2 - log s_i]
    Tensor moment_sum = sum(0.5 * (var + m * m) - 0.5 * log(var));
    const double half_n = 0.5 * static_cast<double>(n);
    Tensor uncorrected = moment_sum + half_n;
    Tensor result = corrected ? uncorrected - static_cast<double>(n) : uncorrected;
    if (normalize_by_dim) result = result * (1.0 / static_cast<double>(n));
    return result;
}

LossTerms alpha_gan_encoder_loss(const Tensor& x, const Tensor& x_recon, const Tensor& code_logits,
                                 double lambda) {
    LossTerms lt;
    lt.components["reconstruction"] = l1_reconstruction(x, x_recon, lambda);
    lt.components["kl"] = kl_via_code_discriminator(code_logits);
    lt.total = lt.components["reconstruction"] + lt.components["kl"];
    return lt;
}

LossTerms alpha_gan_generator_loss(const Tensor& x, const Tensor& x_recon,
                                   const Tensor& recon_logits, const Tensor& sample_logits,
                                   double lambda) {
    LossTerms lt;
    lt.components["reconstruction"] = l1_reconstruction(x, x_recon, lambda);
    lt.components["adversarial"] = mean(-recon_logits) + mean(-sample_logits);
    lt.total = lt.components["reconstruction"] + lt.components["adversarial"];
    return lt;
}

LossTerms alpha_gan_discriminator_loss(const Tensor& real_logits, const Tensor& recon_logits,
                                       const Tensor& sample_logits, double real_weight) {
    LossTerms lt;
    lt.components["real"] = real_weight * mean_nlog_d(real_logits);
    lt.components["recon"] = mean_nlog_1md(recon_logits);
    lt.components["sample"] = mean_nlog_1md(sample_logits);
    lt.total = lt.components["real"] + lt.components["recon"] + lt.components["sample"];
    return lt;
}

Tensor code_discriminator_loss(const Tensor& prior_logits, const Tensor& posterior_logits) {
    return mean_nlog_d(prior_logits) + mean_nlog_1md(posterior_logits);
}

LossTerms wgan_gp_critic_loss(const CriticFn& critic, const Tensor& real, const Tensor& fake,
                              double gp_coeff, Rng& rng, double fd_step) {
    if (real.shape() != fake.shape()) {
        throw ShapeError("wgan_gp_critic_loss: shape mismatch " + shape_str(real.shape()) + " vs " +
                         shape_str(fake.shape()));
    }
    if (gp_coeff < 0.0) throw DomainError("wgan_gp_critic_loss: gp_coeff must be >= 0");
    const std::size_t b = real.rows(), d = real.cols();

    LossTerms lt;
    lt.components["wasserstein"] = mean(critic(fake)) - mean(critic(real));

    // per-example interpolates u*real + (1-u)*fake
    std::vector<double> interp(b * d);
    for (std::size_t i = 0; i < b; ++i) {
        const double u = rng.uniform();
        for (std::size_t j = 0; j < d; ++j) {
            interp[i * d + j] = u * real.at(i, j) + (1.0 - u) * fake.at(i, j);
        }
    }

    // ||grad_x f|| via central differences per input coordinate; every probe
    // evaluation stays on the tape so the reverse pass reaches the critic.
    Tensor grad_sumsq;
    const double inv2h = 1.0 / (2.0 * fd_step);
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<double> up = interp, down = interp;
        for (std::size_t i = 0; i < b; ++i) {
            up[i * d + j] += fd_step;
            down[i * d + j] -= fd_step;
        }
        Tensor gj = inv2h * (critic(Tensor({b, d}, std::move(up))) -
                             critic(Tensor({b, d}, std::move(down))));
        Tensor gj2 = gj * gj;
        grad_sumsq = grad_sumsq.defined() ? grad_sumsq + gj2 : gj2;
    }
    Tensor norm = sqrt(grad_sumsq + 1e-12);
    Tensor deficit = norm - 1.0;
    lt.components["penalty"] = gp_coeff * mean(deficit * deficit);
    lt.total = lt.components["wasserstein"] + lt.components["penalty"];
    return lt;
}

Tensor wgan_generator_loss(const CriticFn& critic, const Tensor& fake) {
    return -mean(critic(fake));
}

LossTerms vae_loss(const Tensor& x, const Tensor& mu, const Tensor& log_sigma,
                   const Tensor& x_recon, double lambda) {
    if (mu.shape() != log_sigma.shape()) {
        throw ShapeError("vae_loss: mu/log_sigma mismatch " + shape_str(mu.shape()) + " vs " +
                         shape_str(log_sigma.shape()));
    }
    LossTerms lt;
    lt.components["reconstruction"] = l1_reconstruction(x, x_recon, lambda);
    // KL(N(mu, sigma^2) || N(0,I)) = sum 0.5*(sigma^2 + mu^2) - log sigma - 0.5
    Tensor sigma_sq = exp(2.0 * log_sigma);
    Tensor kl_terms = 0.5 * (sigma_sq + mu * mu) - log_sigma - 0.5;
    lt.components["kl"] = mean(sum(kl_terms, 1));
    lt.total = lt.components["reconstruction"] + lt.components["kl"];
    return lt;
}

Tensor cosine_distance(const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) {
        throw ShapeError("cosine_distance: shape mismatch " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
    }
    Tensor na = sqrt(sum(a * a, 1));  // [B,1]
    Tensor nb = sqrt(sum(b * b, 1));
    for (std::size_t i = 0; i < na.numel(); ++i) {
        if (na.at(i) == 0.0 || nb.at(i) == 0.0) {
            throw DomainError("cosine_distance: zero-norm row " + std::to_string(i));
        }
    }
    Tensor dot = sum(a * b, 1);
    Tensor cosine = dot * reciprocal(na * nb);
    return mean(-cosine + 1.0);
}

LossTerms age_encoder_loss(const Tensor& x, const Tensor& x_recon, const Tensor& codes_data,
                           const Tensor& codes_samples, const AgeWeights& weights,
                           bool normalize_kl) {
    LossTerms lt;
    lt.components["reconstruction"] = l1_reconstruction(x, x_recon, weights.data_reconstruction);
    lt.components["kl_data"] = empirical_kl(codes_data, true, normalize_kl);
    lt.components["kl_samples"] = empirical_kl(codes_samples, true, normalize_kl);
    lt.total = lt.components["reconstruction"] + lt.components["kl_data"] -
               lt.components["kl_samples"];
    return lt;
}

LossTerms age_generator_loss(const Tensor& z_prior, const Tensor& codes_of_samples,
                             const AgeWeights& weights, bool normalize_kl) {
    LossTerms lt;
    lt.components["code_reconstruction"] =
        weights.code_reconstruction * cosine_distance(z_prior, codes_of_samples);
    lt.components["kl_samples"] = empirical_kl(codes_of_samples, true, normalize_kl);
    lt.total = lt.components["code_reconstruction"] + lt.components["kl_samples"];
    return lt;
}

}  // namespace alphagan
