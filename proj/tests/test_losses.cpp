#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "alphagan/losses.hpp"
#include "alphagan/ops.hpp"
#include "alphagan/rng.hpp"

using namespace alphagan;

namespace {

// probability-space reference implementations, deliberately naive
double ref_nlog_d(double logit) { return -std::log(1.0 / (1.0 + std::exp(-logit))); }
double ref_nlog_1md(double logit) { return -std::log(1.0 - 1.0 / (1.0 + std::exp(-logit))); }

Tensor logits_of(std::vector<double> v) {
    const std::size_t n = v.size();
    return Tensor({n, 1}, std::move(v));
}

double logit_for(double d) { return std::log(d / (1.0 - d)); }

}  // namespace

TEST_CASE("density ratio in logit and ratio space") {
    CHECK(density_ratio(Tensor::scalar(0.0)).value() == doctest::Approx(1.0));
    CHECK(density_ratio(Tensor::scalar(logit_for(0.75))).value() == doctest::Approx(3.0));
    CHECK(density_ratio(Tensor::scalar(logit_for(0.9))).value() == doctest::Approx(9.0));
    Tensor l = Tensor::scalar(1.234);
    CHECK(log_density_ratio(l).value() == 1.234);
    CHECK_THROWS_AS(density_ratio(Tensor::scalar(701.0)), DomainError);
    CHECK(density_ratio(Tensor::scalar(-705.0)).value() == doctest::Approx(0.0));
}

TEST_CASE("discriminator loss: symmetric point, perfect split, direct value") {
    CHECK(gan_discriminator_loss(logits_of({0, 0}), logits_of({0, 0})).value() ==
          doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
    // D_real -> 1, D_fake -> 0 drives the loss to 0
    CHECK(gan_discriminator_loss(logits_of({30.0}), logits_of({-30.0})).value() ==
          doctest::Approx(0.0).epsilon(1e-9));
    // D_real = 0.8, D_fake = 0.3: -ln 0.8 - ln 0.7
    const double got =
        gan_discriminator_loss(logits_of({logit_for(0.8)}), logits_of({logit_for(0.3)})).value();
    CHECK(got == doctest::Approx(0.5798184952529422).epsilon(1e-9));
}

TEST_CASE("generator loss variants and the exact term identity") {
    CHECK(gan_generator_loss(logits_of({0.0}), GeneratorVariant::reverse_kl).value() ==
          doctest::Approx(0.0));
    CHECK(gan_generator_loss(logits_of({0.0}), GeneratorVariant::alternative).value() ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(gan_generator_loss(logits_of({1.5}), GeneratorVariant::reverse_kl).value() ==
          doctest::Approx(-1.5).epsilon(1e-12));

    Rng rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        Tensor logits = rng.normal_matrix(16, 1, 0.0, 3.0);
        const double rkl = gan_generator_loss(logits, GeneratorVariant::reverse_kl).value();
        const double alt = gan_generator_loss(logits, GeneratorVariant::alternative).value();
        const double sat = gan_generator_loss(logits, GeneratorVariant::saturating).value();
        CHECK(rkl == alt + sat);  // bit-exact term identity
    }
}

TEST_CASE("logit-space and probability-space formulas agree to 1e-9 for |logit| <= 15") {
    Rng rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        const double l = rng.uniform(-15.0, 15.0);
        CHECK(std::fabs(gan_discriminator_loss(logits_of({l}), logits_of({l})).value() -
                        (ref_nlog_d(l) + ref_nlog_1md(l))) <= 1e-9);
        CHECK(std::fabs(gan_generator_loss(logits_of({l}), GeneratorVariant::saturating).value() -
                        (-ref_nlog_1md(l))) <= 1e-9);
    }
}

TEST_CASE("l1 reconstruction: identity, direct sum, linear in lambda") {
    Tensor x = Tensor::matrix(1, 2, {1.0, 1.0});
    CHECK(l1_reconstruction(x, x, 1.0).value() == 0.0);
    Tensor zero = Tensor::zeros({1, 2});
    CHECK(l1_reconstruction(x, zero, 1.0).value() == doctest::Approx(2.0));
    // the usual reconstruction-weight sweep values scale linearly
    for (double lambda : {1.0, 5.0, 10.0, 50.0}) {
        CHECK(l1_reconstruction(x, zero, lambda).value() == doctest::Approx(2.0 * lambda));
    }
    CHECK_THROWS_AS(l1_reconstruction(x, Tensor::zeros({2, 2}), 1.0), ShapeError);
    CHECK_THROWS_AS(l1_reconstruction(x, x, 0.0), DomainError);
}

TEST_CASE("code-discriminator KL estimate sign conventions") {
    CHECK(kl_via_code_discriminator(logits_of({0, 0, 0})).value() == 0.0);
    CHECK(kl_via_code_discriminator(logits_of({-2, -2})).value() == doctest::Approx(2.0));
    CHECK(kl_via_code_discriminator(logits_of({-1, 1})).value() == doctest::Approx(0.0));
}

TEST_CASE("empirical KL: prior match, paper constant, closed-form oracle") {
    // batch with per-dimension mean 0 and sample variance 1
    const std::size_t n = 10;
    const double a = 1.0 / std::sqrt(2.0);
    std::vector<double> rows(2 * n);
    for (std::size_t j = 0; j < n; ++j) {
        rows[j] = a;
        rows[n + j] = -a;
    }
    Tensor codes({2, n}, rows);
    CHECK(empirical_kl(codes, true).value() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(empirical_kl(codes, false).value() == doctest::Approx(10.0).epsilon(1e-12));

    // uncorrected exceeds corrected by exactly n
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        Tensor batch = rng.normal_matrix(64, 7, 0.5, 2.0);
        CHECK(empirical_kl(batch, false).value() - empirical_kl(batch, true).value() == 7.0);
        CHECK(std::fabs(empirical_kl(batch, false, true).value() -
                        empirical_kl(batch, true, true).value() - 1.0) < 1e-12);
    }

    // Monte-Carlo batch from N(1, 4): closed form (4+1)/2 - ln 2 - 1/2
    Tensor mc = rng.normal_matrix(65536, 1, 1.0, 2.0);
    CHECK(std::fabs(empirical_kl(mc, true).value() - 1.3068528194400546) < 0.05);

    // degenerate batch errors
    Tensor flat = Tensor::matrix(3, 2, {1, 2, 1, 2, 1, 2});
    CHECK_THROWS_AS(empirical_kl(flat, true), DomainError);
    CHECK_THROWS_AS(empirical_kl(Tensor::matrix(1, 2, {0, 0}), true), ShapeError);
}

TEST_CASE("empirical KL stays non-negative at large batches") {
    Rng rng(4);
    for (int trial = 0; trial < 5; ++trial) {
        Tensor batch = rng.normal_matrix(4096, 6);
        CHECK(empirical_kl(batch, true).value() > -0.05);
    }
}

TEST_CASE("alpha-GAN encoder loss composition") {
    Tensor x = Tensor::matrix(2, 2, {0.5, -0.5, 0.25, 0.75});
    CHECK(alpha_gan_encoder_loss(x, x, logits_of({0, 0}), 1.0).value() == 0.0);
    // recon term 2.0 (lambda 1, each row L1 = 2) plus code logits -1 -> 3.0
    Tensor shifted = Tensor::matrix(2, 2, {1.5, 0.5, 1.25, 1.75});
    LossTerms lt = alpha_gan_encoder_loss(x, shifted, logits_of({-1, -1}), 1.0);
    CHECK(lt.value() == doctest::Approx(3.0).epsilon(1e-12));
    // doubling lambda doubles exactly the reconstruction component
    LossTerms doubled = alpha_gan_encoder_loss(x, shifted, logits_of({-1, -1}), 2.0);
    CHECK(doubled.component("reconstruction") ==
          doctest::Approx(2.0 * lt.component("reconstruction")).epsilon(1e-12));
    CHECK(doubled.component("kl") == lt.component("kl"));
}

TEST_CASE("alpha-GAN generator loss composition") {
    Tensor x = Tensor::matrix(1, 2, {0.5, -0.5});
    CHECK(alpha_gan_generator_loss(x, x, logits_of({0.0}), logits_of({0.0}), 1.0).value() == 0.0);
    LossTerms lt = alpha_gan_generator_loss(x, x, logits_of({-1.0}), logits_of({-1.0}), 1.0);
    CHECK(lt.value() == doctest::Approx(2.0));
    // adversarial terms untouched by the reconstruction weight; recon 0.5 at
    // lambda 10 shifts the total by 5
    Tensor off = Tensor::matrix(1, 2, {0.75, -0.25});  // L1 error 0.5
    LossTerms shifted = alpha_gan_generator_loss(x, off, logits_of({-1.0}), logits_of({-1.0}), 10.0);
    CHECK(shifted.component("adversarial") == doctest::Approx(lt.component("adversarial")));
    CHECK(shifted.value() == doctest::Approx(lt.value() + 5.0).epsilon(1e-12));
}

TEST_CASE("alpha-GAN discriminator loss values and directional minimum") {
    CHECK(alpha_gan_discriminator_loss(logits_of({0.0}), logits_of({0.0}), logits_of({0.0})).value() ==
          doctest::Approx(3.0 * std::log(2.0)).epsilon(1e-12));
    CHECK(alpha_gan_discriminator_loss(logits_of({40.0}), logits_of({-40.0}), logits_of({-40.0}))
              .value() == doctest::Approx(0.0).epsilon(1e-9));
    // real logit +4, fakes -4: 3 * softplus(-4)
    CHECK(alpha_gan_discriminator_loss(logits_of({4.0}), logits_of({-4.0}), logits_of({-4.0}))
              .value() == doctest::Approx(0.05444978375342921).epsilon(1e-9));
    // strictly decreasing along the ray real -> +inf, fakes -> -inf
    double prev = 1e300;
    for (double t = 0.0; t <= 6.0; t += 0.5) {
        const double v =
            alpha_gan_discriminator_loss(logits_of({t}), logits_of({-t}), logits_of({-t})).value();
        CHECK(v < prev);
        prev = v;
    }
    // the expectation-form weight doubles only the real term
    LossTerms w2 = alpha_gan_discriminator_loss(logits_of({0.0}), logits_of({0.0}),
                                                logits_of({0.0}), 2.0);
    CHECK(w2.value() == doctest::Approx(4.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("code discriminator loss symmetry") {
    CHECK(code_discriminator_loss(logits_of({0, 0}), logits_of({0, 0})).value() ==
          doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
    CHECK(code_discriminator_loss(logits_of({35.0}), logits_of({-35.0})).value() ==
          doctest::Approx(0.0).epsilon(1e-9));
    // swapping the inputs while negating both logit sets leaves the loss unchanged
    Rng rng(5);
    Tensor a = rng.normal_matrix(8, 1, 0.0, 2.0);
    Tensor b = rng.normal_matrix(8, 1, 0.0, 2.0);
    Tensor neg_a = -a;
    Tensor neg_b = -b;
    CHECK(code_discriminator_loss(a, b).value() ==
          doctest::Approx(code_discriminator_loss(neg_b, neg_a).value()).epsilon(1e-12));
}

TEST_CASE("wgan-gp critic loss: zero critic, unit gradient, penalty scaling") {
    Rng data_rng(6);
    Tensor real = data_rng.normal_matrix(16, 2);
    Tensor fake = data_rng.normal_matrix(16, 2);

    CriticFn zero = [](const Tensor& x) { return Tensor::zeros({x.rows(), 1}); };
    Rng r1(7);
    LossTerms lt = wgan_gp_critic_loss(zero, real, fake, 10.0, r1);
    CHECK(lt.value() == doctest::Approx(10.0).epsilon(1e-5));

    // linear critic with unit gradient: penalty vanishes
    Tensor unit_w = Tensor::matrix(2, 1, {1.0, 0.0});
    CriticFn unit = [&](const Tensor& x) { return matmul(x, unit_w); };
    Rng r2(7);
    LossTerms unit_lt = wgan_gp_critic_loss(unit, real, fake, 10.0, r2);
    CHECK(unit_lt.component("penalty") == doctest::Approx(0.0).epsilon(1e-6));

    // gradient norm 0.5 everywhere: deficit^2 = 0.25, coefficient 10 -> 2.5
    Tensor half_w = Tensor::matrix(2, 1, {0.5, 0.0});
    CriticFn half = [&](const Tensor& x) { return matmul(x, half_w); };
    Rng r3(7);
    LossTerms half_lt = wgan_gp_critic_loss(half, real, fake, 10.0, r3);
    CHECK(half_lt.component("penalty") == doctest::Approx(2.5).epsilon(1e-6));

    CHECK_THROWS_AS(wgan_gp_critic_loss(zero, real, data_rng.normal_matrix(8, 2), 10.0, r3),
                    ShapeError);
}

TEST_CASE("vae loss: prior match, closed-form KL, Monte-Carlo cross-check") {
    Tensor x = Tensor::matrix(1, 2, {0.1, -0.2});
    Tensor mu0 = Tensor::zeros({1, 3});
    Tensor logsig0 = Tensor::zeros({1, 3});
    CHECK(vae_loss(x, mu0, logsig0, x, 1.0).value() == doctest::Approx(0.0).epsilon(1e-12));

    Tensor mu1 = Tensor::matrix(1, 1, {1.0});
    Tensor logsig1 = Tensor::zeros({1, 1});
    CHECK(vae_loss(x, mu1, logsig1, x, 1.0).component("kl") == doctest::Approx(0.5).epsilon(1e-12));

    // analytic KL against the batch-moment estimator on samples of N(mu, sigma^2)
    const double mu = 0.7, sigma = 1.6;
    Rng rng(8);
    Tensor draws = rng.normal_matrix(65536, 1, mu, sigma);
    const double analytic = 0.5 * (sigma * sigma + mu * mu) - std::log(sigma) - 0.5;
    CHECK(empirical_kl(draws, true).value() == doctest::Approx(analytic).epsilon(0.05));
    Tensor mu_t = Tensor::matrix(1, 1, {mu});
    Tensor logsig_t = Tensor::matrix(1, 1, {std::log(sigma)});
    CHECK(vae_loss(x, mu_t, logsig_t, x, 1.0).component("kl") ==
          doctest::Approx(analytic).epsilon(1e-12));
}

TEST_CASE("age losses: cosine geometry and empirical KL terms") {
    Rng rng(9);
    Tensor z = rng.normal_matrix(6, 4);
    CHECK(cosine_distance(z, z).value() == doctest::Approx(0.0).epsilon(1e-12));
    std::vector<double> anti(z.values());
    for (double& v : anti) v = -v;
    CHECK(cosine_distance(z, Tensor(z.shape(), anti)).value() ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(cosine_distance(z, Tensor::zeros(z.shape())), DomainError);

    // prior-distributed encoder codes keep the corrected KL near 0
    Tensor prior_codes = rng.normal_matrix(8192, 4);
    AgeWeights w;
    w.data_reconstruction = 1.0;
    Tensor x = rng.normal_matrix(8192, 2);
    LossTerms enc = age_encoder_loss(x, x, prior_codes, prior_codes, w);
    CHECK(enc.component("kl_data") == doctest::Approx(0.0).epsilon(0.02));

    LossTerms gen = age_generator_loss(z, z, w);
    CHECK(gen.component("code_reconstruction") == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("losses are invariant to batch permutation") {
    Rng rng(10);
    Tensor real = rng.normal_matrix(32, 1, 0.0, 2.0);
    Tensor fake = rng.normal_matrix(32, 1, 0.0, 2.0);
    std::vector<std::size_t> perm(32);
    for (std::size_t i = 0; i < 32; ++i) perm[i] = i;
    for (std::size_t i = 32; i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);
    std::vector<double> shuffled(32);
    for (std::size_t i = 0; i < 32; ++i) shuffled[i] = real.at(perm[i]);
    Tensor real_perm({32, 1}, shuffled);
    CHECK(gan_discriminator_loss(real, fake).value() ==
          doctest::Approx(gan_discriminator_loss(real_perm, fake).value()).epsilon(1e-12));
}

TEST_CASE("loss totals equal their documented component sums") {
    Rng rng(11);
    Tensor x = rng.normal_matrix(4, 3);
    Tensor xr = rng.normal_matrix(4, 3);
    Tensor cl = rng.normal_matrix(4, 1);
    LossTerms enc = alpha_gan_encoder_loss(x, xr, cl, 7.0);
    CHECK(std::fabs(enc.value() - (enc.component("reconstruction") + enc.component("kl"))) <=
          1e-10);
    LossTerms disc = alpha_gan_discriminator_loss(cl, cl, cl, 2.0);
    CHECK(std::fabs(disc.value() - (disc.component("real") + disc.component("recon") +
                                    disc.component("sample"))) <= 1e-10);
}
