#include "alphagan/trainers.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "alphagan/ops.hpp"

namespace alphagan {

std::string algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::alpha_gan: return "alpha_gan";
        case Algorithm::gan: return "gan";
        case Algorithm::wgan_gp: return "wgan_gp";
        case Algorithm::age: return "age";
        case Algorithm::vae: return "vae";
    }
    return "unknown";
}

Algorithm algorithm_from_name(const std::string& name) {
    if (name == "alpha_gan") return Algorithm::alpha_gan;
    if (name == "gan") return Algorithm::gan;
    if (name == "wgan_gp") return Algorithm::wgan_gp;
    if (name == "age") return Algorithm::age;
    if (name == "vae") return Algorithm::vae;
    throw std::invalid_argument("unknown algorithm: " + name);
}

TrainingConfig TrainingConfig::defaults_for(Algorithm a) {
    TrainingConfig c;
    c.algorithm = a;
    switch (a) {
        case Algorithm::alpha_gan:
            c.generator_steps = 2;
            c.discriminator_steps = 1;
            c.learning_rates.generator = 5e-4;
            c.learning_rates.encoder = 5e-4;
            break;
        case Algorithm::gan:
            c.generator_steps = 2;
            c.discriminator_steps = 1;
            break;
        case Algorithm::wgan_gp:
            c.generator_steps = 1;
            c.discriminator_steps = 5;
            c.learning_rates.generator = 1e-4;
            c.learning_rates.discriminator = 1e-4;
            break;
        case Algorithm::age:
            c.generator_steps = 2;
            c.discriminator_steps = 1;
            c.learning_rates.generator = 2e-4;
            c.learning_rates.encoder = 2e-4;
            break;
        case Algorithm::vae:
            c.generator_steps = 1;
            c.discriminator_steps = 1;
            // tuned for a clean early descent of the negative ELBO at
            // desk scale; the GAN-family Adam settings stall the warm-up
            c.learning_rates.generator = 3e-4;
            c.learning_rates.encoder = 3e-4;
            c.adam_beta1 = 0.9;
            c.adam_beta2 = 0.999;
            c.init_scale = 0.3;
            break;
    }
    return c;
}

void TrainingConfig::validate() const {
    auto nonneg = [](double v, const char* name) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument(std::string("TrainingConfig: ") + name +
                                        " must be finite and >= 0");
        }
    };
    nonneg(learning_rates.generator, "learning_rates.generator");
    nonneg(learning_rates.encoder, "learning_rates.encoder");
    nonneg(learning_rates.discriminator, "learning_rates.discriminator");
    nonneg(learning_rates.code_discriminator, "learning_rates.code_discriminator");
    if (generator_steps < 1 || discriminator_steps < 1) {
        throw std::invalid_argument("TrainingConfig: update ratios must be >= 1");
    }
    if (batch_size < 2) throw std::invalid_argument("TrainingConfig: batch_size must be >= 2");
    if (latent_dim < 1) throw std::invalid_argument("TrainingConfig: latent_dim must be >= 1");
    if (!(lambda > 0.0)) throw std::invalid_argument("TrainingConfig: lambda must be > 0");
    if (gp_coeff < 0.0) throw std::invalid_argument("TrainingConfig: gp_coeff must be >= 0");
    if (eval_every < 1) throw std::invalid_argument("TrainingConfig: eval_every must be >= 1");
    if (!(init_scale > 0.0)) throw std::invalid_argument("TrainingConfig: init_scale must be > 0");
}

const NetworkParams* TrainedModel::find(const std::string& name) const {
    for (const auto& [n, p] : networks) {
        if (n == name) return &p;
    }
    return nullptr;
}

NetworkParams* TrainedModel::find(const std::string& name) {
    for (auto& [n, p] : networks) {
        if (n == name) return &p;
    }
    return nullptr;
}

namespace {

std::vector<std::size_t> chain(std::size_t in, const std::vector<std::size_t>& hidden,
                               std::size_t out) {
    std::vector<std::size_t> sizes;
    sizes.push_back(in);
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(out);
    return sizes;
}

MLPSpec generator_spec(const TrainingConfig& c, const Dataset& d) {
    MLPSpec s;
    s.init_scale = c.init_scale;
    s.layer_sizes = chain(c.latent_dim, c.hidden, d.dim());
    s.hidden_activation = generator_hidden_activation(d.kind == DatasetKind::images);
    s.output_activation = generator_output_activation(d.kind == DatasetKind::images);
    return s;
}

MLPSpec encoder_spec(const TrainingConfig& c, const Dataset& d) {
    MLPSpec s;
    s.init_scale = c.init_scale;
    const std::size_t out = c.algorithm == Algorithm::vae ? 2 * c.latent_dim : c.latent_dim;
    std::vector<std::size_t> hidden(c.hidden.rbegin(), c.hidden.rend());
    s.layer_sizes = chain(d.dim() + c.noise_dim, hidden, out);
    s.hidden_activation = Activation::leaky_relu;
    s.output_activation = Activation::identity;
    return s;
}

MLPSpec discriminator_spec(const TrainingConfig& c, const Dataset& d) {
    MLPSpec s;
    s.init_scale = c.init_scale;
    s.layer_sizes = chain(d.dim(), c.hidden, 1);
    s.hidden_activation = Activation::leaky_relu;
    s.output_activation = Activation::identity;
    return s;
}

MLPSpec code_discriminator_spec(const TrainingConfig& c) {
    MLPSpec s;
    s.init_scale = c.init_scale;
    s.layer_sizes = chain(c.latent_dim, c.code_disc_hidden, 1);
    s.hidden_activation = Activation::leaky_relu;
    s.output_activation = Activation::identity;
    return s;
}

}  // namespace

TrainedModel init_model(const TrainingConfig& config, const Dataset& dataset) {
    config.validate();
    TrainedModel m;
    m.algorithm = config.algorithm;
    m.config = config;
    Rng seeds(config.seed);
    auto add = [&](const std::string& name, Role role, const MLPSpec& spec) {
        m.networks.emplace_back(name, init_params(role, spec, seeds.next_u64()));
    };
    switch (config.algorithm) {
        case Algorithm::alpha_gan:
            add("generator", Role::generator, generator_spec(config, dataset));
            add("encoder", Role::encoder, encoder_spec(config, dataset));
            add("discriminator", Role::discriminator, discriminator_spec(config, dataset));
            add("code_discriminator", Role::code_discriminator, code_discriminator_spec(config));
            break;
        case Algorithm::gan:
            add("generator", Role::generator, generator_spec(config, dataset));
            add("discriminator", Role::discriminator, discriminator_spec(config, dataset));
            break;
        case Algorithm::wgan_gp:
            add("generator", Role::generator, generator_spec(config, dataset));
            add("critic", Role::critic, discriminator_spec(config, dataset));
            break;
        case Algorithm::age:
            add("generator", Role::generator, generator_spec(config, dataset));
            add("encoder", Role::encoder, encoder_spec(config, dataset));
            break;
        case Algorithm::vae:
            add("generator", Role::generator, generator_spec(config, dataset));
            add("encoder", Role::encoder, encoder_spec(config, dataset));
            break;
    }
    return m;
}

Tensor sample_from_model(const TrainedModel& model, std::size_t n, Rng& rng) {
    const NetworkParams* gen = model.find("generator");
    if (!gen) throw std::logic_error("model has no generator");
    const std::size_t latent = gen->input_size();
    Tensor z = model.algorithm == Algorithm::age ? sample_unit_ball_prior(n, latent, rng)
                                                 : sample_normal_prior(n, latent, rng);
    return generator_forward(*gen, z);
}

Tensor encode_with_model(const TrainedModel& model, const Tensor& x, Rng& rng) {
    const NetworkParams* enc = model.find("encoder");
    if (!enc) throw std::logic_error("model has no encoder");
    if (model.algorithm == Algorithm::vae) {
        Tensor h = mlp_forward(*enc, x);
        return narrow(h, 1, 0, model.find("generator")->input_size());  // posterior mean
    }
    const std::size_t noise_dim = enc->input_size() - x.cols();
    Tensor noise = noise_dim > 0 ? sample_normal_prior(x.rows(), noise_dim, rng) : Tensor();
    return encoder_forward(*enc, x, noise, model.algorithm == Algorithm::age);
}

Tensor reconstruct_with_model(const TrainedModel& model, const Tensor& x, Rng& rng) {
    const NetworkParams* gen = model.find("generator");
    if (!gen) throw std::logic_error("model has no generator");
    return generator_forward(*gen, encode_with_model(model, x, rng));
}

TrainerBase::TrainerBase(const TrainingConfig& config, const Dataset& dataset,
                         const TrainedModel* start)
    : config_(config),
      dataset_(dataset),
      model_(start ? *start : init_model(config, dataset)),
      rng_(config.seed) {
    if (start && start->algorithm != config.algorithm) {
        throw std::invalid_argument("start model algorithm does not match the config");
    }
}

Tensor TrainerBase::data_batch() {
    if (config_.shared_batch && shared_batch_.defined()) return shared_batch_;
    return sample_rows(dataset_.train, config_.batch_size, rng_);
}

Tensor TrainerBase::prior_batch(std::size_t n) {
    return config_.algorithm == Algorithm::age
               ? sample_unit_ball_prior(n, config_.latent_dim, rng_)
               : sample_normal_prior(n, config_.latent_dim, rng_);
}

Tensor TrainerBase::noise_batch(std::size_t n) {
    if (config_.noise_dim == 0) return Tensor();
    return sample_normal_prior(n, config_.noise_dim, rng_);
}

Rng TrainerBase::eval_rng() const {
    return Rng(config_.seed ^ (0x9e3779b97f4a7c15ull + iter_ * 0x2545f4914f6cdd1dull));
}

void TrainerBase::check_finite(const Tensor& loss, const char* network) const {
    if (!std::isfinite(loss.value())) throw NumericAbort(network, iter_);
}

const NetworkParams& TrainerBase::network(const std::string& name) const {
    const NetworkParams* p = model_.find(name);
    if (!p) throw std::logic_error("no network named " + name);
    return *p;
}

MetricRow TrainerBase::metrics_row() const {
    MetricRow row;
    row.iter = iter_;
    return row;
}

void TrainerBase::run(const TrainHooks& hooks) {
    auto emit = [&]() {
        if (hooks.on_metrics) hooks.on_metrics(metrics_row());
        if (hooks.on_checkpoint) {
            model_.iterations = iter_;
            hooks.on_checkpoint(model_, iter_);
        }
    };
    emit();
    while (iter_ < config_.max_iter) {
        if (config_.shared_batch) {
            shared_batch_ = sample_rows(dataset_.train, config_.batch_size, rng_);
        }
        iteration();
        ++iter_;
        if (iter_ % config_.eval_every == 0 || iter_ == config_.max_iter) emit();
    }
    model_.iterations = iter_;
}

// ---------------------------------------------------------------------------
// alpha-GAN, algorithm steps in the order encoder, generator, discriminator,
// code discriminator.

AlphaGanTrainer::AlphaGanTrainer(const TrainingConfig& config, const Dataset& dataset,
                 const TrainedModel* start)
    : TrainerBase(config, dataset, start),
      adam_encoder_(config.learning_rates.encoder, config.adam_beta1, config.adam_beta2,
                    config.adam_eps),
      adam_generator_(config.learning_rates.generator, config.adam_beta1, config.adam_beta2,
                      config.adam_eps),
      adam_discriminator_(config.learning_rates.discriminator, config.adam_beta1,
                          config.adam_beta2, config.adam_eps),
      adam_code_discriminator_(config.learning_rates.code_discriminator, config.adam_beta1,
                               config.adam_beta2, config.adam_eps) {
    if (config.algorithm != Algorithm::alpha_gan) {
        throw std::invalid_argument("AlphaGanTrainer: config.algorithm must be alpha_gan");
    }
}

void AlphaGanTrainer::update_encoder() {
    Tensor x = data_batch();
    Tensor noise = noise_batch(x.rows());
    NetworkParams& enc = *model_.find("encoder");
    Tape tape;
    WatchedParams live = watch(tape, enc);
    Tensor z_hat = encoder_forward(enc, live, x, noise);
    Tensor x_hat = generator_forward(network("generator"), z_hat);
    Tensor code_logits = code_discriminator_forward(network("code_discriminator"), z_hat);
    LossTerms lt = alpha_gan_encoder_loss(x, x_hat, code_logits, config_.lambda);
    check_finite(lt.total, "encoder");
    tape.backward(lt.total);
    adam_encoder_.step(enc, live, iter_);
}

void AlphaGanTrainer::update_generator() {
    Tensor x = data_batch();
    Tensor noise = noise_batch(x.rows());
    Tensor z_hat = encoder_forward(network("encoder"), x, noise);
    Tensor z_prior = prior_batch(config_.batch_size);
    NetworkParams& gen = *model_.find("generator");
    Tape tape;
    WatchedParams live = watch(tape, gen);
    Tensor x_hat = generator_forward(gen, live, z_hat);
    Tensor samples = generator_forward(gen, live, z_prior);
    Tensor recon_logits = discriminator_forward(network("discriminator"), x_hat);
    Tensor sample_logits = discriminator_forward(network("discriminator"), samples);
    LossTerms lt = alpha_gan_generator_loss(x, x_hat, recon_logits, sample_logits, config_.lambda);
    check_finite(lt.total, "generator");
    tape.backward(lt.total);
    adam_generator_.step(gen, live, iter_);
}

void AlphaGanTrainer::update_discriminator() {
    Tensor x = data_batch();
    Tensor noise = noise_batch(x.rows());
    Tensor x_hat = generator_forward(network("generator"),
                                     encoder_forward(network("encoder"), x, noise));
    Tensor samples = generator_forward(network("generator"), prior_batch(config_.batch_size));
    NetworkParams& disc = *model_.find("discriminator");
    Tape tape;
    WatchedParams live = watch(tape, disc);
    Tensor real_logits = discriminator_forward(disc, live, x);
    Tensor recon_logits = discriminator_forward(disc, live, x_hat);
    Tensor sample_logits = discriminator_forward(disc, live, samples);
    LossTerms lt = alpha_gan_discriminator_loss(real_logits, recon_logits, sample_logits,
                                                config_.real_weight);
    check_finite(lt.total, "discriminator");
    tape.backward(lt.total);
    adam_discriminator_.step(disc, live, iter_);
}

void AlphaGanTrainer::update_code_discriminator() {
    Tensor x = data_batch();
    Tensor noise = noise_batch(x.rows());
    Tensor z_hat = encoder_forward(network("encoder"), x, noise);
    Tensor z_prior = prior_batch(config_.batch_size);
    NetworkParams& code_disc = *model_.find("code_discriminator");
    Tape tape;
    WatchedParams live = watch(tape, code_disc);
    Tensor prior_logits = code_discriminator_forward(code_disc, live, z_prior);
    Tensor posterior_logits = code_discriminator_forward(code_disc, live, z_hat);
    Tensor loss = code_discriminator_loss(prior_logits, posterior_logits);
    check_finite(loss, "code_discriminator");
    tape.backward(loss);
    adam_code_discriminator_.step(code_disc, live, iter_);
}

void AlphaGanTrainer::iteration() {
    for (std::size_t i = 0; i < config_.generator_steps; ++i) update_encoder();
    for (std::size_t i = 0; i < config_.generator_steps; ++i) update_generator();
    for (std::size_t i = 0; i < config_.discriminator_steps; ++i) update_discriminator();
    for (std::size_t i = 0; i < config_.discriminator_steps; ++i) update_code_discriminator();
}

MetricRow AlphaGanTrainer::metrics_row() const {
    Rng rng = eval_rng();
    Tensor x = sample_rows(dataset_.train, config_.batch_size, rng);
    Tensor noise = config_.noise_dim > 0 ? sample_normal_prior(x.rows(), config_.noise_dim, rng)
                                         : Tensor();
    Tensor z_hat = encoder_forward(network("encoder"), x, noise);
    Tensor x_hat = generator_forward(network("generator"), z_hat);
    Tensor z_prior = sample_normal_prior(config_.batch_size, config_.latent_dim, rng);
    Tensor samples = generator_forward(network("generator"), z_prior);
    Tensor real_logits = discriminator_forward(network("discriminator"), x);
    Tensor recon_logits = discriminator_forward(network("discriminator"), x_hat);
    Tensor sample_logits = discriminator_forward(network("discriminator"), samples);
    Tensor code_logits = code_discriminator_forward(network("code_discriminator"), z_hat);
    Tensor prior_logits = code_discriminator_forward(network("code_discriminator"), z_prior);

    MetricRow row;
    row.iter = iter_;
    row.loss_recon = l1_reconstruction(x, x_hat, config_.lambda).value();
    row.loss_adv = (mean(-recon_logits) + mean(-sample_logits)).value();
    row.loss_kl = kl_via_code_discriminator(code_logits).value();
    row.loss_total = *row.loss_recon + *row.loss_adv + *row.loss_kl;
    row.disc_loss = alpha_gan_discriminator_loss(real_logits, recon_logits, sample_logits,
                                                 config_.real_weight)
                        .value();
    row.code_disc_loss = code_discriminator_loss(prior_logits, code_logits).value();
    return row;
}

// ---------------------------------------------------------------------------
// GAN (traditional loss, non-saturating generator by default)

GanTrainer::GanTrainer(const TrainingConfig& config, const Dataset& dataset,
                 const TrainedModel* start)
    : TrainerBase(config, dataset, start),
      adam_generator_(config.learning_rates.generator, config.adam_beta1, config.adam_beta2,
                      config.adam_eps),
      adam_discriminator_(config.learning_rates.discriminator, config.adam_beta1,
                          config.adam_beta2, config.adam_eps) {
    if (config.algorithm != Algorithm::gan) {
        throw std::invalid_argument("GanTrainer: config.algorithm must be gan");
    }
}

void GanTrainer::update_discriminator() {
    Tensor x = data_batch();
    Tensor fake = generator_forward(network("generator"), prior_batch(config_.batch_size));
    NetworkParams& disc = *model_.find("discriminator");
    Tape tape;
    WatchedParams live = watch(tape, disc);
    LossTerms lt = gan_discriminator_loss(discriminator_forward(disc, live, x),
                                          discriminator_forward(disc, live, fake));
    check_finite(lt.total, "discriminator");
    tape.backward(lt.total);
    adam_discriminator_.step(disc, live, iter_);
}

void GanTrainer::update_generator() {
    Tensor z = prior_batch(config_.batch_size);
    NetworkParams& gen = *model_.find("generator");
    Tape tape;
    WatchedParams live = watch(tape, gen);
    Tensor fake = generator_forward(gen, live, z);
    LossTerms lt = gan_generator_loss(discriminator_forward(network("discriminator"), fake),
                                      config_.gan_generator_variant);
    check_finite(lt.total, "generator");
    tape.backward(lt.total);
    adam_generator_.step(gen, live, iter_);
}

void GanTrainer::iteration() {
    for (std::size_t i = 0; i < config_.discriminator_steps; ++i) update_discriminator();
    for (std::size_t i = 0; i < config_.generator_steps; ++i) update_generator();
}

MetricRow GanTrainer::metrics_row() const {
    Rng rng = eval_rng();
    Tensor x = sample_rows(dataset_.train, config_.batch_size, rng);
    Tensor fake = generator_forward(network("generator"),
                                    sample_normal_prior(config_.batch_size, config_.latent_dim, rng));
    Tensor real_logits = discriminator_forward(network("discriminator"), x);
    Tensor fake_logits = discriminator_forward(network("discriminator"), fake);
    MetricRow row;
    row.iter = iter_;
    row.loss_adv = gan_generator_loss(fake_logits, config_.gan_generator_variant).value();
    row.loss_total = row.loss_adv;
    row.disc_loss = gan_discriminator_loss(real_logits, fake_logits).value();
    return row;
}

// ---------------------------------------------------------------------------
// WGAN-GP

WganGpTrainer::WganGpTrainer(const TrainingConfig& config, const Dataset& dataset,
                 const TrainedModel* start)
    : TrainerBase(config, dataset, start),
      adam_generator_(config.learning_rates.generator, config.adam_beta1, config.adam_beta2,
                      config.adam_eps),
      adam_critic_(config.learning_rates.discriminator, config.adam_beta1, config.adam_beta2,
                   config.adam_eps) {
    if (config.algorithm != Algorithm::wgan_gp) {
        throw std::invalid_argument("WganGpTrainer: config.algorithm must be wgan_gp");
    }
}

void WganGpTrainer::update_critic() {
    Tensor x = data_batch();
    Tensor fake = generator_forward(network("generator"), prior_batch(config_.batch_size));
    NetworkParams& critic = *model_.find("critic");
    Tape tape;
    WatchedParams live = watch(tape, critic);
    CriticFn fn = [&](const Tensor& in) { return mlp_forward(critic, live, in); };
    LossTerms lt = wgan_gp_critic_loss(fn, x, fake, config_.gp_coeff, rng_);
    check_finite(lt.total, "critic");
    tape.backward(lt.total);
    adam_critic_.step(critic, live, iter_);
}

void WganGpTrainer::update_generator() {
    Tensor z = prior_batch(config_.batch_size);
    NetworkParams& gen = *model_.find("generator");
    Tape tape;
    WatchedParams live = watch(tape, gen);
    Tensor fake = generator_forward(gen, live, z);
    CriticFn fn = [&](const Tensor& in) { return mlp_forward(network("critic"), in); };
    Tensor loss = wgan_generator_loss(fn, fake);
    check_finite(loss, "generator");
    tape.backward(loss);
    adam_generator_.step(gen, live, iter_);
}

void WganGpTrainer::iteration() {
    for (std::size_t i = 0; i < config_.discriminator_steps; ++i) update_critic();
    for (std::size_t i = 0; i < config_.generator_steps; ++i) update_generator();
}

MetricRow WganGpTrainer::metrics_row() const {
    Rng rng = eval_rng();
    Tensor x = sample_rows(dataset_.train, config_.batch_size, rng);
    Tensor fake = generator_forward(network("generator"),
                                    sample_normal_prior(config_.batch_size, config_.latent_dim, rng));
    CriticFn fn = [&](const Tensor& in) { return mlp_forward(network("critic"), in); };
    MetricRow row;
    row.iter = iter_;
    row.loss_adv = wgan_generator_loss(fn, fake).value();
    row.loss_total = row.loss_adv;
    Rng gp_rng = eval_rng();
    row.disc_loss = wgan_gp_critic_loss(fn, x, fake, config_.gp_coeff, gp_rng).value();
    return row;
}

// ---------------------------------------------------------------------------
// AGE (unit-ball prior, empirical KL, cosine code reconstruction)

AgeTrainer::AgeTrainer(const TrainingConfig& config, const Dataset& dataset,
                 const TrainedModel* start)
    : TrainerBase(config, dataset, start),
      adam_generator_(config.learning_rates.generator, config.adam_beta1, config.adam_beta2,
                      config.adam_eps),
      adam_encoder_(config.learning_rates.encoder, config.adam_beta1, config.adam_beta2,
                    config.adam_eps) {
    if (config.algorithm != Algorithm::age) {
        throw std::invalid_argument("AgeTrainer: config.algorithm must be age");
    }
}

void AgeTrainer::update_encoder() {
    Tensor x = data_batch();
    Tensor noise = noise_batch(x.rows());
    Tensor samples = generator_forward(network("generator"), prior_batch(config_.batch_size));
    NetworkParams& enc = *model_.find("encoder");
    Tape tape;
    WatchedParams live = watch(tape, enc);
    Tensor codes_data = encoder_forward(enc, live, x, noise, /*unit_ball=*/true);
    Tensor x_hat = generator_forward(network("generator"), codes_data);
    Tensor codes_samples = encoder_forward(enc, live, samples, noise_batch(samples.rows()),
                                           /*unit_ball=*/true);
    LossTerms lt = age_encoder_loss(x, x_hat, codes_data, codes_samples, config_.age_weights);
    check_finite(lt.total, "encoder");
    tape.backward(lt.total);
    adam_encoder_.step(enc, live, iter_);
}

void AgeTrainer::update_generator() {
    Tensor z_prior = prior_batch(config_.batch_size);
    NetworkParams& gen = *model_.find("generator");
    Tape tape;
    WatchedParams live = watch(tape, gen);
    Tensor samples = generator_forward(gen, live, z_prior);
    Tensor codes_samples = encoder_forward(network("encoder"), samples,
                                           noise_batch(samples.rows()), /*unit_ball=*/true);
    LossTerms lt = age_generator_loss(z_prior, codes_samples, config_.age_weights);
    check_finite(lt.total, "generator");
    tape.backward(lt.total);
    adam_generator_.step(gen, live, iter_);
}

void AgeTrainer::iteration() {
    for (std::size_t i = 0; i < config_.discriminator_steps; ++i) update_encoder();
    for (std::size_t i = 0; i < config_.generator_steps; ++i) update_generator();
}

MetricRow AgeTrainer::metrics_row() const {
    Rng rng = eval_rng();
    Tensor x = sample_rows(dataset_.train, config_.batch_size, rng);
    Tensor noise = config_.noise_dim > 0 ? sample_normal_prior(x.rows(), config_.noise_dim, rng)
                                         : Tensor();
    Tensor z_prior = sample_unit_ball_prior(config_.batch_size, config_.latent_dim, rng);
    Tensor codes_data = encoder_forward(network("encoder"), x, noise, true);
    Tensor x_hat = generator_forward(network("generator"), codes_data);
    Tensor samples = generator_forward(network("generator"), z_prior);
    Tensor codes_samples = encoder_forward(network("encoder"), samples, noise, true);

    MetricRow row;
    row.iter = iter_;
    LossTerms enc = age_encoder_loss(x, x_hat, codes_data, codes_samples, config_.age_weights);
    LossTerms gen = age_generator_loss(z_prior, codes_samples, config_.age_weights);
    row.loss_total = enc.value();
    row.loss_recon = enc.component("reconstruction");
    row.loss_kl = enc.component("kl_data");
    row.loss_adv = gen.value();
    return row;
}

// ---------------------------------------------------------------------------
// VAE (reparameterized, Laplace likelihood via L1, analytic KL)

VaeTrainer::VaeTrainer(const TrainingConfig& config, const Dataset& dataset,
                 const TrainedModel* start)
    : TrainerBase(config, dataset, start),
      adam_generator_(config.learning_rates.generator, config.adam_beta1, config.adam_beta2,
                      config.adam_eps),
      adam_encoder_(config.learning_rates.encoder, config.adam_beta1, config.adam_beta2,
                    config.adam_eps) {
    if (config.algorithm != Algorithm::vae) {
        throw std::invalid_argument("VaeTrainer: config.algorithm must be vae");
    }
}

void VaeTrainer::update_joint() {
    Tensor x = data_batch();
    Tensor eps = sample_normal_prior(x.rows(), config_.latent_dim, rng_);
    NetworkParams& enc = *model_.find("encoder");
    NetworkParams& gen = *model_.find("generator");
    Tape tape;
    WatchedParams live_enc = watch(tape, enc);
    WatchedParams live_gen = watch(tape, gen);
    Tensor h = mlp_forward(enc, live_enc, x);
    Tensor mu = narrow(h, 1, 0, config_.latent_dim);
    Tensor log_sigma = narrow(h, 1, config_.latent_dim, config_.latent_dim);
    Tensor z = mu + exp(log_sigma) * eps;
    Tensor x_hat = generator_forward(gen, live_gen, z);
    LossTerms lt = vae_loss(x, mu, log_sigma, x_hat, config_.lambda);
    check_finite(lt.total, "vae");
    tape.backward(lt.total);
    adam_encoder_.step(enc, live_enc, iter_);
    adam_generator_.step(gen, live_gen, iter_);
}

void VaeTrainer::iteration() { update_joint(); }

double VaeTrainer::negative_elbo(const Tensor& x) const {
    // deterministic: reconstruction through the posterior mean
    Tensor h = mlp_forward(network("encoder"), x);
    Tensor mu = narrow(h, 1, 0, config_.latent_dim);
    Tensor log_sigma = narrow(h, 1, config_.latent_dim, config_.latent_dim);
    Tensor x_hat = generator_forward(network("generator"), mu);
    return vae_loss(x, mu, log_sigma, x_hat, config_.lambda).value();
}

MetricRow VaeTrainer::metrics_row() const {
    Rng rng = eval_rng();
    Tensor x = sample_rows(dataset_.train, config_.batch_size, rng);
    Tensor h = mlp_forward(network("encoder"), x);
    Tensor mu = narrow(h, 1, 0, config_.latent_dim);
    Tensor log_sigma = narrow(h, 1, config_.latent_dim, config_.latent_dim);
    Tensor eps = sample_normal_prior(x.rows(), config_.latent_dim, rng);
    Tensor x_hat = generator_forward(network("generator"), mu + exp(log_sigma) * eps);
    LossTerms lt = vae_loss(x, mu, log_sigma, x_hat, config_.lambda);
    MetricRow row;
    row.iter = iter_;
    row.loss_total = lt.value();
    row.loss_recon = lt.component("reconstruction");
    row.loss_kl = lt.component("kl");
    return row;
}

// ---------------------------------------------------------------------------

std::unique_ptr<TrainerBase> make_trainer(const TrainingConfig& config, const Dataset& dataset) {
    switch (config.algorithm) {
        case Algorithm::alpha_gan: return std::make_unique<AlphaGanTrainer>(config, dataset);
        case Algorithm::gan: return std::make_unique<GanTrainer>(config, dataset);
        case Algorithm::wgan_gp: return std::make_unique<WganGpTrainer>(config, dataset);
        case Algorithm::age: return std::make_unique<AgeTrainer>(config, dataset);
        case Algorithm::vae: return std::make_unique<VaeTrainer>(config, dataset);
    }
    throw std::logic_error("unknown algorithm");
}

namespace {

TrainedModel run_trainer(const TrainingConfig& config, const Dataset& dataset,
                         const TrainHooks& hooks) {
    std::unique_ptr<TrainerBase> trainer = make_trainer(config, dataset);
    trainer->run(hooks);
    return trainer->model();
}

}  // namespace

TrainedModel train_alpha_gan(const TrainingConfig& c, const Dataset& d, const TrainHooks& h) {
    if (c.algorithm != Algorithm::alpha_gan) {
        throw std::invalid_argument("train_alpha_gan: config.algorithm must be alpha_gan");
    }
    return run_trainer(c, d, h);
}
TrainedModel train_gan(const TrainingConfig& c, const Dataset& d, const TrainHooks& h) {
    return run_trainer(c, d, h);
}
TrainedModel train_wgan_gp(const TrainingConfig& c, const Dataset& d, const TrainHooks& h) {
    return run_trainer(c, d, h);
}
TrainedModel train_age(const TrainingConfig& c, const Dataset& d, const TrainHooks& h) {
    return run_trainer(c, d, h);
}
TrainedModel train_vae(const TrainingConfig& c, const Dataset& d, const TrainHooks& h) {
    return run_trainer(c, d, h);
}
TrainedModel train(const TrainingConfig& c, const Dataset& d, const TrainHooks& h) {
    return run_trainer(c, d, h);
}

}  // namespace alphagan
