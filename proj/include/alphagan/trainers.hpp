#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "alphagan/adam.hpp"
#include "alphagan/datasets.hpp"
#include "alphagan/losses.hpp"
#include "alphagan/networks.hpp"

namespace alphagan {

enum class Algorithm { alpha_gan, gan, wgan_gp, age, vae };

std::string algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);

struct LearningRates {
    double generator = 1e-4;
    double encoder = 1e-4;
    double discriminator = 5e-4;
    double code_discriminator = 5e-4;
};

struct TrainingConfig {
    Algorithm algorithm = Algorithm::alpha_gan;
    LearningRates learning_rates;
    // Update ratio per outer iteration. For AGE the discriminator slot counts
    // encoder updates; for WGAN-GP it counts critic updates.
    std::size_t generator_steps = 2;
    std::size_t discriminator_steps = 1;
    double lambda = 10.0;  // reconstruction weight
    AgeWeights age_weights;
    double gp_coeff = 10.0;
    std::size_t batch_size = 64;
    std::size_t latent_dim = 10;
    std::size_t noise_dim = 0;  // encoder noise input; 0 = deterministic encoder
    std::size_t max_iter = 20000;
    std::uint64_t seed = 0;
    std::size_t eval_every = 1000;
    std::string dataset_id = "ring";
    double adam_beta1 = 0.5;
    double adam_beta2 = 0.9;
    double adam_eps = 1e-8;
    double init_scale = 0.02;  // weight init sigma
    double real_weight = 1.0;  // alpha-GAN discriminator real-term weight
    GeneratorVariant gan_generator_variant = GeneratorVariant::alternative;
    std::vector<std::size_t> hidden = {64, 64};
    std::vector<std::size_t> code_disc_hidden = {64, 64, 64};
    // One shared minibatch per outer iteration instead of a fresh batch per
    // network update.
    bool shared_batch = false;

    static TrainingConfig defaults_for(Algorithm a);
    void validate() const;  // structural checks only; the CLI layer enforces positive rates
};

struct TrainedModel {
    Algorithm algorithm = Algorithm::alpha_gan;
    TrainingConfig config;
    std::vector<std::pair<std::string, NetworkParams>> networks;
    std::uint64_t iterations = 0;

    const NetworkParams* find(const std::string& name) const;
    NetworkParams* find(const std::string& name);
    bool has_encoder() const { return find("encoder") != nullptr; }
};

/// Builds the freshly initialized network set for the algorithm.
TrainedModel init_model(const TrainingConfig& config, const Dataset& dataset);

/// Draws samples from a trained generator using its latent prior.
Tensor sample_from_model(const TrainedModel& model, std::size_t n, Rng& rng);

/// Encodes `x` and decodes it again. Models without an encoder throw.
Tensor reconstruct_with_model(const TrainedModel& model, const Tensor& x, Rng& rng);

/// Encoder codes for `x` (VAE returns the posterior mean).
Tensor encode_with_model(const TrainedModel& model, const Tensor& x, Rng& rng);

struct MetricRow {
    std::uint64_t iter = 0;
    std::optional<double> wall_ms;  // left unset so logs stay byte-reproducible
    std::optional<double> loss_total, loss_recon, loss_adv, loss_kl, disc_loss, code_disc_loss;
};

struct TrainHooks {
    std::function<void(const MetricRow&)> on_metrics;
    std::function<void(const TrainedModel&, std::uint64_t)> on_checkpoint;
};

/// Base holds what every loop shares: the networks, optimizer states, data
/// access and the seeded streams. Sub-update methods are public so tests can
/// drive and instrument single updates.
class TrainerBase {
  public:
    /// `start` resumes from existing parameters instead of a fresh init; its
    /// network set must match the algorithm.
    TrainerBase(const TrainingConfig& config, const Dataset& dataset,
                const TrainedModel* start = nullptr);
    virtual ~TrainerBase() = default;

    virtual void iteration() = 0;
    virtual MetricRow metrics_row() const;

    void run(const TrainHooks& hooks = {});

    const TrainedModel& model() const { return model_; }
    std::uint64_t iterations_done() const { return iter_; }
    const NetworkParams& network(const std::string& name) const;

  protected:
    Tensor data_batch();
    Tensor prior_batch(std::size_t n);
    Tensor noise_batch(std::size_t n);
    Rng eval_rng() const;  // fresh deterministic stream per (seed, iteration)
    void check_finite(const Tensor& loss, const char* network) const;

    TrainingConfig config_;
    const Dataset& dataset_;
    TrainedModel model_;
    Rng rng_;
    std::uint64_t iter_ = 0;
    Tensor shared_batch_;  // valid when config.shared_batch
};

class AlphaGanTrainer : public TrainerBase {
  public:
    AlphaGanTrainer(const TrainingConfig& config, const Dataset& dataset,
               const TrainedModel* start = nullptr);
    void update_encoder();
    void update_generator();
    void update_discriminator();
    void update_code_discriminator();
    void iteration() override;
    MetricRow metrics_row() const override;

  private:
    AdamState adam_encoder_, adam_generator_, adam_discriminator_, adam_code_discriminator_;
};

class GanTrainer : public TrainerBase {
  public:
    GanTrainer(const TrainingConfig& config, const Dataset& dataset,
               const TrainedModel* start = nullptr);
    void update_discriminator();
    void update_generator();
    void iteration() override;
    MetricRow metrics_row() const override;

  private:
    AdamState adam_generator_, adam_discriminator_;
};

class WganGpTrainer : public TrainerBase {
  public:
    WganGpTrainer(const TrainingConfig& config, const Dataset& dataset,
               const TrainedModel* start = nullptr);
    void update_critic();
    void update_generator();
    void iteration() override;
    MetricRow metrics_row() const override;

  private:
    AdamState adam_generator_, adam_critic_;
};

class AgeTrainer : public TrainerBase {
  public:
    AgeTrainer(const TrainingConfig& config, const Dataset& dataset,
               const TrainedModel* start = nullptr);
    void update_encoder();
    void update_generator();
    void iteration() override;
    MetricRow metrics_row() const override;

  private:
    AdamState adam_generator_, adam_encoder_;
};

class VaeTrainer : public TrainerBase {
  public:
    VaeTrainer(const TrainingConfig& config, const Dataset& dataset,
               const TrainedModel* start = nullptr);
    void update_joint();
    void iteration() override;
    MetricRow metrics_row() const override;

    /// Negative ELBO on a fixed batch; used for convergence monitoring.
    double negative_elbo(const Tensor& x) const;

  private:
    AdamState adam_generator_, adam_encoder_;
};

std::unique_ptr<TrainerBase> make_trainer(const TrainingConfig& config, const Dataset& dataset);

TrainedModel train_alpha_gan(const TrainingConfig& config, const Dataset& dataset,
                             const TrainHooks& hooks = {});
TrainedModel train_gan(const TrainingConfig& config, const Dataset& dataset,
                       const TrainHooks& hooks = {});
TrainedModel train_wgan_gp(const TrainingConfig& config, const Dataset& dataset,
                           const TrainHooks& hooks = {});
TrainedModel train_age(const TrainingConfig& config, const Dataset& dataset,
                       const TrainHooks& hooks = {});
TrainedModel train_vae(const TrainingConfig& config, const Dataset& dataset,
                       const TrainHooks& hooks = {});
TrainedModel train(const TrainingConfig& config, const Dataset& dataset,
                   const TrainHooks& hooks = {});

}  // namespace alphagan
