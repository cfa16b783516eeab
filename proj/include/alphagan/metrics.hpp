#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "alphagan/datasets.hpp"
#include "alphagan/networks.hpp"
#include "alphagan/tensor.hpp"
#include "alphagan/trainers.hpp"

namespace alphagan {

/// One evaluation record. Unset fields were not requested or do not apply to
/// the dataset kind.
struct MetricsReport {
    std::uint64_t iter = 0;
    std::optional<double> neg_wasserstein;
    std::optional<double> diversity;         // in [0,1]
    std::optional<double> classifier_score;  // in [1, n_classes]
    std::optional<std::size_t> modes_covered;
    std::optional<double> high_quality_fraction;  // in [0,1]
    std::vector<double> latent_means;
    std::vector<std::vector<double>> latent_covariance;
};

/// Multi-scale structural similarity between two [H,W] images with pixel
/// range [0,1]. Gaussian window 11x11 (or the side, if smaller), sigma 1.5;
/// contrast/structure at every scale, luminance at the coarsest; canonical
/// weights renormalized over the scales that fit. Scales are reduced until
/// side >= 8 * 2^(scales-1) holds.
double ms_ssim(const Tensor& img_a, const Tensor& img_b, std::size_t scales = 5);

/// 1 - mean MS-SSIM over `pair_count` seeded random distinct pairs. Rows of
/// `images` are flattened side*side images in [0,1]. For calibration: a
/// 64x64 celebrity-faces test set scores about 0.621 on this metric (not
/// reproduced at this scale).
double sample_diversity(const Tensor& images, std::size_t image_side, std::size_t pair_count,
                        std::uint64_t seed);

/// exp(mean_x KL(p(y|x) || p(y))) from a table of per-sample class
/// probabilities (rows sum to 1).
double inception_score_from_probs(const Tensor& probs);

/// Scores generator samples with a trained classifier.
double classifier_score(const Tensor& samples, const NetworkParams& classifier);

/// Softmax class probabilities from a classifier network.
Tensor classifier_probs(const NetworkParams& classifier, const Tensor& x);

/// Trains an MLP classifier on a labeled dataset (softmax cross entropy).
NetworkParams train_classifier(const Dataset& dataset, std::uint64_t seed,
                               std::size_t steps = 3000, double learning_rate = 1e-3);
double classifier_accuracy(const NetworkParams& classifier, const Tensor& data,
                           const std::vector<std::size_t>& labels);

struct ModeCoverage {
    std::size_t modes_covered = 0;
    double high_quality_fraction = 0.0;
};

/// A mode counts as covered when at least 1% of the samples fall within
/// sigma_radius * sigma of its mean.
ModeCoverage mode_coverage(const Tensor& samples, const GaussianMixtureSpec& mixture,
                           double sigma_radius = 3.0);

struct LatentStats {
    std::vector<double> means;
    std::vector<std::vector<double>> covariance;  // symmetric by construction
};

LatentStats stats_of_codes(const Tensor& codes);
LatentStats latent_stats(const TrainedModel& model, const Tensor& data, Rng& rng);

struct CriticConfig {
    std::size_t steps = 5000;
    std::size_t batch_size = 64;
    double learning_rate = 3e-4;
    double gp_coeff = 10.0;
    std::vector<std::size_t> hidden = {64, 64, 64};
    std::size_t eval_every = 100;
    std::uint64_t seed = 0;
    double adam_beta1 = 0.5;
    double adam_beta2 = 0.9;
};

struct CriticResult {
    double neg_wasserstein = 0.0;  // -(mean f(data) - mean f(samples)) on the test halves
    std::vector<std::pair<std::uint64_t, double>> valid_curve;  // minibatch estimates
    std::vector<std::pair<std::uint64_t, double>> test_curve;   // full test-set estimates
};

/// Trains a fresh WGAN-GP critic between held-out data and generator samples
/// (first halves), then reports the negative distance on the second halves.
CriticResult independent_critic_distance(const Tensor& samples, const Tensor& held_out,
                                         const CriticConfig& config = {});

}  // namespace alphagan
