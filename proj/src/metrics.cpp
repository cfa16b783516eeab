#include "alphagan/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "alphagan/adam.hpp"
#include "alphagan/losses.hpp"
#include "alphagan/ops.hpp"

namespace alphagan {

namespace {

constexpr double kC1 = 0.01 * 0.01;  // (K1*L)^2, L = 1
constexpr double kC2 = 0.03 * 0.03;

std::vector<double> gaussian_window(std::size_t size, double sigma) {
    std::vector<double> w(size);
    const double center = (static_cast<double>(size) - 1.0) / 2.0;
    double total = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
        const double d = static_cast<double>(i) - center;
        w[i] = std::exp(-d * d / (2.0 * sigma * sigma));
        total += w[i];
    }
    for (double& v : w) v /= total;
    return w;
}

// separable valid-mode filter: rows then columns
std::vector<double> filter_valid(const std::vector<double>& img, std::size_t side,
                                 const std::vector<double>& win) {
    const std::size_t w = win.size();
    const std::size_t out = side - w + 1;
    std::vector<double> tmp(side * out);
    for (std::size_t r = 0; r < side; ++r) {
        for (std::size_t c = 0; c < out; ++c) {
            double acc = 0.0;
            for (std::size_t k = 0; k < w; ++k) acc += img[r * side + c + k] * win[k];
            tmp[r * out + c] = acc;
        }
    }
    std::vector<double> res(out * out);
    for (std::size_t c = 0; c < out; ++c) {
        for (std::size_t r = 0; r < out; ++r) {
            double acc = 0.0;
            for (std::size_t k = 0; k < w; ++k) acc += tmp[(r + k) * out + c] * win[k];
            res[r * out + c] = acc;
        }
    }
    return res;
}

std::vector<double> downsample2(const std::vector<double>& img, std::size_t side,
                                std::size_t& out_side) {
    out_side = side / 2;
    std::vector<double> res(out_side * out_side);
    for (std::size_t r = 0; r < out_side; ++r) {
        for (std::size_t c = 0; c < out_side; ++c) {
            res[r * out_side + c] = 0.25 * (img[2 * r * side + 2 * c] +
                                            img[2 * r * side + 2 * c + 1] +
                                            img[(2 * r + 1) * side + 2 * c] +
                                            img[(2 * r + 1) * side + 2 * c + 1]);
        }
    }
    return res;
}

struct ScaleTerms {
    double cs = 0.0;
    double luminance = 0.0;
};

ScaleTerms ssim_terms(const std::vector<double>& a, const std::vector<double>& b,
                      std::size_t side) {
    const std::size_t wsize = std::min<std::size_t>(11, side);
    const std::vector<double> win = gaussian_window(wsize, 1.5);

    std::vector<double> a2(a.size()), b2(a.size()), ab(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        a2[i] = a[i] * a[i];
        b2[i] = b[i] * b[i];
        ab[i] = a[i] * b[i];
    }
    const std::vector<double> mu1 = filter_valid(a, side, win);
    const std::vector<double> mu2 = filter_valid(b, side, win);
    const std::vector<double> e_a2 = filter_valid(a2, side, win);
    const std::vector<double> e_b2 = filter_valid(b2, side, win);
    const std::vector<double> e_ab = filter_valid(ab, side, win);

    double cs_sum = 0.0, l_sum = 0.0;
    for (std::size_t i = 0; i < mu1.size(); ++i) {
        // explicit fma keeps the three moments bitwise identical when a == b,
        // so self-similarity is exactly 1 regardless of fp contraction
        const double var1 = std::fma(-mu1[i], mu1[i], e_a2[i]);
        const double var2 = std::fma(-mu2[i], mu2[i], e_b2[i]);
        const double cov = std::fma(-mu1[i], mu2[i], e_ab[i]);
        const double cross = mu1[i] * mu2[i];
        const double sq1 = mu1[i] * mu1[i];
        const double sq2 = mu2[i] * mu2[i];
        cs_sum += (2.0 * cov + kC2) / (var1 + var2 + kC2);
        l_sum += (2.0 * cross + kC1) / (sq1 + sq2 + kC1);
    }
    const double n = static_cast<double>(mu1.size());
    return {cs_sum / n, l_sum / n};
}

constexpr double kMsssimWeights[5] = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

}  // namespace

double ms_ssim(const Tensor& img_a, const Tensor& img_b, std::size_t scales) {
    if (img_a.shape() != img_b.shape()) {
        throw ShapeError("ms_ssim: shape mismatch " + shape_str(img_a.shape()) + " vs " +
                         shape_str(img_b.shape()));
    }
    if (img_a.rank() != 2 || img_a.rows() != img_a.cols()) {
        throw ShapeError("ms_ssim: expected square [side,side] images, got " +
                         shape_str(img_a.shape()));
    }
    const std::size_t side = img_a.rows();
    if (side < 8) throw ShapeError("ms_ssim: image too small for 1 scale (side >= 8 required)");
    if (scales < 1 || scales > 5) throw DomainError("ms_ssim: scales must be in [1,5]");
    // largest M with side >= 8 * 2^(M-1)
    std::size_t max_scales = 1;
    while (max_scales < scales && side >= 8u * (1u << max_scales)) ++max_scales;
    const std::size_t m = std::min(scales, max_scales);

    double weight_sum = 0.0;
    for (std::size_t s = 0; s < m; ++s) weight_sum += kMsssimWeights[s];

    std::vector<double> a = img_a.values(), b = img_b.values();
    std::size_t cur_side = side;
    double result = 1.0;
    for (std::size_t s = 0; s < m; ++s) {
        const ScaleTerms terms = ssim_terms(a, b, cur_side);
        const double w = kMsssimWeights[s] / weight_sum;
        result *= std::pow(std::max(terms.cs, 0.0), w);
        if (s + 1 == m) result *= std::pow(std::max(terms.luminance, 0.0), w);
        if (s + 1 < m) {
            const std::size_t prev_side = cur_side;
            a = downsample2(a, prev_side, cur_side);
            std::size_t same = 0;
            b = downsample2(b, prev_side, same);
        }
    }
    return result;
}

double sample_diversity(const Tensor& images, std::size_t image_side, std::size_t pair_count,
                        std::uint64_t seed) {
    if (images.rank() != 2 || images.rows() < 2) {
        throw ShapeError("sample_diversity: need at least 2 images");
    }
    const std::size_t n = images.rows();
    const std::size_t all_pairs = n * (n - 1) / 2;
    if (pair_count == 0 || pair_count > all_pairs) {
        throw DomainError("sample_diversity: pair_count must be in [1, n(n-1)/2]");
    }
    auto image_at = [&](std::size_t i) {
        std::vector<double> v(images.values().begin() + static_cast<long>(i * images.cols()),
                              images.values().begin() + static_cast<long>((i + 1) * images.cols()));
        return Tensor({image_side, image_side}, std::move(v));
    };
    Rng rng(seed);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    double total = 0.0;
    std::size_t taken = 0;
    while (taken < pair_count) {
        std::size_t i = rng.index(n);
        std::size_t j = rng.index(n);
        if (i == j) continue;
        if (i > j) std::swap(i, j);
        if (!seen.insert({i, j}).second) continue;
        total += ms_ssim(image_at(i), image_at(j));
        ++taken;
    }
    return std::clamp(1.0 - total / static_cast<double>(pair_count), 0.0, 1.0);
}

double inception_score_from_probs(const Tensor& probs) {
    if (probs.rank() != 2) throw ShapeError("inception_score: expected [n, classes] probabilities");
    const std::size_t n = probs.rows(), c = probs.cols();
    std::vector<double> marginal(c, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < c; ++j) marginal[j] += probs.at(i, j);
    for (double& v : marginal) v /= static_cast<double>(n);
    double kl_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            const double p = probs.at(i, j);
            if (p > 0.0) kl_sum += p * std::log(p / marginal[j]);
        }
    }
    return std::exp(kl_sum / static_cast<double>(n));
}

Tensor classifier_probs(const NetworkParams& classifier, const Tensor& x) {
    return softmax(mlp_forward(classifier, x), 1);
}

double classifier_score(const Tensor& samples, const NetworkParams& classifier) {
    if (samples.cols() != classifier.input_size()) {
        throw ShapeError("classifier_score: sample dim " + shape_str(samples.shape()) +
                         " does not match classifier input " +
                         std::to_string(classifier.input_size()));
    }
    return inception_score_from_probs(classifier_probs(classifier, samples));
}

NetworkParams train_classifier(const Dataset& dataset, std::uint64_t seed, std::size_t steps,
                               double learning_rate) {
    if (!dataset.labeled()) throw std::invalid_argument("train_classifier: dataset has no labels");
    MLPSpec spec;
    spec.layer_sizes = {dataset.dim(), 64, 64, dataset.n_classes};
    spec.hidden_activation = Activation::relu;
    spec.output_activation = Activation::identity;
    NetworkParams clf = init_params(Role::classifier, spec, seed);
    AdamState adam(learning_rate, 0.9, 0.999);
    Rng rng(seed ^ 0xc1a55ull);
    const std::size_t batch = 64;
    for (std::size_t step = 0; step < steps; ++step) {
        std::vector<std::size_t> labels;
        Tensor x = sample_rows(dataset.train, dataset.train_labels, batch, rng, labels);
        Tape tape;
        WatchedParams live = watch(tape, clf);
        Tensor loss = softmax_cross_entropy(mlp_forward(clf, live, x), labels);
        tape.backward(loss);
        adam.step(clf, live, step);
    }
    return clf;
}

double classifier_accuracy(const NetworkParams& classifier, const Tensor& data,
                           const std::vector<std::size_t>& labels) {
    Tensor probs = classifier_probs(classifier, data);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < probs.rows(); ++i) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < probs.cols(); ++j) {
            if (probs.at(i, j) > probs.at(i, best)) best = j;
        }
        if (best == labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(probs.rows());
}

ModeCoverage mode_coverage(const Tensor& samples, const GaussianMixtureSpec& mixture,
                           double sigma_radius) {
    if (samples.rank() != 2 || samples.cols() != 2 || samples.rows() == 0) {
        throw ShapeError("mode_coverage: expected a non-empty [n,2] sample matrix");
    }
    mixture.validate();
    const double r2 = sigma_radius * mixture.sigma * sigma_radius * mixture.sigma;
    const std::size_t n = samples.rows();
    std::vector<std::size_t> per_mode(mixture.means.size(), 0);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
        bool any = false;
        for (std::size_t k = 0; k < mixture.means.size(); ++k) {
            const double dx = samples.at(i, 0) - mixture.means[k][0];
            const double dy = samples.at(i, 1) - mixture.means[k][1];
            if (dx * dx + dy * dy <= r2) {
                ++per_mode[k];
                any = true;
            }
        }
        if (any) ++hits;
    }
    ModeCoverage cov;
    const double threshold = 0.01 * static_cast<double>(n);
    for (std::size_t c : per_mode) {
        if (static_cast<double>(c) >= threshold) ++cov.modes_covered;
    }
    cov.high_quality_fraction = static_cast<double>(hits) / static_cast<double>(n);
    return cov;
}

LatentStats stats_of_codes(const Tensor& codes) {
    if (codes.rank() != 2 || codes.rows() < 2) {
        throw ShapeError("stats_of_codes: need a [batch>=2, dim] tensor");
    }
    const std::size_t n = codes.rows(), d = codes.cols();
    LatentStats st;
    st.means.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) st.means[j] += codes.at(i, j);
    for (double& m : st.means) m /= static_cast<double>(n);
    st.covariance.assign(d, std::vector<double>(d, 0.0));
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a; b < d; ++b) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += (codes.at(i, a) - st.means[a]) * (codes.at(i, b) - st.means[b]);
            }
            acc /= static_cast<double>(n - 1);
            st.covariance[a][b] = acc;
            st.covariance[b][a] = acc;
        }
    }
    return st;
}

LatentStats latent_stats(const TrainedModel& model, const Tensor& data, Rng& rng) {
    return stats_of_codes(encode_with_model(model, data, rng));
}

CriticResult independent_critic_distance(const Tensor& samples, const Tensor& held_out,
                                         const CriticConfig& config) {
    if (samples.cols() != held_out.cols()) {
        throw ShapeError("independent_critic: dim mismatch " + shape_str(samples.shape()) +
                         " vs " + shape_str(held_out.shape()));
    }
    if (samples.rows() < 512 || held_out.rows() < 512) {
        throw DomainError("independent_critic: need at least 512 rows on each side");
    }
    const std::size_t n_data = held_out.rows() / 2;
    const std::size_t n_samp = samples.rows() / 2;
    Tensor data_train = narrow(held_out, 0, 0, n_data);
    Tensor data_test = narrow(held_out, 0, n_data, held_out.rows() - n_data);
    Tensor samp_train = narrow(samples, 0, 0, n_samp);
    Tensor samp_test = narrow(samples, 0, n_samp, samples.rows() - n_samp);

    MLPSpec spec;
    spec.layer_sizes.push_back(samples.cols());
    for (std::size_t h : config.hidden) spec.layer_sizes.push_back(h);
    spec.layer_sizes.push_back(1);
    spec.hidden_activation = Activation::leaky_relu;
    spec.output_activation = Activation::identity;
    NetworkParams critic = init_params(Role::critic, spec, config.seed);
    AdamState adam(config.learning_rate, config.adam_beta1, config.adam_beta2);
    Rng rng(config.seed ^ 0x1c7a5b9e2d4f6071ull);

    auto estimate = [&](const Tensor& data, const Tensor& samp) {
        const double fd = mean(mlp_forward(critic, data)).value();
        const double fs = mean(mlp_forward(critic, samp)).value();
        return fd - fs;
    };

    CriticResult result;
    for (std::size_t step = 0; step < config.steps; ++step) {
        Tensor real = sample_rows(data_train, config.batch_size, rng);
        Tensor fake = sample_rows(samp_train, config.batch_size, rng);
        Tape tape;
        WatchedParams live = watch(tape, critic);
        CriticFn fn = [&](const Tensor& in) { return mlp_forward(critic, live, in); };
        LossTerms lt = wgan_gp_critic_loss(fn, real, fake, config.gp_coeff, rng);
        if (!std::isfinite(lt.value())) throw NumericAbort("critic", step);
        tape.backward(lt.total);
        adam.step(critic, live, step);
        if ((step + 1) % config.eval_every == 0 || step + 1 == config.steps) {
            Tensor vd = sample_rows(data_train, config.batch_size, rng);
            Tensor vs = sample_rows(samp_train, config.batch_size, rng);
            result.valid_curve.emplace_back(step + 1, estimate(vd, vs));
            result.test_curve.emplace_back(step + 1, estimate(data_test, samp_test));
        }
    }
    result.neg_wasserstein = -estimate(data_test, samp_test);
    return result;
}

}  // namespace alphagan
