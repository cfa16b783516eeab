#include <doctest.h>

#include <cmath>

#include "alphagan/metrics.hpp"
#include "alphagan/ops.hpp"

using namespace alphagan;

namespace {

Tensor test_image(std::size_t side, std::uint64_t seed) {
    // structured content plus a little noise, pixels in [0,1]
    Rng rng(seed);
    std::vector<double> v(side * side);
    for (std::size_t r = 0; r < side; ++r) {
        for (std::size_t c = 0; c < side; ++c) {
            const double ramp = static_cast<double>(r + c) / (2.0 * static_cast<double>(side - 1));
            const double blob = (r > side / 3 && r < 2 * side / 3 && c > side / 4) ? 0.4 : 0.0;
            v[r * side + c] = std::clamp(0.5 * ramp + blob + 0.05 * rng.normal(), 0.0, 1.0);
        }
    }
    return Tensor({side, side}, std::move(v));
}

}  // namespace

TEST_CASE("ms_ssim: identity, constants, inversion, symmetry") {
    Tensor img = test_image(16, 1);
    CHECK(std::fabs(ms_ssim(img, img) - 1.0) <= 1e-9);

    Tensor flat = Tensor::full({16, 16}, 0.5);
    CHECK(std::fabs(ms_ssim(flat, flat) - 1.0) <= 1e-9);

    std::vector<double> inv(img.values());
    for (double& v : inv) v = 1.0 - v;
    Tensor inverted(img.shape(), inv);
    CHECK(ms_ssim(img, inverted) < 0.3);

    Tensor other = test_image(16, 2);
    CHECK(std::fabs(ms_ssim(img, other) - ms_ssim(other, img)) <= 1e-12);

    CHECK_THROWS_AS(ms_ssim(img, Tensor::full({32, 32}, 0.5)), ShapeError);
    CHECK_THROWS_AS(ms_ssim(Tensor::full({4, 4}, 0.5), Tensor::full({4, 4}, 0.5)), ShapeError);
}

TEST_CASE("ms_ssim scale count adapts to the image size") {
    // 16x16 supports exactly 2 dyadic scales; requesting 5 must not throw
    Tensor a = test_image(16, 3);
    Tensor b = test_image(16, 4);
    CHECK_NOTHROW(ms_ssim(a, b, 5));
    // 64x64 supports 4 scales
    Tensor big_a = test_image(64, 5);
    Tensor big_b = test_image(64, 6);
    const double v = ms_ssim(big_a, big_b, 5);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
}

TEST_CASE("sample diversity: identical set is 0, noise raises it") {
    const std::size_t side = 16;
    Tensor one = test_image(side, 7);
    std::vector<double> rows;
    for (int i = 0; i < 6; ++i) rows.insert(rows.end(), one.values().begin(), one.values().end());
    Tensor identical({6, side * side}, std::move(rows));
    CHECK(sample_diversity(identical, side, 15, 1) == doctest::Approx(0.0).epsilon(1e-9));

    // reference-vs-noisy property on the procedural shapes set
    Dataset shapes = procedural_shapes(4, 16, 64, 5);
    std::vector<double> unit(shapes.train.values());
    for (double& v : unit) v = std::clamp((v + 1.0) / 2.0, 0.0, 1.0);
    Tensor data(shapes.train.shape(), unit);
    Rng noise_rng(9);
    std::vector<double> noisy(unit);
    for (double& v : noisy) v = std::clamp(v + 0.1 * noise_rng.normal(), 0.0, 1.0);
    Tensor noisy_data(shapes.train.shape(), noisy);
    const double base = sample_diversity(data, 16, 300, 2);
    const double with_noise = sample_diversity(noisy_data, 16, 300, 2);
    CHECK(with_noise > base);

    CHECK_THROWS_AS(sample_diversity(identical, side, 16, 1), DomainError);  // > n(n-1)/2
}

TEST_CASE("classifier score: bounds and tabulated examples") {
    // uniform conditionals -> 1
    Tensor uniform = Tensor::full({5, 10}, 0.1);
    CHECK(inception_score_from_probs(uniform) == doctest::Approx(1.0).epsilon(1e-12));

    // one-hot, balanced classes, C = 10 -> 10
    std::vector<double> onehot(10 * 10, 0.0);
    for (std::size_t i = 0; i < 10; ++i) onehot[i * 10 + i] = 1.0;
    CHECK(inception_score_from_probs(Tensor({10, 10}, onehot)) ==
          doctest::Approx(10.0).epsilon(1e-9));

    // hand-evaluated small case
    Tensor pair = Tensor::matrix(2, 2, {0.9, 0.1, 0.1, 0.9});
    CHECK(inception_score_from_probs(pair) ==
          doctest::Approx(1.4449348111684153).epsilon(1e-9));

    // order invariance and bounds on random prob tables
    Rng rng(11);
    std::vector<double> raw(24 * 4);
    for (double& v : raw) v = rng.uniform(0.01, 1.0);
    for (std::size_t i = 0; i < 24; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < 4; ++j) s += raw[i * 4 + j];
        for (std::size_t j = 0; j < 4; ++j) raw[i * 4 + j] /= s;
    }
    Tensor probs({24, 4}, raw);
    const double score = inception_score_from_probs(probs);
    CHECK(score >= 1.0 - 1e-12);
    CHECK(score <= 4.0 + 1e-12);
    std::vector<double> reversed(24 * 4);
    for (std::size_t i = 0; i < 24; ++i) {
        for (std::size_t j = 0; j < 4; ++j) reversed[(23 - i) * 4 + j] = raw[i * 4 + j];
    }
    CHECK(inception_score_from_probs(Tensor({24, 4}, reversed)) ==
          doctest::Approx(score).epsilon(1e-12));
}

TEST_CASE("mode coverage: replicated means, collapse, chi-square fraction") {
    Dataset ring = ring_of_gaussians(8, 2.0, 0.02, 128, 1);
    // samples exactly at the means, replicated
    std::vector<double> rows;
    for (int rep = 0; rep < 4; ++rep) {
        for (const auto& m : ring.mixture.means) {
            rows.push_back(m[0]);
            rows.push_back(m[1]);
        }
    }
    ModeCoverage all = mode_coverage(Tensor({32, 2}, rows), ring.mixture);
    CHECK(all.modes_covered == 8);
    CHECK(all.high_quality_fraction == doctest::Approx(1.0));

    // total collapse to one mean
    std::vector<double> collapsed;
    for (int i = 0; i < 50; ++i) {
        collapsed.push_back(ring.mixture.means[0][0]);
        collapsed.push_back(ring.mixture.means[0][1]);
    }
    ModeCoverage one = mode_coverage(Tensor({50, 2}, collapsed), ring.mixture);
    CHECK(one.modes_covered == 1);
    CHECK(one.high_quality_fraction == doctest::Approx(1.0));

    // exact draws: fraction ~ P(chi^2_2 <= 9) = 1 - exp(-4.5)
    Rng rng(2);
    Tensor draws = sample_mixture(ring.mixture, 100000, rng);
    ModeCoverage mc = mode_coverage(draws, ring.mixture);
    CHECK(mc.modes_covered == 8);
    CHECK(std::fabs(mc.high_quality_fraction - 0.9888910034617577) < 0.005);

    // monotone: adding samples never decreases coverage
    Tensor half = narrow(draws, 0, 0, 50000);
    CHECK(mode_coverage(half, ring.mixture).modes_covered <= mc.modes_covered);
}

TEST_CASE("latent statistics") {
    Rng rng(3);
    // codes from the prior: means and off-diagonals near 0
    const std::size_t n = 20000, d = 6;
    Tensor codes = rng.normal_matrix(n, d);
    LatentStats st = stats_of_codes(codes);
    const double bound = 4.0 / std::sqrt(static_cast<double>(n));
    for (double m : st.means) CHECK(std::fabs(m) < bound);
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = 0; b < d; ++b) {
            CHECK(st.covariance[a][b] == st.covariance[b][a]);  // exact symmetry
            if (a != b) CHECK(std::fabs(st.covariance[a][b]) < bound);
        }
    }

    // duplicated single code -> all-zero covariance
    std::vector<double> dup = {1.0, -2.0, 0.5, 1.0, -2.0, 0.5};
    LatentStats zero = stats_of_codes(Tensor({2, 3}, dup));
    for (const auto& row : zero.covariance) {
        for (double v : row) CHECK(v == 0.0);
    }

    // affine transformed prior codes: covariance ~ A A^T
    Tensor a_mat = Tensor::matrix(2, 2, {1.0, 0.5, 0.0, 2.0});
    Tensor z = rng.normal_matrix(40000, 2);
    Tensor az = matmul(z, a_mat);  // rows z^T A -> cov = A^T A
    LatentStats affine = stats_of_codes(az);
    // A^T A = [[1, 0.5], [0.5, 4.25]]
    CHECK(std::fabs(affine.covariance[0][0] - 1.0) < 0.05);
    CHECK(std::fabs(affine.covariance[0][1] - 0.5) < 0.05);
    CHECK(std::fabs(affine.covariance[1][1] - 4.25) < 0.15);
}

TEST_CASE("independent critic separates far-apart distributions") {
    Rng rng(4);
    Tensor data = rng.normal_matrix(1024, 2, -5.0, 1.0);
    Tensor samples = rng.normal_matrix(1024, 2, 5.0, 1.0);
    CriticConfig cc;
    cc.steps = 600;
    cc.seed = 1;
    CriticResult res = independent_critic_distance(samples, data, cc);
    // mean separation 10 in x; a 1-Lipschitz surrogate recovers > 5
    CHECK(-res.neg_wasserstein > 5.0);
    CHECK_FALSE(res.valid_curve.empty());
    CHECK_FALSE(res.test_curve.empty());
}

TEST_CASE("independent critic null: same distribution scores near zero") {
    Rng rng(5);
    Tensor pool = rng.normal_matrix(16384, 2);
    Tensor data = narrow(pool, 0, 0, 8192);
    Tensor samples = narrow(pool, 0, 8192, 8192);
    CriticConfig cc;
    cc.steps = 1500;
    cc.seed = 2;
    CriticResult res = independent_critic_distance(samples, data, cc);
    CHECK(std::fabs(res.neg_wasserstein) < 0.05);
    CHECK_THROWS_AS(independent_critic_distance(narrow(pool, 0, 0, 100), data, cc), DomainError);
}

TEST_CASE("shapes classifier reaches the accuracy bar") {
    Dataset shapes = procedural_shapes(4, 16, 512, 11);
    NetworkParams clf = train_classifier(shapes, 3, 1500);
    CHECK(classifier_accuracy(clf, shapes.test, shapes.test_labels) >= 0.97);
    // classifier_score on real data: within bounds
    const double score = classifier_score(shapes.test, clf);
    CHECK(score >= 1.0);
    CHECK(score <= 4.0);
}
