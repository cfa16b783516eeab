#include <doctest.h>

#include <cmath>
#include <cstring>
#include <functional>

#include "alphagan/ops.hpp"
#include "alphagan/trainers.hpp"

using namespace alphagan;

namespace {

std::size_t hash_params(const NetworkParams& p) {
    std::size_t h = 1469598103934665603ull;
    auto mix = [&](const Tensor& t) {
        for (double v : t.values()) {
            std::uint64_t bits;
            std::memcpy(&bits, &v, 8);
            h = (h ^ bits) * 1099511628211ull;
        }
    };
    for (const Tensor& w : p.weights) mix(w);
    for (const Tensor& b : p.biases) mix(b);
    return h;
}

std::vector<std::size_t> hash_all(const TrainedModel& m) {
    std::vector<std::size_t> hs;
    for (const auto& [name, p] : m.networks) hs.push_back(hash_params(p));
    return hs;
}

Dataset tiny_ring() { return ring_of_gaussians(8, 2.0, 0.02, 512, 3); }

TrainingConfig quick(Algorithm a) {
    TrainingConfig c = TrainingConfig::defaults_for(a);
    c.batch_size = 16;
    c.hidden = {16, 16};
    c.code_disc_hidden = {16, 16, 16};
    c.latent_dim = 4;
    c.max_iter = 3;
    c.eval_every = 1;
    return c;
}

}  // namespace

TEST_CASE("adam: bias-corrected first step and zero-grad behavior") {
    MLPSpec spec;
    spec.layer_sizes = {1, 1};
    NetworkParams p = init_params(Role::generator, spec, 0);
    p.weights[0] = Tensor::matrix(1, 1, {0.5});
    AdamState adam(0.001, 0.5, 0.9, 1e-8);

    Tape tape;
    WatchedParams live = watch(tape, p);
    // loss = w * 1 + b -> dw = 1, db = 1
    Tensor loss = sum(bias_add(matmul(Tensor::matrix(1, 1, {1.0}), live.weights[0]), live.biases[0]));
    tape.backward(loss);
    adam.step(p, live, 0);
    CHECK(p.weights[0].value() == doctest::Approx(0.5 - 0.0009999999900000003).epsilon(1e-12));
    CHECK(p.biases[0].value() == doctest::Approx(-0.0009999999900000003).epsilon(1e-12));

    // zero gradient on fresh state leaves parameters unchanged
    AdamState fresh(0.001, 0.5, 0.9, 1e-8);
    const double before = p.weights[0].value();
    Tape tape2;
    WatchedParams live2 = watch(tape2, p);
    Tensor loss2 = sum(mul(live2.weights[0], Tensor::zeros({1, 1})));
    tape2.backward(loss2);
    fresh.step(p, live2, 1);
    CHECK(p.weights[0].value() == before);
}

TEST_CASE("adam aborts on non-finite gradients with a named network") {
    MLPSpec spec;
    spec.layer_sizes = {1, 1};
    NetworkParams p = init_params(Role::discriminator, spec, 0);
    AdamState adam(0.001);
    Tape tape;
    WatchedParams live = watch(tape, p);
    Tensor loss = sum(mul(live.weights[0], Tensor::matrix(1, 1, {1e308})));
    Tensor scaled = scalar_mul(loss, 1e10);  // gradient 1e318 overflows
    tape.backward(scaled);
    CHECK_THROWS_WITH_AS(adam.step(p, live, 17), doctest::Contains("discriminator"),
                         NumericAbort);
    try {
        Tape t2;
        WatchedParams l2 = watch(t2, p);
        Tensor bad = scalar_mul(sum(mul(l2.weights[0], Tensor::matrix(1, 1, {1e308}))), 1e10);
        t2.backward(bad);
        adam.step(p, l2, 17);
    } catch (const NumericAbort& e) {
        CHECK(e.iteration == 17);
    }
}

TEST_CASE("alpha-GAN sub-updates touch exactly their own network") {
    Dataset ds = tiny_ring();
    TrainingConfig cfg = quick(Algorithm::alpha_gan);
    AlphaGanTrainer tr(cfg, ds);

    auto names = std::vector<std::string>{"generator", "encoder", "discriminator",
                                          "code_discriminator"};
    auto run_and_diff = [&](std::function<void()> update) {
        std::vector<std::size_t> before = hash_all(tr.model());
        update();
        std::vector<std::size_t> after = hash_all(tr.model());
        std::vector<std::string> changed;
        for (std::size_t i = 0; i < before.size(); ++i) {
            if (before[i] != after[i]) changed.push_back(tr.model().networks[i].first);
        }
        return changed;
    };

    CHECK(run_and_diff([&] { tr.update_encoder(); }) == std::vector<std::string>{"encoder"});
    CHECK(run_and_diff([&] { tr.update_generator(); }) == std::vector<std::string>{"generator"});
    CHECK(run_and_diff([&] { tr.update_discriminator(); }) ==
          std::vector<std::string>{"discriminator"});
    CHECK(run_and_diff([&] { tr.update_code_discriminator(); }) ==
          std::vector<std::string>{"code_discriminator"});
}

TEST_CASE("alpha-GAN iteration replays the documented schedule") {
    Dataset ds = tiny_ring();
    TrainingConfig cfg = quick(Algorithm::alpha_gan);
    AlphaGanTrainer composed(cfg, ds);
    composed.iteration();
    // manual replay in the documented order: encoder x2, generator x2,
    // discriminator x1, code discriminator x1
    AlphaGanTrainer manual(cfg, ds);
    manual.update_encoder();
    manual.update_encoder();
    manual.update_generator();
    manual.update_generator();
    manual.update_discriminator();
    manual.update_code_discriminator();
    CHECK(hash_all(composed.model()) == hash_all(manual.model()));
}

TEST_CASE("wgan-gp iteration mutates critic five times, generator once") {
    Dataset ds = tiny_ring();
    TrainingConfig cfg = quick(Algorithm::wgan_gp);
    REQUIRE(cfg.discriminator_steps == 5);
    REQUIRE(cfg.generator_steps == 1);
    WganGpTrainer composed(cfg, ds);
    composed.iteration();
    WganGpTrainer manual(cfg, ds);
    for (int i = 0; i < 5; ++i) manual.update_critic();
    manual.update_generator();
    CHECK(hash_all(composed.model()) == hash_all(manual.model()));
    // and each critic update touches only the critic
    WganGpTrainer probe(cfg, ds);
    std::vector<std::size_t> before = hash_all(probe.model());
    probe.update_critic();
    std::vector<std::size_t> after = hash_all(probe.model());
    for (std::size_t i = 0; i < before.size(); ++i) {
        const bool is_critic = probe.model().networks[i].first == "critic";
        CHECK((before[i] != after[i]) == is_critic);
    }
}

TEST_CASE("training runs are bit-deterministic") {
    Dataset ds = tiny_ring();
    for (Algorithm a : {Algorithm::alpha_gan, Algorithm::gan, Algorithm::wgan_gp, Algorithm::age,
                        Algorithm::vae}) {
        TrainingConfig cfg = quick(a);
        TrainedModel m1 = train(cfg, ds);
        TrainedModel m2 = train(cfg, ds);
        CHECK(hash_all(m1) == hash_all(m2));
    }
}

TEST_CASE("zero learning rates leave parameters bit-identical") {
    Dataset ds = tiny_ring();
    TrainingConfig cfg = quick(Algorithm::alpha_gan);
    cfg.learning_rates = {0.0, 0.0, 0.0, 0.0};
    cfg.max_iter = 2;
    TrainedModel before = init_model(cfg, ds);
    TrainedModel after = train(cfg, ds);
    CHECK(hash_all(before) == hash_all(after));
}

TEST_CASE("zero iterations return the initialized parameters") {
    Dataset ds = tiny_ring();
    TrainingConfig cfg = quick(Algorithm::gan);
    cfg.max_iter = 0;
    TrainedModel trained = train_gan(cfg, ds);
    CHECK(hash_all(trained) == hash_all(init_model(cfg, ds)));
    CHECK(trained.networks.size() == 2);
}

TEST_CASE("network sets match the algorithm") {
    Dataset ds = tiny_ring();
    auto count = [&](Algorithm a) { return init_model(quick(a), ds).networks.size(); };
    CHECK(count(Algorithm::alpha_gan) == 4);
    CHECK(count(Algorithm::gan) == 2);
    CHECK(count(Algorithm::wgan_gp) == 2);
    CHECK(count(Algorithm::age) == 2);
    CHECK(count(Algorithm::vae) == 2);
}

TEST_CASE("metric rows carry the per-algorithm loss components") {
    Dataset ds = tiny_ring();
    {
        AlphaGanTrainer tr(quick(Algorithm::alpha_gan), ds);
        MetricRow row = tr.metrics_row();
        CHECK(row.loss_total.has_value());
        CHECK(row.loss_recon.has_value());
        CHECK(row.loss_adv.has_value());
        CHECK(row.loss_kl.has_value());
        CHECK(row.disc_loss.has_value());
        CHECK(row.code_disc_loss.has_value());
        CHECK_FALSE(row.wall_ms.has_value());
    }
    {
        GanTrainer tr(quick(Algorithm::gan), ds);
        MetricRow row = tr.metrics_row();
        CHECK(row.loss_total.has_value());
        CHECK(row.disc_loss.has_value());
        CHECK_FALSE(row.loss_recon.has_value());
        CHECK_FALSE(row.code_disc_loss.has_value());
    }
    {
        VaeTrainer tr(quick(Algorithm::vae), ds);
        MetricRow row = tr.metrics_row();
        CHECK(row.loss_total.has_value());
        CHECK(row.loss_recon.has_value());
        CHECK(row.loss_kl.has_value());
        CHECK_FALSE(row.loss_adv.has_value());
    }
}

TEST_CASE("numeric abort propagates from poisoned parameters") {
    Dataset ds = tiny_ring();
    TrainingConfig cfg = quick(Algorithm::alpha_gan);
    TrainedModel start = init_model(cfg, ds);
    NetworkParams* gen = start.find("generator");
    gen->weights.back() = Tensor::full(gen->weights.back().shape(), 1e308);
    AlphaGanTrainer tr(cfg, ds, &start);
    CHECK_THROWS_AS(tr.update_generator(), NumericAbort);
}

TEST_CASE("age trainer uses the unit-ball prior and runs") {
    Dataset ds = tiny_ring();
    TrainingConfig cfg = quick(Algorithm::age);
    cfg.max_iter = 2;
    TrainedModel m = train_age(cfg, ds);
    CHECK(m.has_encoder());
    Rng rng(1);
    Tensor z = sample_unit_ball_prior(128, cfg.latent_dim, rng);
    for (std::size_t i = 0; i < z.rows(); ++i) {
        double norm = 0.0;
        for (std::size_t j = 0; j < z.cols(); ++j) norm += z.at(i, j) * z.at(i, j);
        CHECK(std::sqrt(norm) <= 1.0 + 1e-12);
    }
}

TEST_CASE("vae negative ELBO mostly decreases early") {
    Dataset ds = ring_of_gaussians(8, 2.0, 0.02, 2048, 3);
    TrainingConfig cfg = TrainingConfig::defaults_for(Algorithm::vae);
    cfg.seed = 1;
    VaeTrainer tr(cfg, ds);
    Tensor probe = narrow(ds.valid, 0, 0, 256);
    double prev = tr.negative_elbo(probe);
    int violations = 0;
    for (int i = 0; i < 50; ++i) {
        tr.iteration();
        const double cur = tr.negative_elbo(probe);
        if (cur > prev) ++violations;
        prev = cur;
    }
    CHECK(violations <= 5);
}

TEST_CASE("run() emits metric rows at iteration zero and every eval point") {
    Dataset ds = tiny_ring();
    TrainingConfig cfg = quick(Algorithm::gan);
    cfg.max_iter = 6;
    cfg.eval_every = 2;
    std::vector<std::uint64_t> iters;
    TrainHooks hooks;
    hooks.on_metrics = [&](const MetricRow& row) { iters.push_back(row.iter); };
    train(cfg, ds, hooks);
    CHECK(iters == std::vector<std::uint64_t>{0, 2, 4, 6});
}
