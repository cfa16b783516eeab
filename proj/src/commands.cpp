#include "alphagan/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "alphagan/checkpoint.hpp"
#include "alphagan/gradcheck_suite.hpp"
#include "alphagan/image_io.hpp"
#include "alphagan/metrics.hpp"
#include "alphagan/ops.hpp"
#include "alphagan/run_config.hpp"

namespace fs = std::filesystem;

namespace alphagan {

namespace {

std::optional<std::uint64_t> env_seed() {
    const char* raw = std::getenv("ALPHAGAN_SEED");
    if (!raw || !*raw) return std::nullopt;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(raw, &end, 10);
    if (end == raw || *end != '\0') return std::nullopt;
    return static_cast<std::uint64_t>(v);
}

// flag > config file > ALPHAGAN_SEED > 0
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, bool file_has_seed,
                           std::uint64_t file_seed) {
    if (flag) return *flag;
    if (file_has_seed) return file_seed;
    if (auto env = env_seed()) return *env;
    return file_seed;
}

std::string csv_cell(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

void write_metric_row(std::ofstream& csv, const MetricRow& row) {
    csv << row.iter << ',' << csv_cell(row.wall_ms) << ',' << csv_cell(row.loss_total) << ','
        << csv_cell(row.loss_recon) << ',' << csv_cell(row.loss_adv) << ','
        << csv_cell(row.loss_kl) << ',' << csv_cell(row.disc_loss) << ','
        << csv_cell(row.code_disc_loss) << '\n';
}

void write_sample_artifact(const fs::path& dir, const TrainedModel& model, const Dataset& dataset,
                           std::uint64_t iter, std::uint64_t seed) {
    Rng rng(seed ^ 0x5a3c963dull);
    if (dataset.kind == DatasetKind::points2d) {
        Tensor pts = sample_from_model(model, 512, rng);
        write_points_csv((dir / ("samples_" + std::to_string(iter) + ".csv")).string(), pts);
    } else {
        Tensor imgs = sample_from_model(model, 64, rng);
        write_ppm_grid((dir / ("samples_" + std::to_string(iter) + ".ppm")).string(), imgs,
                       dataset.image_side, 8, 8);
    }
}

struct CheckpointRotation {
    std::deque<fs::path> kept;
    void add(const fs::path& p) {
        kept.push_back(p);
        while (kept.size() > 2) {
            std::error_code ec;
            fs::remove(kept.front(), ec);
            kept.pop_front();
        }
    }
};

Dataset dataset_from_override_or_config(const std::string& dataset_path, const RunConfig& rc) {
    if (dataset_path.empty()) return rc.dataset.build();
    std::ifstream in(dataset_path);
    if (!in) throw ConfigError("cannot open dataset file " + dataset_path);
    std::stringstream ss;
    ss << in.rdbuf();
    // the file holds a bare dataset object; reuse the config parser
    nlohmann::json wrapper;
    wrapper["algorithm"] = algorithm_name(rc.training.algorithm);
    wrapper["dataset"] = nlohmann::json::parse(ss.str());
    return parse_run_config(wrapper.dump()).dataset.build();
}

}  // namespace

int run_train(const TrainOptions& options, std::ostream& out, std::ostream& err) {
    RunConfig rc;
    Dataset dataset;
    try {
        rc = load_run_config(options.config_path);
        rc.training.seed = resolve_seed(options.seed, rc.seed_in_file, rc.training.seed);
        dataset = rc.dataset.build();
        fs::create_directories(options.out_dir);
    } catch (const std::exception& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    const fs::path dir(options.out_dir);
    std::ofstream csv(dir / "metrics.csv", std::ios::binary | std::ios::trunc);
    csv << "iter,wall_ms,loss_total,loss_recon,loss_adv,loss_kl,disc_loss,code_disc_loss\n";

    CheckpointRotation rotation;
    const auto start = std::chrono::steady_clock::now();
    TrainHooks hooks;
    hooks.on_metrics = [&](const MetricRow& row) { write_metric_row(csv, row); };
    hooks.on_checkpoint = [&](const TrainedModel& model, std::uint64_t iter) {
        const fs::path path = dir / ("checkpoint_" + std::to_string(iter) + ".agan");
        save_checkpoint(path.string(), model,
                        run_config_to_json(rc, iter, dataset.dim()));
        rotation.add(path);
        write_sample_artifact(dir, model, dataset, iter, rc.training.seed);
    };

    try {
        train(rc.training, dataset, hooks);
    } catch (const NumericAbort& e) {
        err << "numeric abort: " << e.what() << "\n";
        if (!rotation.kept.empty()) {
            err << "last good checkpoint: " << rotation.kept.back().string() << "\n";
        }
        return kExitNumeric;
    }
    const auto elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    out << "trained " << algorithm_name(rc.training.algorithm) << " for " << rc.training.max_iter
        << " iterations in " << elapsed.count() << " ms\n";
    out << "metrics: " << (dir / "metrics.csv").string() << "\n";
    return kExitOk;
}

int run_eval(const EvalOptions& options, std::ostream& out, std::ostream& err) {
    try {
        LoadedCheckpoint loaded = load_checkpoint(options.checkpoint_path);
        RunConfig rc = parse_checkpoint_config(loaded.config_json);
        loaded.model.config = rc.training;
        Dataset dataset = dataset_from_override_or_config(options.dataset_path, rc);
        fs::create_directories(options.out_dir);
        const fs::path dir(options.out_dir);
        const std::uint64_t seed = resolve_seed(options.seed, rc.seed_in_file, rc.training.seed);

        const std::set<std::string> known = {"all",           "neg_wasserstein", "diversity",
                                             "classifier_score", "mode_coverage", "latent_stats"};
        bool all = false;
        std::set<std::string> wanted;
        for (const std::string& m : options.metrics) {
            if (!known.count(m)) throw ConfigError("unknown metric \"" + m + "\"");
            if (m == "all") all = true;
            else wanted.insert(m);
        }
        const bool images = dataset.kind == DatasetKind::images;
        const bool has_mixture = dataset.has_mixture;
        const bool has_encoder = loaded.model.has_encoder();
        if (all) {
            wanted.insert("neg_wasserstein");
            if (images) wanted.insert("diversity");
            if (images && dataset.labeled()) wanted.insert("classifier_score");
            if (has_mixture) wanted.insert("mode_coverage");
            if (has_encoder) wanted.insert("latent_stats");
        }
        if (wanted.count("diversity") && !images) {
            throw ConfigError("metric diversity requires an image dataset");
        }
        if (wanted.count("classifier_score") && (!images || !dataset.labeled())) {
            throw ConfigError("metric classifier_score requires a labeled image dataset");
        }
        if (wanted.count("mode_coverage") && !has_mixture) {
            throw ConfigError("metric mode_coverage requires a Gaussian-mixture dataset");
        }
        if (wanted.count("latent_stats") && !has_encoder) {
            throw ConfigError("metric latent_stats requires a model with an encoder");
        }

        Rng rng(seed);
        Tensor samples = sample_from_model(loaded.model, options.sample_count, rng);

        MetricsReport report;
        report.iter = loaded.model.iterations;
        if (wanted.count("neg_wasserstein")) {
            CriticConfig cc;
            cc.seed = seed;
            if (options.critic_steps) cc.steps = *options.critic_steps;
            CriticResult cr = independent_critic_distance(samples, dataset.valid, cc);
            report.neg_wasserstein = cr.neg_wasserstein;
            std::ofstream vc(dir / "critic_valid_curve.csv", std::ios::binary | std::ios::trunc);
            vc << "step,estimate\n";
            for (const auto& [step, v] : cr.valid_curve) vc << step << ',' << format_double(v) << '\n';
            std::ofstream tc(dir / "critic_test_curve.csv", std::ios::binary | std::ios::trunc);
            tc << "step,estimate\n";
            for (const auto& [step, v] : cr.test_curve) tc << step << ',' << format_double(v) << '\n';
        }
        if (wanted.count("diversity")) {
            // MS-SSIM runs on [0,1] pixels
            std::vector<double> unit = samples.values();
            for (double& v : unit) v = std::clamp((v + 1.0) / 2.0, 0.0, 1.0);
            Tensor unit_samples(samples.shape(), std::move(unit));
            const std::size_t pairs =
                std::min<std::size_t>(2000, samples.rows() * (samples.rows() - 1) / 2);
            report.diversity = sample_diversity(unit_samples, dataset.image_side, pairs, seed);
        }
        if (wanted.count("classifier_score")) {
            NetworkParams clf = train_classifier(dataset, seed);
            const double acc = classifier_accuracy(clf, dataset.test, dataset.test_labels);
            out << "classifier test accuracy: " << format_double(acc) << "\n";
            report.classifier_score = classifier_score(samples, clf);
        }
        if (wanted.count("mode_coverage")) {
            ModeCoverage mc = mode_coverage(samples, dataset.mixture);
            report.modes_covered = mc.modes_covered;
            report.high_quality_fraction = mc.high_quality_fraction;
        }
        if (wanted.count("latent_stats")) {
            LatentStats st = latent_stats(loaded.model, dataset.test, rng);
            std::ofstream means(dir / "latent_means.csv", std::ios::binary | std::ios::trunc);
            for (std::size_t i = 0; i < st.means.size(); ++i) {
                means << (i ? "," : "") << format_double(st.means[i]);
            }
            means << '\n';
            std::ofstream cov(dir / "latent_covariance.csv", std::ios::binary | std::ios::trunc);
            for (const auto& covrow : st.covariance) {
                for (std::size_t i = 0; i < covrow.size(); ++i) {
                    cov << (i ? "," : "") << format_double(covrow[i]);
                }
                cov << '\n';
            }
            report.latent_means = st.means;
            report.latent_covariance = st.covariance;
        }

        std::ofstream csv(dir / "metrics_report.csv", std::ios::binary | std::ios::trunc);
        csv << "iter,neg_wasserstein,diversity,classifier_score,modes_covered,hq_fraction\n";
        csv << report.iter << ',' << csv_cell(report.neg_wasserstein) << ','
            << csv_cell(report.diversity) << ',' << csv_cell(report.classifier_score) << ',';
        if (report.modes_covered) csv << *report.modes_covered;
        csv << ',' << csv_cell(report.high_quality_fraction) << '\n';
        out << "report: " << (dir / "metrics_report.csv").string() << "\n";
        return kExitOk;
    } catch (const NumericAbort& e) {
        err << "numeric abort: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

int run_sample(const SampleOptions& options, std::ostream& out, std::ostream& err) {
    try {
        LoadedCheckpoint loaded = load_checkpoint(options.checkpoint_path);
        RunConfig rc = parse_checkpoint_config(loaded.config_json);
        loaded.model.config = rc.training;
        fs::create_directories(options.out_dir);
        const fs::path dir(options.out_dir);
        const std::uint64_t seed = resolve_seed(options.seed, rc.seed_in_file, rc.training.seed);
        Rng rng(seed);
        const bool images = rc.dataset.kind == "shapes" || rc.dataset.kind == "idx";

        if (options.reconstruction) {
            if (!loaded.model.has_encoder()) {
                err << "error: checkpoint has no encoder, reconstructions unavailable\n";
                return kExitConfig;
            }
            Dataset dataset = dataset_from_override_or_config(options.dataset_path, rc);
            const std::size_t n = options.grid_w * options.grid_h;
            if (dataset.test.rows() < n) throw ConfigError("dataset too small for the grid");
            Tensor inputs = narrow(dataset.test, 0, 0, n);
            Tensor recon = reconstruct_with_model(loaded.model, inputs, rng);
            if (images) {
                write_ppm_grid((dir / "recon_data.ppm").string(), inputs, dataset.image_side,
                               options.grid_w, options.grid_h);
                write_ppm_grid((dir / "recon_model.ppm").string(), recon, dataset.image_side,
                               options.grid_w, options.grid_h);
                out << "wrote " << (dir / "recon_data.ppm").string() << " and "
                    << (dir / "recon_model.ppm").string() << "\n";
            } else {
                std::ofstream csv(dir / "recon_pairs.csv", std::ios::binary | std::ios::trunc);
                csv << "x,y,recon_x,recon_y\n";
                for (std::size_t i = 0; i < n; ++i) {
                    csv << format_double(inputs.at(i, 0)) << ',' << format_double(inputs.at(i, 1))
                        << ',' << format_double(recon.at(i, 0)) << ','
                        << format_double(recon.at(i, 1)) << '\n';
                }
                out << "wrote " << (dir / "recon_pairs.csv").string() << "\n";
            }
            return kExitOk;
        }

        Tensor samples = sample_from_model(loaded.model, options.count, rng);
        if (images) {
            if (options.count < options.grid_w * options.grid_h) {
                throw ConfigError("--n must cover the grid");
            }
            const std::size_t side = static_cast<std::size_t>(
                std::lround(std::sqrt(static_cast<double>(samples.cols()))));
            write_ppm_grid((dir / "samples.ppm").string(), samples, side, options.grid_w,
                           options.grid_h);
            out << "wrote " << (dir / "samples.ppm").string() << "\n";
        } else {
            write_points_csv((dir / "samples.csv").string(), samples);
            out << "wrote " << (dir / "samples.csv").string() << "\n";
        }
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

int run_gradcheck(bool inject_fault, std::ostream& out) {
    const std::vector<GradCheckResult> results = run_gradcheck_suite(42, 100, inject_fault);
    bool ok = true;
    for (const GradCheckResult& r : results) {
        out << (r.passed() ? "PASS" : "FAIL") << "  " << r.name << "  max_rel_err="
            << format_double(r.max_rel_err) << "  threshold=" << format_double(r.threshold)
            << "\n";
        ok = ok && r.passed();
    }
    out << (ok ? "all gradient checks passed" : "gradient checks FAILED") << "\n";
    return ok ? kExitOk : kExitConfig;
}

}  // namespace alphagan
