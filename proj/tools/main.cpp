#include <CLI11.hpp>

#include "alphagan/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"alpha-GAN training laboratory"};
    app.require_subcommand(1);

    alphagan::TrainOptions train_opts;
    std::uint64_t train_seed = 0;
    CLI::App* train = app.add_subcommand("train", "train a model from a JSON config");
    train->add_option("config", train_opts.config_path, "path to the run config JSON")->required();
    train->add_option("--out", train_opts.out_dir, "output directory");
    CLI::Option* train_seed_opt = train->add_option("--seed", train_seed, "seed override");

    alphagan::EvalOptions eval_opts;
    std::uint64_t eval_seed = 0;
    CLI::App* eval = app.add_subcommand("eval", "run the metric battery on a checkpoint");
    eval->add_option("checkpoint", eval_opts.checkpoint_path, "checkpoint file")->required();
    eval->add_option("--dataset", eval_opts.dataset_path, "dataset spec JSON (defaults to the checkpoint's)");
    eval->add_option("--metrics", eval_opts.metrics,
                     "metrics to compute: all, neg_wasserstein, diversity, classifier_score, "
                     "mode_coverage, latent_stats")
        ->delimiter(',');
    eval->add_option("--out", eval_opts.out_dir, "output directory");
    eval->add_option("--n", eval_opts.sample_count, "number of generator samples");
    std::size_t critic_steps = 0;
    CLI::Option* critic_opt = eval->add_option("--critic-steps", critic_steps,
                                               "training steps for the independent critic");
    CLI::Option* eval_seed_opt = eval->add_option("--seed", eval_seed, "seed override");

    alphagan::SampleOptions sample_opts;
    std::uint64_t sample_seed = 0;
    std::string grid = "8x8";
    CLI::App* sample = app.add_subcommand("sample", "emit sample or reconstruction artifacts");
    sample->add_option("checkpoint", sample_opts.checkpoint_path, "checkpoint file")->required();
    sample->add_option("--n", sample_opts.count, "number of samples");
    sample->add_option("--grid", grid, "grid layout WxH (default 8x8)");
    sample->add_flag("--recon", sample_opts.reconstruction, "emit paired data|reconstruction grids");
    sample->add_option("--dataset", sample_opts.dataset_path, "dataset spec JSON for --recon");
    sample->add_option("--out", sample_opts.out_dir, "output directory");
    CLI::Option* sample_seed_opt = sample->add_option("--seed", sample_seed, "seed override");

    bool inject_fault = false;
    CLI::App* gradcheck = app.add_subcommand("gradcheck", "run the gradient-check suite");
    gradcheck->add_flag("--inject-fault", inject_fault,
                        "add a deliberately wrong gradient (test fixture)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : alphagan::kExitConfig;
    }

    if (train->parsed()) {
        if (*train_seed_opt) train_opts.seed = train_seed;
        return alphagan::run_train(train_opts);
    }
    if (eval->parsed()) {
        if (*eval_seed_opt) eval_opts.seed = eval_seed;
        if (*critic_opt) eval_opts.critic_steps = critic_steps;
        return alphagan::run_eval(eval_opts);
    }
    if (sample->parsed()) {
        if (*sample_seed_opt) sample_opts.seed = sample_seed;
        std::size_t w = 0, h = 0;
        if (std::sscanf(grid.c_str(), "%zux%zu", &w, &h) != 2 || w == 0 || h == 0) {
            std::cerr << "error: --grid must look like 8x8\n";
            return alphagan::kExitConfig;
        }
        sample_opts.grid_w = w;
        sample_opts.grid_h = h;
        return alphagan::run_sample(sample_opts);
    }
    return alphagan::run_gradcheck(inject_fault);
}
