// Command-line front end: train, eval, bloch-export, noise-check.
//
// Exit codes: 0 success, 1 noise-check verdict "not equivalent",
// 2 configuration error, 3 data error, 4 runtime abort.

#include <CLI11.hpp>

#include <iostream>

#include "dqn/commands.hpp"
#include "dqn/error.hpp"

namespace {

struct Options {
    std::string config;
    std::vector<std::string> checkpoints;
    std::string out_dir = "out";
    std::vector<double> ct;
    std::string split = "test";
    bool dump = false;
    std::string reference = "analytic";
    double tau1 = 1e-3;
    std::string tau2 = "10%";
    std::optional<std::size_t> samples;
    dqn::ConfigOverrides overrides;
};

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--config", o.config, "run configuration file (key = value)")->required();
    cmd->add_option("--out-dir", o.out_dir, "directory for outputs")->capture_default_str();
    cmd->add_option("--dataset-dir", o.overrides.dataset_dir, "directory holding the dataset files");
    cmd->add_option("--seed", o.overrides.seed, "master seed (initialisation, split and sampling)");
    cmd->add_option("--backend", o.overrides.backend, "analytic | statevector | shots | noisy");
    cmd->add_option("--shots", o.overrides.shots, "shots per probability estimate for sampled backends");
    cmd->add_option("--set", o.overrides.assignments, "override a configuration key (key=value), repeatable");
}

int run(int argc, char** argv) {
    CLI::App app{"Dressed quantum network classifier: training, evaluation, Bloch-sphere export and noise checks"};
    app.require_subcommand(1);
    Options o;

    auto* train = app.add_subcommand("train", "train a model from a run configuration");
    add_common(train, o);

    auto* eval = app.add_subcommand("eval", "accuracy of a checkpoint at one or more c_t values");
    add_common(eval, o);
    eval->add_option("--checkpoint", o.checkpoints, "checkpoint to evaluate")->required()->expected(1);
    eval->add_option("--ct", o.ct, "classification threshold c_t, repeatable (default 0.5)");
    eval->add_option("--split", o.split, "train | test")->capture_default_str();
    eval->add_flag("--dump-probabilities", o.dump, "write per-sample probability vectors");

    auto* bloch = app.add_subcommand("bloch-export", "Bloch-sphere trajectories of single-qubit checkpoints");
    add_common(bloch, o);
    bloch->add_option("--checkpoint", o.checkpoints, "checkpoint(s), repeatable")->required();
    bloch->add_option("--split", o.split, "train | test")->capture_default_str();

    auto* noise = app.add_subcommand("noise-check", "Hellinger equivalence of two execution backends");
    add_common(noise, o);
    noise->add_option("--checkpoint", o.checkpoints, "checkpoint to run")->required()->expected(1);
    noise->add_option("--reference", o.reference, "reference backend")->capture_default_str();
    noise->add_option("--tau1", o.tau1, "maximum Hellinger distance per sample")->capture_default_str();
    noise->add_option("--tau2", o.tau2, "minimum compared samples: count or percentage of training set")
        ->capture_default_str();
    noise->add_option("--samples", o.samples, "number of random training samples to compare (default: all)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    // --backend selects the training backend for `train`, and the evaluated
    // backend for the other commands (which otherwise run analytically).
    std::optional<dqn::BackendMode> eval_mode;
    if (!train->parsed() && o.overrides.backend) {
        eval_mode = dqn::parse_backend_mode(*o.overrides.backend);
        o.overrides.backend.reset();
    }
    const dqn::RunConfig config = dqn::resolve_config(o.config, o.overrides);

    if (train->parsed()) {
        const auto outcome = dqn::cmd_train(config, o.out_dir, std::cout);
        return outcome.result.abort_reason ? 4 : 0;
    }
    if (eval->parsed()) {
        if (o.ct.empty()) o.ct.push_back(dqn::kDefaultThreshold);
        dqn::cmd_eval(config, o.checkpoints.front(), dqn::parse_split_choice(o.split), o.ct,
                      dqn::evaluation_backend(config, eval_mode), o.out_dir, o.dump, std::cout);
        return 0;
    }
    if (bloch->parsed()) {
        std::vector<std::filesystem::path> paths(o.checkpoints.begin(), o.checkpoints.end());
        dqn::cmd_bloch_export(config, paths, dqn::parse_split_choice(o.split), o.out_dir, std::cout);
        return 0;
    }
    dqn::NoiseCheckOptions nc;
    nc.reference = dqn::evaluation_backend(config, dqn::parse_backend_mode(o.reference));
    nc.candidate = dqn::evaluation_backend(config, eval_mode.value_or(dqn::BackendMode::noisy));
    nc.tau1 = o.tau1;
    nc.tau2 = o.tau2;
    nc.sample_count = o.samples;
    nc.sample_seed = config.seed;
    const auto outcome = dqn::cmd_noise_check(config, o.checkpoints.front(), nc, o.out_dir, std::cout);
    return outcome.report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const dqn::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const dqn::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "aborted: " << e.what() << "\n";
        return 4;
    }
}
