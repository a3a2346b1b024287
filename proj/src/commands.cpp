#include "dqn/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>

#include <json.hpp>

#include "dqn/error.hpp"
#include "dqn/rng.hpp"
#include "dqn/svg.hpp"

namespace dqn {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Shortest representation that parses back to the same double.
std::string exact(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw RuntimeAbort("cannot create output directory " + dir.string() + ": " + ec.message());
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw RuntimeAbort("cannot write " + path.string());
    return out;
}

void write_json(const fs::path& path, const json& j) {
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

json noise_json(const NoiseModel& n) {
    return {{"depol_per_gate", n.depol_per_gate},
            {"amp_damp_gamma", n.amp_damp_gamma},
            {"phase_damp_lambda", n.phase_damp_lambda},
            {"readout_eps0", n.readout_eps0},
            {"readout_eps1", n.readout_eps1}};
}

json backend_json(const ExecutionBackend& b) {
    json j{{"mode", to_string(b.mode)}};
    if (b.is_sampled()) {
        j["shots"] = b.shots;
        j["rng_seed"] = b.rng_seed;
    }
    if (b.noise) j["noise"] = noise_json(*b.noise);
    return j;
}

json artifact_json() {
    return {{"name", kArtifactName},
            {"version", kArtifactVersion},
            {"checkpoint_format", kCheckpointVersion},
            {"compiler", __VERSION__},
            {"cxx_standard", __cplusplus}};
}

json config_json(const RunConfig& config) {
    json j = json::object();
    for (const auto& [k, v] : to_document(config)) j[k] = v;
    return j;
}

const Dataset& pick(const PreparedData& data, SplitChoice split) {
    return split == SplitChoice::train ? data.train : data.test;
}

std::string split_name(SplitChoice s) { return s == SplitChoice::train ? "train" : "test"; }

}  // namespace

RunConfig resolve_config(const fs::path& config_path, const ConfigOverrides& o) {
    ConfigDocument doc = read_config_document(config_path);
    for (const auto& a : o.assignments) apply_override(doc, a);
    if (o.dataset_dir) doc["dataset_dir"] = o.dataset_dir->string();
    if (o.seed) {
        // A new seed re-derives every stream unless the file pins them separately.
        doc["seed"] = std::to_string(*o.seed);
    }
    if (o.backend) doc["backend"] = *o.backend;
    if (o.shots) doc["shots"] = std::to_string(*o.shots);
    return build_run_config(doc);
}

ExecutionBackend evaluation_backend(const RunConfig& config, std::optional<BackendMode> mode) {
    RunConfig c = config;
    c.backend = mode.value_or(BackendMode::analytic);
    return c.execution_backend();
}

Checkpoint load_matching_checkpoint(const fs::path& path, const Dataset& data) {
    Checkpoint c = load_checkpoint(path);
    if (c.model.input_dim() != data.input_dim) {
        throw DataError(path.string() + ": model expects d=" + std::to_string(c.model.input_dim()) + ", dataset '" +
                        data.name + "' has d=" + std::to_string(data.input_dim));
    }
    const std::size_t expected = c.model.n_qubits() == 1 ? 2 : c.model.n_qubits();
    if (expected != data.n_classes) {
        throw DataError(path.string() + ": model has " + std::to_string(c.model.n_qubits()) + " qubit(s), dataset '" +
                        data.name + "' has " + std::to_string(data.n_classes) + " classes");
    }
    return c;
}

// --- train -------------------------------------------------------------------------

TrainOutcome cmd_train(const RunConfig& config, const fs::path& out_dir, std::ostream& log) {
    const auto started = std::chrono::steady_clock::now();
    const std::string started_utc = utc_now();
    ensure_dir(out_dir);

    const PreparedData data = prepare_data(config);
    const std::size_t n_qubits = config.n_qubits(data.train.n_classes);
    const DressedModel initial =
        init_model(data.train.input_dim, n_qubits, config.seed, config.init_weight_scale, config.init_su2_scale);
    const TrainConfig train_config = config.train_config();

    {
        auto cfg = open_out(out_dir / "config.cfg");
        cfg << "# resolved configuration\n" << format_document(to_document(config));
    }

    TrainOutcome outcome;
    outcome.metrics_csv = out_dir / "metrics.csv";
    auto metrics = open_out(outcome.metrics_csv);
    auto timings = open_out(out_dir / "timings.csv");
    metrics << "epoch,loss,train_accuracy\n";
    timings << "epoch,wall_time_ms\n";
    metrics.flush();

    const std::set<std::size_t> snapshot_epochs(config.snapshot_epochs.begin(), config.snapshot_epochs.end());
    log << "training " << data.train.name << ": " << data.train.size() << " train / " << data.test.size()
        << " test samples, N=" << n_qubits << ", d=" << data.train.input_dim << ", "
        << initial.parameter_count() << " parameters, " << config.epochs << " epochs, backend "
        << to_string(config.backend) << "\n";

    const std::size_t report_every = std::max<std::size_t>(1, config.epochs / 10);
    const auto on_epoch = [&](const EpochRecord& rec, const DressedModel& model, const OptimizerState& opt) {
        metrics << rec.epoch << "," << exact(rec.loss) << "," << exact(rec.train_accuracy) << "\n";
        metrics.flush();
        timings << rec.epoch << "," << rec.wall_time_ms << "\n";
        if (snapshot_epochs.count(rec.epoch)) {
            const fs::path p = out_dir / ("checkpoint_epoch_" + std::to_string(rec.epoch) + ".dqn");
            save_checkpoint({model, opt, rec.epoch, data.scaler, data.train.name}, p);
            outcome.snapshots.push_back(p);
        }
        if (rec.epoch % report_every == 0 || rec.epoch == 1) {
            log << "  epoch " << rec.epoch << "  loss " << rec.loss << "  train acc " << rec.train_accuracy << "\n";
        }
    };

    outcome.result = train(initial, data.train, train_config, on_epoch);
    const TrainResult& r = outcome.result;

    outcome.final_checkpoint = out_dir / "checkpoint_final.dqn";
    save_checkpoint({r.model, r.optimizer, r.history.epochs.size(), data.scaler, data.train.name},
                    outcome.final_checkpoint);

    const auto test_out = forward_all(r.model, data.test, ExecutionBackend::analytic());
    outcome.test_accuracy = accuracy_at(test_out, data.test.labels, config.threshold);

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    json manifest{
        {"command", "train"},
        {"artifact", artifact_json()},
        {"config", config_json(config)},
        {"seeds", {{"init", config.seed}, {"split", config.split_seed}, {"stream", config.stream_seed}}},
        {"dataset",
         {{"name", data.train.name},
          {"class_names", data.train.class_names},
          {"input_dim", data.train.input_dim},
          {"train_size", data.train.size()},
          {"test_size", data.test.size()},
          {"train_class_counts", data.train.class_counts()},
          {"test_class_counts", data.test.class_counts()},
          {"normalization", to_string(data.scaler.method)}}},
        {"model", {{"n_qubits", n_qubits}, {"parameter_count", initial.parameter_count()}}},
        {"training",
         {{"backend", backend_json(train_config.backend)},
          {"gradient", "forward difference, fd_step " + exact(config.fd_step)},
          {"optimizer", to_string(config.optimizer)},
          {"learning_rate", config.hyper.learning_rate},
          {"loss", to_string(config.loss)},
          {"epochs_requested", config.epochs},
          {"epochs_completed", r.history.epochs.size()},
          {"loss_evaluations", r.history.loss_evaluations},
          {"final_loss", r.history.final_loss},
          {"final_train_accuracy", r.history.final_train_accuracy},
          {"aborted", r.abort_reason.has_value()},
          {"abort_reason", r.abort_reason.value_or("")}}},
        {"evaluation",
         {{"backend", backend_json(ExecutionBackend::analytic())},
          {"threshold", config.threshold},
          {"test_accuracy", outcome.test_accuracy}}},
        {"outputs",
         {{"metrics", "metrics.csv"},
          {"timings", "timings.csv"},
          {"config", "config.cfg"},
          {"final_checkpoint", outcome.final_checkpoint.filename().string()}}},
        {"timing", {{"started_utc", started_utc}, {"finished_utc", utc_now()}, {"wall_seconds", wall}}},
    };
    json snaps = json::array();
    for (const auto& p : outcome.snapshots) snaps.push_back(p.filename().string());
    manifest["outputs"]["snapshots"] = snaps;
    outcome.manifest = out_dir / "manifest.json";
    write_json(outcome.manifest, manifest);

    log << "final train loss " << r.history.final_loss << ", train accuracy " << r.history.final_train_accuracy
        << ", test accuracy " << outcome.test_accuracy << " (c_t=" << config.threshold << ")\n";
    if (r.abort_reason) log << "training aborted: " << *r.abort_reason << "\n";
    return outcome;
}

// --- eval --------------------------------------------------------------------------

SplitChoice parse_split_choice(std::string_view s) {
    if (s == "train") return SplitChoice::train;
    if (s == "test") return SplitChoice::test;
    throw ConfigError("unknown split '" + std::string(s) + "' (expected train or test)");
}

EvalReport cmd_eval(const RunConfig& config, const fs::path& checkpoint, SplitChoice split,
                    const std::vector<double>& thresholds, const ExecutionBackend& backend, const fs::path& out_dir,
                    bool dump_probabilities, std::ostream& log) {
    for (double t : thresholds) {
        if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("c_t values must lie in [0, 1], got " + exact(t));
    }
    backend.validate();
    ensure_dir(out_dir);

    const Checkpoint probe = load_checkpoint(checkpoint);
    const PreparedData data = prepare_data(config, probe.scaler);
    const Dataset& set = pick(data, split);
    const Checkpoint ckpt = load_matching_checkpoint(checkpoint, set);
    const auto outputs = forward_all(ckpt.model, set, backend);

    EvalReport report{split_name(split), set.size(), thresholds, {}, to_string(backend.mode)};
    auto table = open_out(out_dir / "accuracy.csv");
    table << "ct,accuracy\n";
    log << "c_t    accuracy  (" << report.split << ", " << set.size() << " samples, " << report.backend << ")\n";
    for (double t : thresholds) {
        const double acc = accuracy_at(outputs, set.labels, t);
        report.accuracies.push_back(acc);
        table << exact(t) << "," << exact(acc) << "\n";
        char line[64];
        std::snprintf(line, sizeof line, "%-6.3g %.4f\n", t, acc);
        log << line;
    }

    if (dump_probabilities) {
        auto dump = open_out(out_dir / "probabilities.csv");
        dump << "sample_id,label";
        for (std::size_t j = 0; j < ckpt.model.n_qubits(); ++j) dump << ",p" << j;
        dump << "\n";
        for (std::size_t i = 0; i < set.size(); ++i) {
            dump << set.ids[i] << "," << set.labels[i];
            for (double p : outputs[i].probs) dump << "," << exact(p);
            dump << "\n";
        }
    }

    write_json(out_dir / "eval_report.json",
               {{"command", "eval"},
                {"artifact", artifact_json()},
                {"config", config_json(config)},
                {"checkpoint", checkpoint.string()},
                {"checkpoint_epoch", ckpt.epoch},
                {"split", report.split},
                {"samples", report.samples},
                {"backend", backend_json(backend)},
                {"thresholds", report.thresholds},
                {"accuracies", report.accuracies}});
    return report;
}

// --- bloch-export ------------------------------------------------------------------

BlochExport cmd_bloch_export(const RunConfig& config, const std::vector<fs::path>& checkpoints, SplitChoice split,
                             const fs::path& out_dir, std::ostream& log) {
    if (checkpoints.empty()) throw ConfigError("bloch-export needs at least one --checkpoint");
    ensure_dir(out_dir);

    BlochExport result;
    result.trajectory_csv = out_dir / "trajectory.csv";
    auto csv = open_out(result.trajectory_csv);
    csv << "epoch,sample_id,label,stage,x_tilde,q1,q2,q3\n";

    for (const auto& path : checkpoints) {
        const Checkpoint probe = load_checkpoint(path);
        if (probe.model.n_qubits() != 1) {
            throw ConfigError(path.string() + ": Bloch-sphere export shows one qubit per sample and therefore needs a "
                              "single-qubit (binary) model; this checkpoint has " +
                              std::to_string(probe.model.n_qubits()) + " qubits");
        }
        const PreparedData data = prepare_data(config, probe.scaler);
        const Dataset& set = pick(data, split);
        const Checkpoint ckpt = load_matching_checkpoint(path, set);
        TrajectoryRecord rec = record_trajectory(ckpt.model, set, ckpt.epoch);

        for (const auto& p : rec.points) {
            const std::string head = std::to_string(rec.epoch) + "," + std::to_string(p.sample_id) + "," +
                                     std::to_string(p.label) + ",";
            csv << head << "encoded," << exact(p.x_tilde) << ",,,\n";
            csv << head << "pre_su2,," << exact(p.pre_su2.q1) << "," << exact(p.pre_su2.q2) << ","
                << exact(p.pre_su2.q3) << "\n";
            csv << head << "post_su2,," << exact(p.post_su2.q1) << "," << exact(p.post_su2.q2) << ","
                << exact(p.post_su2.q3) << "\n";
        }

        const fs::path svg = out_dir / ("bloch_epoch_" + std::to_string(rec.epoch) + ".svg");
        auto svg_out = open_out(svg);
        svg_out << render_bloch_svg(rec, set.class_names);
        result.svgs.push_back(svg);
        log << "epoch " << rec.epoch << ": " << rec.points.size() << " samples -> " << svg.string() << "\n";
        result.records.push_back(std::move(rec));
    }
    return result;
}

// --- noise-check -------------------------------------------------------------------

std::size_t parse_sample_requirement(std::string_view text, std::size_t population) {
    const bool percent = !text.empty() && text.back() == '%';
    const std::string body(percent ? text.substr(0, text.size() - 1) : text);
    try {
        std::size_t used = 0;
        if (percent) {
            const double pct = std::stod(body, &used);
            if (used != body.size() || !(pct >= 0.0 && pct <= 100.0)) throw std::invalid_argument("range");
            return static_cast<std::size_t>(std::ceil(pct / 100.0 * static_cast<double>(population) - 1e-9));
        }
        const unsigned long long n = std::stoull(body, &used);
        if (used != body.size()) throw std::invalid_argument("trailing");
        return static_cast<std::size_t>(n);
    } catch (const std::exception&) {
        throw ConfigError("tau2 must be a sample count or a percentage such as 10%, got '" + std::string(text) + "'");
    }
}

NoiseCheckOutcome cmd_noise_check(const RunConfig& config, const fs::path& checkpoint, const NoiseCheckOptions& o,
                                  const fs::path& out_dir, std::ostream& log) {
    if (!(o.tau1 > 0.0)) throw ConfigError("tau1 must be > 0");
    o.reference.validate();
    o.candidate.validate();
    ensure_dir(out_dir);

    const Checkpoint probe = load_checkpoint(checkpoint);
    const PreparedData data = prepare_data(config, probe.scaler);
    const Checkpoint ckpt = load_matching_checkpoint(checkpoint, data.train);
    const std::size_t tau2 = parse_sample_requirement(o.tau2, data.train.size());

    std::vector<std::size_t> order(data.train.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(derive_seed(o.sample_seed, 20));
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(std::min(order.size(), o.sample_count.value_or(order.size())));

    // One two-outcome distribution per (sample, qubit).
    std::vector<double> a;
    std::vector<double> b;
    for (std::size_t i : order) {
        const auto pa = forward(ckpt.model, data.train.row(i), o.reference, {0, i});
        const auto pb = forward(ckpt.model, data.train.row(i), o.candidate, {0, i});
        a.insert(a.end(), pa.probs.begin(), pa.probs.end());
        b.insert(b.end(), pb.probs.begin(), pb.probs.end());
    }

    NoiseCheckOutcome out;
    out.samples = order.size();
    const std::size_t per_sample = ckpt.model.n_qubits();
    if (a.empty()) {
        out.report = {{}, o.tau1, tau2, false};
    } else {
        out.report = equivalence_check(a, b, o.tau1, tau2 * per_sample);
        out.report.tau2 = tau2;
    }

    if (out.samples < tau2) {
        out.message = "FAIL: compared " + std::to_string(out.samples) + " samples but tau2 requires " +
                      std::to_string(tau2) + " (short by " + std::to_string(tau2 - out.samples) + ")";
    } else if (!out.report.pass) {
        const auto over = std::count_if(out.report.distances.begin(), out.report.distances.end(),
                                        [&](double d) { return !(d < o.tau1); });
        out.message = "FAIL: " + std::to_string(over) + " of " + std::to_string(out.report.distances.size()) +
                      " distributions exceed tau1=" + exact(o.tau1) + " (max Hellinger distance " +
                      exact(out.report.max_distance()) + ")";
    } else {
        out.message = "PASS: all " + std::to_string(out.report.distances.size()) +
                      " distributions within tau1=" + exact(o.tau1) + " (max Hellinger distance " +
                      exact(out.report.max_distance()) + "), " + std::to_string(out.samples) + " >= tau2=" +
                      std::to_string(tau2) + " samples";
    }
    log << out.message << "\n";

    write_json(out_dir / "noise_report.json",
               {{"command", "noise-check"},
                {"artifact", artifact_json()},
                {"config", config_json(config)},
                {"checkpoint", checkpoint.string()},
                {"reference_backend", backend_json(o.reference)},
                {"candidate_backend", backend_json(o.candidate)},
                {"sample_seed", o.sample_seed},
                {"samples", out.samples},
                {"sample_ids",
                 [&] {
                     std::vector<std::size_t> ids;
                     for (std::size_t i : order) ids.push_back(data.train.ids[i]);
                     return ids;
                 }()},
                {"tau1", o.tau1},
                {"tau2", tau2},
                {"distances", out.report.distances},
                {"max_distance", out.report.distances.empty() ? 0.0 : out.report.max_distance()},
                {"pass", out.report.pass},
                {"message", out.message}});
    return out;
}

}  // namespace dqn
