#include "ipc/cli/commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "ipc/contract/model_io.hpp"
#include "ipc/contract/objective.hpp"
#include "ipc/contract/pac.hpp"
#include "ipc/contract/train.hpp"
#include "ipc/landing/state_machine.hpp"
#include "ipc/landing/trace_io.hpp"
#include "ipc/sim/dataset.hpp"
#include "ipc/simd/kernels.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ipc::cli {
namespace {

using landing::num;

std::string resolve(const GlobalOptions& g, const std::string& path) {
    const fs::path p(path);
    return p.is_absolute() ? p.string() : (fs::path(g.out) / p).string();
}

// Write to a sibling temporary and rename, so a crash never leaves a
// half-written output behind.
void write_atomic(const std::string& path, const std::string& content) {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    const fs::path tmp = p.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) throw UsageError("cannot open " + tmp.string() + " for writing");
        os << content;
        if (!os) throw UsageError("write failed: " + tmp.string());
    }
    fs::rename(tmp, p);
}

json read_json_file(const std::string& path, const char* what) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw UsageError(std::string("cannot open ") + what + " " + path);
    try {
        return json::parse(is);
    } catch (const json::exception& e) {
        throw UsageError(std::string(what) + " " + path + " is not valid JSON: " + e.what());
    }
}

json load_config(const GlobalOptions& g) {
    if (g.config.empty()) return json::object();
    json j = read_json_file(g.config, "config");
    if (!j.is_object()) throw UsageError("config " + g.config + " must be a JSON object");
    return j;
}

// Runs f, turning std::invalid_argument from config parsing into a UsageError.
template <typename F>
auto config_step(F&& f) {
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

std::string meta_path(const std::string& dataset_path) {
    fs::path p(dataset_path);
    p.replace_extension(".meta.json");
    return p.string();
}

struct Dataset {
    std::vector<contract::Sample> samples;
    json meta;
};

Dataset load_dataset(const std::string& path) {
    Dataset d;
    const std::string mp = meta_path(path);
    if (!fs::exists(mp)) {
        throw UsageError("dataset " + path + " has no sidecar " + mp +
                         "; the camera rig and feature set it was generated with are unknown");
    }
    d.meta = read_json_file(mp, "dataset metadata");
    try {
        d.samples = contract::read_jsonl_file(path);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    if (d.samples.empty()) throw UsageError("dataset " + path + " is empty");
    return d;
}

contract::ModelFile load_model_file(const std::string& path) {
    if (!fs::exists(path)) throw UsageError("cannot open model " + path);
    try {
        return contract::load_model(path);
    } catch (const std::exception& e) {
        throw UsageError("model " + path + ": " + e.what());
    }
}

void require_same_frame(const std::string& model_fp, const std::string& data_fp,
                        const std::string& data_what) {
    if (model_fp != data_fp) {
        throw UsageError(
            "frame fingerprint mismatch: model " + model_fp + ", " + data_what + " " + data_fp +
            ". The contract is only valid in the camera frame and feature layout it was trained "
            "in; this input comes from a different camera rig or feature set.");
    }
}

class Manifest {
public:
    Manifest(std::string command, const GlobalOptions& g)
        : command_(std::move(command)), g_(g), t0_(std::chrono::steady_clock::now()) {}

    json config = json::object();
    std::uint64_t seed = 0;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;

    void write() const {
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
        json j{{"command", command_},
               {"config", config},
               {"seed", seed},
               {"inputs", inputs},
               {"outputs", outputs},
               {"version", kVersion},
               {"simd_backend", simd::backend_name(simd::active().backend)},
               {"wall_time_s", wall}};
        write_atomic(resolve(g_, command_ + ".manifest.json"), j.dump(2) + "\n");
    }

private:
    std::string command_;
    const GlobalOptions& g_;
    std::chrono::steady_clock::time_point t0_;
};

void say(const GlobalOptions& g, const std::string& line) {
    if (!g.quiet) std::printf("%s\n", line.c_str());
}

double quantile(std::vector<double> v, double q) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const auto i = static_cast<std::size_t>(q * static_cast<double>(v.size() - 1));
    return v[i];
}

}  // namespace

// --- gen-data ----------------------------------------------------------------

int cmd_gen_data(const GlobalOptions& g, const GenDataOptions& o) {
    Manifest m("gen-data", g);
    const json cj = load_config(g);
    auto dc = config_step([&] { return sim::dataset_config_from_json(cj); });
    if (g.seed) dc.sim.seed = *g.seed;
    if (o.buffer_size) dc.sim.buffer_size = *o.buffer_size;
    if (o.n) dc.n = *o.n;
    if (o.noise_sigma) dc.sim.noise_sigma = *o.noise_sigma;
    config_step([&] { dc.validate(); return 0; });
    if (dc.n < 1) throw UsageError("dataset config: n must be >= 1");

    const auto samples = sim::generate_dataset(dc);
    std::ostringstream body;
    contract::write_jsonl(body, samples);
    const std::string content = body.str();
    const std::string hash = contract::fnv1a_hex(content);

    const std::string data_path = resolve(g, o.output);
    const std::string mp = meta_path(data_path);
    json meta{{"frame_fingerprint", sim::frame_fingerprint(dc.sim.rig)},
              {"feature_set", contract::kFeatureSet},
              {"buffer_size", dc.sim.buffer_size},
              {"noise_sigma", dc.sim.noise_sigma},
              {"n", samples.size()},
              {"seed", dc.sim.seed},
              {"dataset_hash", hash},
              {"config", sim::to_json(dc)}};
    write_atomic(data_path, content);
    write_atomic(mp, meta.dump(2) + "\n");

    std::vector<double> err, speed;
    for (const auto& s : samples) {
        err.push_back((s.perceived_c - s.truth_c).norm());
        speed.push_back(Eigen::Vector3d(s.state_c[0], s.state_c[1], s.state_c[2]).norm());
    }
    double mean = 0.0;
    for (double e : err) mean += e;
    mean /= static_cast<double>(err.size());
    say(g, "samples " + std::to_string(samples.size()) + " buffer_size " +
               std::to_string(dc.sim.buffer_size));
    say(g, "perception error (m): mean " + num(mean) + " median " + num(quantile(err, 0.5)) +
               " p98 " + num(quantile(err, 0.98)) + " max " + num(quantile(err, 1.0)));
    say(g, "speed (m/s): median " + num(quantile(speed, 0.5)) + " max " +
               num(quantile(speed, 1.0)));
    say(g, "dataset " + data_path + " hash " + hash);

    m.config = sim::to_json(dc);
    m.seed = dc.sim.seed;
    m.outputs = {data_path, mp};
    m.write();
    return kExitOk;
}

// --- train -------------------------------------------------------------------

int cmd_train(const GlobalOptions& g, const TrainOptions& o) {
    Manifest m("train", g);
    const json cj = load_config(g);
    auto tc = config_step([&] { return contract::train_config_from_json(cj); });
    if (g.seed) tc.seed = *g.seed;
    if (o.alpha) tc.alpha = *o.alpha;
    if (o.lambda) tc.lambda = *o.lambda;
    if (o.lr) tc.lr = *o.lr;
    if (o.epochs) tc.epochs = *o.epochs;
    if (o.batch_size) tc.batch_size = *o.batch_size;
    config_step([&] { tc.validate(); return 0; });

    const Dataset ds = load_dataset(o.data);
    say(g, "alpha " + num(tc.alpha) + " lambda " + num(tc.lambda) + " lr " + num(tc.lr) +
               " epochs " + std::to_string(tc.epochs) + " batch_size " +
               std::to_string(tc.batch_size) + " seed " + std::to_string(tc.seed));

    contract::TrainResult result;
    try {
        result = contract::train(ds.samples, tc);
    } catch (const contract::TrainingDiverged& e) {
        throw NumericError(e.what());
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    contract::ModelFile mf;
    mf.params = result.params;
    mf.train_config = tc;
    mf.frame_fingerprint = ds.meta.value("frame_fingerprint", "");
    mf.dataset_hash = ds.meta.value("dataset_hash", "");
    mf.trained_buffer_size = ds.meta.value("buffer_size", 0);

    const std::string model_path = resolve(g, o.model);
    fs::path report_path(model_path);
    report_path.replace_extension(".report.json");
    json report = contract::to_json(result.report, tc);
    report["model"] = model_path;
    report["dataset"] = o.data;
    write_atomic(model_path, contract::to_json(mf).dump(1) + "\n");
    write_atomic(report_path.string(), report.dump(2) + "\n");

    const auto& r = result.report;
    if (r.degenerate_batches > 0) {
        say(g, "warning: " + std::to_string(r.degenerate_batches) +
                   " batches had more than 10% of shape matrices at the determinant floor");
    }
    const auto& last = r.loss_curve.back();
    say(g, "final epoch: total " + num(last.total) + " erm " + num(last.erm) + " reg " +
               num(last.reg));
    say(g, "train error " + num(r.train_error) + " (" + std::to_string(r.train_count) + ")");
    say(g, "held-out error " + num(r.heldout_error) + " (" + std::to_string(r.heldout_count) +
               ")");
    say(g, "model " + model_path);

    m.config = contract::to_json(tc);
    m.seed = tc.seed;
    m.inputs = {o.data};
    m.outputs = {model_path, report_path.string()};
    m.write();
    return kExitOk;
}

// --- eval --------------------------------------------------------------------

int cmd_eval(const GlobalOptions& g, const EvalOptions& o) {
    Manifest m("eval", g);
    const auto mf = load_model_file(o.model);
    const Dataset ds = load_dataset(o.data);
    require_same_frame(mf.frame_fingerprint, ds.meta.value("frame_fingerprint", ""),
                       "dataset");

    std::ostringstream csv;
    csv << "index,g,contained\n";
    std::size_t misses = 0;
    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
        const double gv = contract::g_value(mf.params, ds.samples[i]);
        if (!std::isfinite(gv)) throw NumericError("non-finite g at sample " + std::to_string(i));
        const bool inside = gv <= 1.0;
        misses += inside ? 0 : 1;
        csv << i << ',' << num(gv) << ',' << (inside ? 1 : 0) << '\n';
    }
    const double rate = static_cast<double>(misses) / static_cast<double>(ds.samples.size());
    const std::string csv_path = resolve(g, o.csv);
    write_atomic(csv_path, csv.str());
    say(g, "error_rate " + num(rate) + " (" + std::to_string(misses) + " of " +
               std::to_string(ds.samples.size()) + " outside)");

    m.config = {{"model", o.model}, {"data", o.data}};
    m.seed = mf.train_config.seed;
    m.inputs = {o.model, o.data};
    m.outputs = {csv_path};
    m.write();
    return kExitOk;
}

// --- sweep-lag ---------------------------------------------------------------

int cmd_sweep_lag(const GlobalOptions& g, const SweepLagOptions& o) {
    Manifest m("sweep-lag", g);
    const auto mf = load_model_file(o.model);
    const json cj = load_config(g);
    auto dc = config_step([&] { return sim::dataset_config_from_json(cj); });
    require_same_frame(mf.frame_fingerprint, sim::frame_fingerprint(dc.sim.rig),
                       "evaluation rig");
    if (o.buffers.empty()) throw UsageError("--buffers: need at least one buffer size");
    for (int b : o.buffers)
        if (b < 1) throw UsageError("--buffers: buffer sizes must be >= 1");
    if (mf.trained_buffer_size < 1) {
        say(g, "warning: model does not declare the buffer size it was trained at");
    }
    const std::uint64_t seed = g.seed ? *g.seed : mf.train_config.seed + 1000;
    if (o.n) dc.n = *o.n;
    if (dc.n < 1) throw UsageError("--n must be >= 1");
    dc.sim.seed = seed;

    std::ostringstream csv;
    csv << "buffer_size,n_samples,error_rate\n";
    json rows = json::array();
    say(g, "trained at buffer size " + std::to_string(mf.trained_buffer_size));
    say(g, "buffer_size  n_samples  error_rate");
    for (int b : o.buffers) {
        dc.sim.buffer_size = b;
        const auto samples = sim::generate_dataset(dc);
        const double rate = contract::evaluate_error(mf.params, samples);
        csv << b << ',' << samples.size() << ',' << num(rate) << '\n';
        rows.push_back({{"buffer_size", b}, {"n_samples", samples.size()}, {"error_rate", rate}});
        char line[96];
        std::snprintf(line, sizeof line, "%11d  %9zu  %.17g", b, samples.size(), rate);
        say(g, line);
    }
    const std::string csv_path = resolve(g, o.csv);
    write_atomic(csv_path, csv.str());

    m.config = sim::to_json(dc);
    m.config["buffers"] = o.buffers;
    m.config["rows"] = rows;
    m.seed = seed;
    m.inputs = {o.model};
    m.outputs = {csv_path};
    m.write();
    return kExitOk;
}

// --- pac ---------------------------------------------------------------------

int cmd_pac(const GlobalOptions& g, const PacOptions& o) {
    Manifest m("pac", g);
    const auto mf = load_model_file(o.model);
    const Dataset ds = load_dataset(o.data);
    require_same_frame(mf.frame_fingerprint, ds.meta.value("frame_fingerprint", ""),
                       "dataset");

    contract::PacInputs in;
    in.alpha = mf.train_config.alpha;
    in.empirical_trunc_loss = contract::empirical_truncated_loss(mf.params, ds.samples, in.alpha);
    in.lipschitz_lg = o.lipschitz ? *o.lipschitz
                                  : contract::estimate_lipschitz(mf.params, ds.samples);
    in.param_count_p = mf.params.param_count();
    in.sample_count_n = ds.samples.size();
    in.epsilon = o.epsilon;
    config_step([&] { in.validate(); return 0; });
    const auto b = contract::pac_bound(in);
    if (!std::isfinite(b.bound)) throw NumericError("bound is not finite");

    const char* lg_source = o.lipschitz ? "supplied" : "estimated";
    json j{{"p", in.param_count_p},
           {"N", in.sample_count_n},
           {"alpha", in.alpha},
           {"epsilon", in.epsilon},
           {"empirical_truncated_loss", in.empirical_trunc_loss},
           {"lipschitz_lg", in.lipschitz_lg},
           {"lipschitz_source", lg_source},
           {"complexity", b.complexity},
           {"bound", b.bound},
           {"confidence", b.confidence}};
    const std::string out_path = resolve(g, "pac.json");
    write_atomic(out_path, j.dump(2) + "\n");

    say(g, "p " + std::to_string(in.param_count_p) + "  N " + std::to_string(in.sample_count_n));
    say(g, "empirical truncated loss " + num(in.empirical_trunc_loss));
    say(g, std::string("L_g ") + num(in.lipschitz_lg) + " (" + lg_source +
               (o.lipschitz ? ")" : "; the bound is conditional on this estimate)"));
    say(g, "bound " + num(b.bound) + "  confidence " + num(b.confidence));

    m.config = {{"epsilon", o.epsilon}};
    if (o.lipschitz) m.config["lipschitz"] = *o.lipschitz;
    m.seed = mf.train_config.seed;
    m.inputs = {o.model, o.data};
    m.outputs = {out_path};
    m.write();
    return kExitOk;
}

// --- land --------------------------------------------------------------------

int cmd_land(const GlobalOptions& g, const LandOptions& o) {
    Manifest m("land", g);
    if (o.baseline == !o.model.empty()) {
        throw UsageError("land: give exactly one of --model or --baseline");
    }
    if (o.runs < 1) throw UsageError("land: --runs must be >= 1");

    const json cj = load_config(g);
    for (auto it = cj.begin(); it != cj.end(); ++it) {
        if (it.key() != "sim" && it.key() != "landing" && it.key() != "scenario") {
            throw UsageError("land config: unknown field '" + it.key() + "'");
        }
    }
    const auto sim_cfg =
        config_step([&] { return sim::sim_config_from_json(cj.value("sim", json::object())); });
    const auto land_cfg = config_step(
        [&] { return landing::landing_config_from_json(cj.value("landing", json::object())); });

    landing::ScenarioConfig sc;
    if (cj.contains("scenario")) {
        const auto& s = cj.at("scenario");
        try {
            sc.pad_half_range = s.value("pad_half_range", sc.pad_half_range);
            sc.buffer_size = s.value("buffer_size", sc.buffer_size);
            sc.fast_approach = s.value("fast_approach", sc.fast_approach);
        } catch (const json::exception& e) {
            throw UsageError(std::string("land config: scenario: ") + e.what());
        }
    }

    landing::ContractFn ipc;
    if (o.baseline) {
        ipc = landing::trivial_contract();
        if (!cj.contains("scenario") || !cj.at("scenario").contains("buffer_size")) {
            sc.buffer_size = sim_cfg.buffer_size;
        }
    } else {
        const auto mf = load_model_file(o.model);
        require_same_frame(mf.frame_fingerprint, sim::frame_fingerprint(sim_cfg.rig), "sim rig");
        ipc = landing::learned_contract(mf.params);
        if (!cj.contains("scenario") || !cj.at("scenario").contains("buffer_size")) {
            sc.buffer_size = mf.trained_buffer_size > 0 ? mf.trained_buffer_size : 1;
        }
        m.inputs = {o.model};
    }
    if (o.stressed) {
        sc.buffer_size = 5;
        sc.fast_approach = true;
    }
    if (o.buffer_size) sc.buffer_size = *o.buffer_size;
    if (o.fast_approach) sc.fast_approach = true;
    if (sc.buffer_size < 1) throw UsageError("land: buffer size must be >= 1");

    const std::uint64_t base_seed = g.seed ? *g.seed : 1;
    const std::string dir = resolve(g, o.subdir);
    std::vector<landing::LandingTrace> traces;
    traces.reserve(static_cast<std::size_t>(o.runs));
    json runs = json::array();
    int successes = 0;
    for (int i = 0; i < o.runs; ++i) {
        const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(i);
        auto world = config_step([&] { return landing::make_scenario(sim_cfg, sc, seed); });
        traces.push_back(landing::run_landing(ipc, world, land_cfg));
        const auto& t = traces.back();
        successes += t.success ? 1 : 0;

        char stem[32];
        std::snprintf(stem, sizeof stem, "run_%03d", i);
        const std::string base = (fs::path(dir) / stem).string();
        json tj = landing::to_json(t);
        tj["run"] = i;
        tj["seed"] = seed;
        write_atomic(base + ".json", tj.dump(1) + "\n");
        std::ostringstream meas, traj;
        landing::write_measurements_csv(meas, t);
        landing::write_trajectory_csv(traj, t);
        write_atomic(base + "_measurements.csv", meas.str());
        write_atomic(base + "_trajectory.csv", traj.str());
        m.outputs.push_back(base + ".json");

        json row{{"run", i},
                 {"seed", seed},
                 {"success", t.success},
                 {"measurements", t.measurement_count},
                 {"final_contains_truth", t.final_contains_truth}};
        if (!t.abort_reason.empty()) row["abort_reason"] = t.abort_reason;
        runs.push_back(std::move(row));

        std::string line = std::string(stem) + (t.success ? "  success" : "  failure") +
                           "  measurements " + std::to_string(t.measurement_count);
        if (t.shutdown_point) {
            const Eigen::Vector3d d = *t.shutdown_point - t.pad;
            line += "  shutdown offset (" + num(d.x()) + ", " + num(d.y()) + ", " + num(d.z()) + ")";
        }
        if (!t.abort_reason.empty()) line += "  aborted: " + t.abort_reason;
        say(g, line);
    }

    std::vector<landing::PlotRun> plot;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        plot.push_back({static_cast<int>(i), o.baseline, &traces[i]});
    }
    std::ostringstream plot_csv;
    landing::write_plot_csv(plot_csv, plot);
    const std::string plot_path = (fs::path(dir) / "land_plot.csv").string();
    write_atomic(plot_path, plot_csv.str());

    json summary{{"contract", o.baseline ? "baseline" : "learned"},
                 {"runs", o.runs},
                 {"successes", successes},
                 {"scenario", landing::to_json(sc)},
                 {"landing", landing::to_json(land_cfg)},
                 {"per_run", runs}};
    const std::string summary_path = (fs::path(dir) / "land_summary.json").string();
    write_atomic(summary_path, summary.dump(2) + "\n");
    say(g, "successes " + std::to_string(successes) + "/" + std::to_string(o.runs));

    m.config = {{"sim", sim::to_json(sim_cfg)},
                {"landing", landing::to_json(land_cfg)},
                {"scenario", landing::to_json(sc)},
                {"baseline", o.baseline},
                {"runs", o.runs}};
    m.seed = base_seed;
    m.outputs.push_back(plot_path);
    m.outputs.push_back(summary_path);
    m.write();
    return kExitOk;
}

// --- command line ------------------------------------------------------------

int run(int argc, char** argv) {
    CLI::App app{"Learn, evaluate and use inverse perception contracts for vision-based landing"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", kVersion);

    GlobalOptions g;
    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "Seed for the command's randomness");
    app.add_option("--config", g.config, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--out", g.out, "Output directory")->capture_default_str();
    app.add_flag("--quiet", g.quiet, "Suppress stdout reports");

    GenDataOptions gen;
    int gen_buffer = 0;
    std::size_t gen_n = 0;
    double gen_noise = 0.0;
    auto* c_gen = app.add_subcommand("gen-data", "Fly the sweep and write a JSONL dataset");
    auto* gen_buffer_opt = c_gen->add_option("--buffer-size", gen_buffer, "Perception lag in frames");
    auto* gen_n_opt = c_gen->add_option("--n", gen_n, "Number of samples");
    auto* gen_noise_opt = c_gen->add_option("--noise-sigma", gen_noise, "Perception noise (m)");
    c_gen->add_option("--output", gen.output, "Dataset path")->capture_default_str();

    TrainOptions tr;
    double tr_alpha = 0, tr_lambda = 0, tr_lr = 0;
    int tr_epochs = 0, tr_batch = 0;
    auto* c_train = app.add_subcommand("train", "Train a contract on a dataset");
    c_train->add_option("--data", tr.data, "Dataset JSONL")->required()->check(CLI::ExistingFile);
    c_train->add_option("--model", tr.model, "Model output path")->capture_default_str();
    auto* tr_alpha_opt = c_train->add_option("--alpha", tr_alpha, "Hinge sharpness");
    auto* tr_lambda_opt = c_train->add_option("--lambda", tr_lambda, "Volume weight");
    auto* tr_lr_opt = c_train->add_option("--lr", tr_lr, "Adam learning rate");
    auto* tr_epochs_opt = c_train->add_option("--epochs", tr_epochs, "Epochs");
    auto* tr_batch_opt = c_train->add_option("--batch-size", tr_batch, "Mini-batch size");

    EvalOptions ev;
    auto* c_eval = app.add_subcommand("eval", "Error rate of a model on a dataset");
    c_eval->add_option("--model", ev.model, "Model JSON")->required()->check(CLI::ExistingFile);
    c_eval->add_option("--data", ev.data, "Dataset JSONL")->required()->check(CLI::ExistingFile);
    c_eval->add_option("--csv", ev.csv, "Per-sample g values")->capture_default_str();

    SweepLagOptions sw;
    std::size_t sw_n = 0;
    auto* c_sweep = app.add_subcommand("sweep-lag", "Error rate on fresh flights per buffer size");
    c_sweep->add_option("--model", sw.model, "Model JSON")->required()->check(CLI::ExistingFile);
    c_sweep->add_option("--buffers", sw.buffers, "Buffer sizes")->delimiter(',')->capture_default_str();
    auto* sw_n_opt = c_sweep->add_option("--n", sw_n, "Samples per evaluation flight");
    c_sweep->add_option("--csv", sw.csv, "Table output")->capture_default_str();

    PacOptions pc;
    double pc_lg = 0.0;
    auto* c_pac = app.add_subcommand("pac", "Generalization bound for a trained contract");
    c_pac->add_option("--model", pc.model, "Model JSON")->required()->check(CLI::ExistingFile);
    c_pac->add_option("--data", pc.data, "Training dataset JSONL")->required()->check(CLI::ExistingFile);
    c_pac->add_option("--epsilon", pc.epsilon, "Deviation term")->capture_default_str();
    auto* pc_lg_opt = c_pac->add_option("--lipschitz", pc_lg, "Override the estimated L_g");

    LandOptions ld;
    int ld_buffer = 0;
    auto* c_land = app.add_subcommand("land", "Run landing experiments");
    auto* ld_model_opt = c_land->add_option("--model", ld.model, "Model JSON")->check(CLI::ExistingFile);
    auto* ld_base_opt = c_land->add_flag("--baseline", ld.baseline, "Use the trivial contract E(yhat, 10000 I)");
    ld_model_opt->excludes(ld_base_opt);
    c_land->add_option("--runs", ld.runs, "Number of runs")->capture_default_str();
    auto* ld_buffer_opt = c_land->add_option("--buffer-size", ld_buffer, "Perception lag in frames");
    c_land->add_flag("--fast-approach", ld.fast_approach, "Take the first measurement at full speed");
    c_land->add_flag("--stressed", ld.stressed, "Buffer size 5 with a fast approach");
    c_land->add_option("--subdir", ld.subdir, "Output subdirectory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (seed_opt->count()) g.seed = seed;
    if (gen_buffer_opt->count()) gen.buffer_size = gen_buffer;
    if (gen_n_opt->count()) gen.n = gen_n;
    if (gen_noise_opt->count()) gen.noise_sigma = gen_noise;
    if (tr_alpha_opt->count()) tr.alpha = tr_alpha;
    if (tr_lambda_opt->count()) tr.lambda = tr_lambda;
    if (tr_lr_opt->count()) tr.lr = tr_lr;
    if (tr_epochs_opt->count()) tr.epochs = tr_epochs;
    if (tr_batch_opt->count()) tr.batch_size = tr_batch;
    if (sw_n_opt->count()) sw.n = sw_n;
    if (pc_lg_opt->count()) pc.lipschitz = pc_lg;
    if (ld_buffer_opt->count()) ld.buffer_size = ld_buffer;

    const auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    auto fail = [&](int code, const std::string& msg) {
        std::fprintf(stderr, "ipcctl %s: %s\n", name.c_str(), msg.c_str());
        try {
            json marker{{"command", name}, {"exit_code", code}, {"error", msg}};
            write_atomic(resolve(g, name + ".failed.json"), marker.dump(2) + "\n");
        } catch (...) {
        }
        return code;
    };
    try {
        if (sub == c_gen) return cmd_gen_data(g, gen);
        if (sub == c_train) return cmd_train(g, tr);
        if (sub == c_eval) return cmd_eval(g, ev);
        if (sub == c_sweep) return cmd_sweep_lag(g, sw);
        if (sub == c_pac) return cmd_pac(g, pc);
        if (sub == c_land) return cmd_land(g, ld);
    } catch (const NumericError& e) {
        return fail(kExitNumeric, e.what());
    } catch (const UsageError& e) {
        return fail(kExitUsage, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(kExitUsage, e.what());
    } catch (const std::exception& e) {
        return fail(kExitUsage, e.what());
    }
    return kExitUsage;
}

}  // namespace ipc::cli
