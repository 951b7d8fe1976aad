#include "ipc/contract/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "ipc/contract/objective.hpp"
#include "ipc/nn/adam.hpp"

namespace ipc::contract {

void TrainConfig::validate() const {
    auto bad = [](const std::string& field, const std::string& why) {
        throw std::invalid_argument("train config: " + field + " " + why);
    };
    if (!(alpha > 0.0)) bad("alpha", "must be > 0");
    if (!(lambda >= 0.0)) bad("lambda", "must be >= 0");
    if (!(lr > 0.0)) bad("lr", "must be > 0");
    if (epochs < 1) bad("epochs", "must be >= 1");
    if (batch_size < 1) bad("batch_size", "must be >= 1");
    if (!(train_fraction > 0.0 && train_fraction <= 1.0)) bad("train_fraction", "must be in (0, 1]");
    if (hidden.empty()) bad("hidden", "must list at least one layer");
    for (auto h : hidden)
        if (h == 0) bad("hidden", "layer widths must be >= 1");
    if (!(leaky_slope >= 0.0 && leaky_slope < 1.0)) bad("leaky_slope", "must be in [0, 1)");
}

nlohmann::json to_json(const TrainConfig& c) {
    return {{"alpha", c.alpha},   {"lambda", c.lambda},
            {"lr", c.lr},         {"epochs", c.epochs},
            {"batch_size", c.batch_size}, {"seed", c.seed},
            {"train_fraction", c.train_fraction}, {"hidden", c.hidden},
            {"leaky_slope", c.leaky_slope}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
    TrainConfig c;
    static const std::vector<std::string> known = {"alpha", "lambda", "lr", "epochs",
                                                   "batch_size", "seed", "train_fraction",
                                                   "hidden", "leaky_slope"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
            throw std::invalid_argument("train config: unknown field '" + it.key() + "'");
        }
    }
    auto read = [&](const char* key, auto& dst) {
        if (!j.contains(key)) return;
        try {
            j.at(key).get_to(dst);
        } catch (const nlohmann::json::exception&) {
            throw std::invalid_argument(std::string("train config: field '") + key +
                                        "' has the wrong type");
        }
    };
    read("alpha", c.alpha);
    read("lambda", c.lambda);
    read("lr", c.lr);
    read("epochs", c.epochs);
    read("batch_size", c.batch_size);
    read("seed", c.seed);
    read("train_fraction", c.train_fraction);
    read("hidden", c.hidden);
    read("leaky_slope", c.leaky_slope);
    c.validate();
    return c;
}

nlohmann::json to_json(const TrainReport& r, const TrainConfig& c) {
    nlohmann::json curve = nlohmann::json::array();
    for (const auto& e : r.loss_curve) {
        curve.push_back({{"total", e.total}, {"erm", e.erm}, {"reg", e.reg}});
    }
    return {{"loss_curve", std::move(curve)},
            {"train_error", r.train_error},
            {"heldout_error", r.heldout_error},
            {"train_count", r.train_count},
            {"heldout_count", r.heldout_count},
            {"steps", r.steps},
            {"degenerate_batches", r.degenerate_batches},
            {"alpha", c.alpha},
            {"lambda", c.lambda},
            {"seed", c.seed},
            {"wall_time_s", r.wall_time_s}};
}

namespace {

double error_rate(const nn::MlpParams& params, std::span<const Example> set) {
    if (set.empty()) return 0.0;
    std::size_t misses = 0;
    for (const auto& ex : set) misses += g_value(params, ex) > 1.0 ? 1 : 0;
    return static_cast<double>(misses) / static_cast<double>(set.size());
}

}  // namespace

TrainResult train(std::span<const Sample> dataset, const TrainConfig& cfg) {
    cfg.validate();
    if (dataset.empty()) throw std::invalid_argument("train: empty dataset");
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 split_rng(cfg.seed ^ 0x5eed5eed5eedull);
    std::shuffle(order.begin(), order.end(), split_rng);

    auto n_train = static_cast<std::size_t>(
        std::llround(cfg.train_fraction * static_cast<double>(dataset.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, dataset.size());
    std::vector<Example> train_set, heldout;
    train_set.reserve(n_train);
    heldout.reserve(dataset.size() - n_train);
    for (std::size_t i = 0; i < order.size(); ++i) {
        (i < n_train ? train_set : heldout).push_back(to_example(dataset[order[i]]));
    }
    return train(train_set, heldout, cfg);
}

TrainResult train(std::span<const Example> train_set, std::span<const Example> heldout,
                  const TrainConfig& cfg) {
    cfg.validate();
    const auto batch = static_cast<std::size_t>(cfg.batch_size);
    if (train_set.size() < batch) {
        throw std::invalid_argument("train: training set (" + std::to_string(train_set.size()) +
                                    ") smaller than batch_size (" + std::to_string(batch) + ")");
    }
    const auto t0 = std::chrono::steady_clock::now();

    std::vector<std::size_t> sizes{train_set.front().input.size()};
    sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
    sizes.push_back(nn::kOutputDim);

    TrainResult result;
    result.params = nn::init(cfg.seed, sizes, cfg.leaky_slope);
    auto& params = result.params;
    auto adam = nn::AdamState::for_params(params);
    nn::MlpParams grads = params.zeros_like();

    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<Example> mb;
    mb.reserve(batch);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        EpochStats acc;
        std::size_t nb = 0;
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t end = std::min(order.size(), start + batch);
            mb.clear();
            for (std::size_t i = start; i < end; ++i) mb.push_back(train_set[order[i]]);

            const auto val = objective(params, mb, cfg.alpha, cfg.lambda, &grads);
            if (!std::isfinite(val.erm)) {
                throw TrainingDiverged("training diverged at epoch " + std::to_string(epoch) +
                                       ": hinge (ERM) term is non-finite");
            }
            if (!std::isfinite(val.reg)) {
                throw TrainingDiverged("training diverged at epoch " + std::to_string(epoch) +
                                       ": log-det (volume) term is non-finite");
            }
            if (val.clamped * 10 > mb.size()) ++result.report.degenerate_batches;

            nn::adam_step(params, grads, adam, cfg.lr);
            if (!params.all_finite()) {
                throw TrainingDiverged("training diverged at epoch " + std::to_string(epoch) +
                                       ": parameters became non-finite");
            }
            acc.total += val.total;
            acc.erm += val.erm;
            acc.reg += val.reg;
            ++nb;
        }
        const double inv = 1.0 / static_cast<double>(nb);
        result.report.loss_curve.push_back({acc.total * inv, acc.erm * inv, acc.reg * inv});
        result.report.steps += nb;
    }

    result.report.train_count = train_set.size();
    result.report.heldout_count = heldout.size();
    result.report.train_error = error_rate(params, train_set);
    result.report.heldout_error = error_rate(params, heldout);
    result.report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

}  // namespace ipc::contract
