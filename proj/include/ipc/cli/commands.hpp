#pragma once
// ipcctl subcommands. Each writes its outputs under GlobalOptions::out plus a
// <command>.manifest.json describing the run.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ipc::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNumeric = 2 };

// Bad flags, bad config, missing or mismatched inputs. Exit code 1.
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// Divergence or other non-finite results. Exit code 2.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

struct GlobalOptions {
    std::optional<std::uint64_t> seed;
    std::string config;  // JSON file; empty means defaults
    std::string out = ".";
    bool quiet = false;
};

struct GenDataOptions {
    std::optional<int> buffer_size;
    std::optional<std::size_t> n;
    std::optional<double> noise_sigma;
    std::string output = "dataset.jsonl";
};

struct TrainOptions {
    std::string data;
    std::string model = "model.json";
    std::optional<double> alpha;
    std::optional<double> lambda;
    std::optional<double> lr;
    std::optional<int> epochs;
    std::optional<int> batch_size;
};

struct EvalOptions {
    std::string model;
    std::string data;
    std::string csv = "eval.csv";
};

struct SweepLagOptions {
    std::string model;
    std::vector<int> buffers{1, 2, 3, 4, 5};
    std::optional<std::size_t> n;
    std::string csv = "sweep_lag.csv";
};

struct PacOptions {
    std::string model;
    std::string data;
    double epsilon = 0.02;
    std::optional<double> lipschitz;
};

struct LandOptions {
    std::string model;
    bool baseline = false;
    int runs = 10;
    std::optional<int> buffer_size;
    bool fast_approach = false;
    bool stressed = false;  // buffer 5 + fast approach
    std::string subdir = "land";
};

int cmd_gen_data(const GlobalOptions& g, const GenDataOptions& o);
int cmd_train(const GlobalOptions& g, const TrainOptions& o);
int cmd_eval(const GlobalOptions& g, const EvalOptions& o);
int cmd_sweep_lag(const GlobalOptions& g, const SweepLagOptions& o);
int cmd_pac(const GlobalOptions& g, const PacOptions& o);
int cmd_land(const GlobalOptions& g, const LandOptions& o);

// Full command line: parse, dispatch, map exceptions to exit codes. On a
// failure after parsing, <out>/<command>.failed.json records the error.
int run(int argc, char** argv);

}  // namespace ipc::cli
