#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "ipc/contract/model_io.hpp"
#include "ipc/contract/objective.hpp"
#include "ipc/contract/sample.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

Result ipcctl(const std::string& args) {
    const std::string cmd = std::string(IPCCTL_PATH) + " " + args + " 2>/dev/null";
    Result r;
    FILE* f = popen(cmd.c_str(), "r");
    REQUIRE(f);
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, f)) > 0) r.out.append(buf, n);
    const int status = pclose(f);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

// Fresh scratch directory per test case, removed on exit.
struct Scratch {
    fs::path dir;
    Scratch() {
        static int counter = 0;
        dir = fs::temp_directory_path() /
              ("ipcctl_test_" + std::to_string(getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
    std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

// Small dataset + model shared by several cases.
void make_model(const Scratch& s, const std::string& extra = "") {
    REQUIRE(ipcctl("gen-data --n 800 --seed 3 --quiet --out " + s.dir.string()).code == 0);
    REQUIRE(ipcctl("train --data " + s / "dataset.jsonl" + " --epochs 3 --seed 3 --quiet --out " +
                   s.dir.string() + " " + extra)
                .code == 0);
}

}  // namespace

TEST_CASE("cli: usage errors exit 1") {
    Scratch s;
    CHECK(ipcctl("").code == 1);
    CHECK(ipcctl("frobnicate").code == 1);
    CHECK(ipcctl("train --out " + s.dir.string()).code == 1);
    CHECK(ipcctl("--help").code == 0);
    CHECK(ipcctl("--version").out.find("0.1.0") != std::string::npos);

    std::ofstream(s / "bad.json") << R"({"buffer_size": 0})";
    const auto r = ipcctl("gen-data --config " + s / "bad.json" + " --out " + s.dir.string());
    CHECK(r.code == 1);
    REQUIRE(fs::exists(s / "gen-data.failed.json"));
    CHECK(read_json(s / "gen-data.failed.json").at("error").get<std::string>().find("buffer_size") !=
          std::string::npos);
    CHECK_FALSE(fs::exists(s / "dataset.jsonl"));
    CHECK_FALSE(fs::exists(s / "gen-data.manifest.json"));

    std::ofstream(s / "notjson.json") << "{";
    CHECK(ipcctl("gen-data --config " + s / "notjson.json" + " --out " + s.dir.string()).code == 1);
    CHECK(ipcctl("land --out " + s.dir.string()).code == 1);
}

TEST_CASE("cli: gen-data writes data, sidecar and manifest deterministically") {
    Scratch s;
    const auto r = ipcctl("gen-data --n 300 --seed 5 --out " + s.dir.string());
    REQUIRE(r.code == 0);
    CHECK(r.out.find("samples 300") != std::string::npos);
    CHECK(r.out.find("perception error") != std::string::npos);
    const std::string first = slurp(s / "dataset.jsonl");
    std::size_t lines = 0;
    for (char c : first) lines += c == '\n';
    CHECK(lines == 300);

    const auto meta = read_json(s / "dataset.meta.json");
    CHECK(meta.at("buffer_size") == 1);
    CHECK(meta.at("dataset_hash") == ipc::contract::fnv1a_hex(first));
    const auto man = read_json(s / "gen-data.manifest.json");
    CHECK(man.at("command") == "gen-data");
    CHECK(man.at("seed") == 5);
    CHECK(man.at("version") == "0.1.0");
    CHECK(man.contains("wall_time_s"));
    CHECK(man.at("outputs").size() == 2);

    REQUIRE(ipcctl("gen-data --n 300 --seed 5 --quiet --out " + s.dir.string()).code == 0);
    CHECK(slurp(s / "dataset.jsonl") == first);
    REQUIRE(ipcctl("gen-data --n 300 --seed 6 --quiet --out " + s.dir.string()).code == 0);
    CHECK(slurp(s / "dataset.jsonl") != first);

    const auto line = json::parse(first.substr(0, first.find('\n')));
    CHECK(line.at("x_c").size() == 9);
    CHECK(line.at("y_c").size() == 3);
    CHECK(line.at("yhat_c").size() == 3);
}

TEST_CASE("cli: gen-data lag scales the perception error") {
    Scratch s;
    auto mean_err = [&](int b) {
        const auto r = ipcctl("gen-data --n 2000 --seed 2 --buffer-size " + std::to_string(b) +
                              " --noise-sigma 0 --out " + s.dir.string());
        REQUIRE(r.code == 0);
        const auto pos = r.out.find("mean ");
        return std::stod(r.out.substr(pos + 5));
    };
    const double ratio = mean_err(5) / mean_err(1);
    CHECK(ratio > 4.0);
    CHECK(ratio < 6.0);
}

TEST_CASE("cli: train echoes defaults and its report") {
    Scratch s;
    REQUIRE(ipcctl("gen-data --n 500 --seed 3 --quiet --out " + s.dir.string()).code == 0);
    const auto r = ipcctl("train --data " + s / "dataset.jsonl" + " --epochs 2 --out " + s.dir.string());
    REQUIRE(r.code == 0);
    CHECK(r.out.find("alpha 0.10000000000000001 lambda 0.001 lr 0.001") != std::string::npos);
    const auto report = read_json(s / "model.report.json");
    char held[64];
    std::snprintf(held, sizeof held, "held-out error %.17g", report.at("heldout_error").get<double>());
    CHECK(r.out.find(held) != std::string::npos);
    const auto model = ipc::contract::load_model(s / "model.json");
    CHECK(model.trained_buffer_size == 1);
    CHECK(model.train_config.epochs == 2);
    CHECK(read_json(s / "model.json").at("format") == 1);
}

TEST_CASE("cli: train refuses datasets without a sidecar and reports divergence") {
    Scratch s;
    REQUIRE(ipcctl("gen-data --n 200 --seed 3 --quiet --out " + s.dir.string()).code == 0);
    fs::copy_file(s / "dataset.jsonl", s / "orphan.jsonl");
    CHECK(ipcctl("train --data " + s / "orphan.jsonl" + " --out " + s.dir.string()).code == 1);
    const auto r = ipcctl("train --data " + s / "dataset.jsonl" + " --lr 1e300 --epochs 2 --out " +
                          s.dir.string());
    CHECK(r.code == 2);
    CHECK(fs::exists(s / "train.failed.json"));
}

TEST_CASE("cli: volume weight changes ellipsoid size") {
    Scratch s;
    REQUIRE(ipcctl("gen-data --n 1000 --seed 4 --quiet --out " + s.dir.string()).code == 0);
    const auto data = ipc::contract::read_jsonl_file(s / "dataset.jsonl");
    double reg[2];
    int i = 0;
    for (const char* lam : {"0", "1e-2"}) {
        REQUIRE(ipcctl("train --data " + s / "dataset.jsonl" + " --epochs 5 --quiet --lambda " + lam +
                       " --model m" + std::to_string(i) + ".json --out " + s.dir.string())
                    .code == 0);
        const auto m = ipc::contract::load_model(s / ("m" + std::to_string(i) + ".json"));
        reg[i++] = ipc::contract::reg_loss(m.params, data).value;
    }
    CHECK(reg[0] > reg[1]);  // larger -log det means a larger ellipsoid
}

TEST_CASE("cli: eval, sweep-lag and pac") {
    Scratch s;
    make_model(s);
    const std::string out = " --out " + s.dir.string();

    const auto e1 = ipcctl("eval --model " + s / "model.json" + " --data " + s / "dataset.jsonl" + out);
    REQUIRE(e1.code == 0);
    CHECK(e1.out.find("error_rate ") == 0);
    const std::string csv = slurp(s / "eval.csv");
    CHECK(csv.rfind("index,g,contained\n", 0) == 0);
    const auto e2 = ipcctl("eval --model " + s / "model.json" + " --data " + s / "dataset.jsonl" + out);
    CHECK(e2.out == e1.out);
    CHECK(slurp(s / "eval.csv") == csv);

    // A dataset from another rig is refused.
    auto meta = read_json(s / "dataset.meta.json");
    meta["frame_fingerprint"] = "0000000000000000";
    std::ofstream(s / "dataset.meta.json") << meta.dump();
    const auto bad = ipcctl("eval --model " + s / "model.json" + " --data " + s / "dataset.jsonl" + out);
    CHECK(bad.code == 1);
    CHECK(read_json(s / "eval.failed.json").at("error").get<std::string>().find("camera rig") !=
          std::string::npos);

    const auto sw = ipcctl("sweep-lag --model " + s / "model.json" + " --n 300 --buffers 1,3" + out);
    REQUIRE(sw.code == 0);
    const std::string table = slurp(s / "sweep_lag.csv");
    CHECK(table.rfind("buffer_size,n_samples,error_rate\n1,300,", 0) == 0);
    CHECK(table.find("\n3,300,") != std::string::npos);
    CHECK(ipcctl("sweep-lag --model " + s / "model.json" + " --buffers 0" + out).code == 1);

    REQUIRE(ipcctl("gen-data --n 800 --seed 3 --quiet" + out).code == 0);
    const auto pac = ipcctl("pac --model " + s / "model.json" + " --data " + s / "dataset.jsonl" + out);
    REQUIRE(pac.code == 0);
    CHECK(pac.out.find("p 10508") != std::string::npos);
    CHECK(pac.out.find("estimated") != std::string::npos);
    const auto pj = read_json(s / "pac.json");
    CHECK(pj.at("lipschitz_source") == "estimated");
    CHECK(pj.at("bound").get<double>() >= pj.at("empirical_truncated_loss").get<double>());
    const auto pac2 = ipcctl("pac --model " + s / "model.json" + " --data " + s / "dataset.jsonl" +
                             " --lipschitz 0.5 --epsilon 0.02" + out);
    REQUIRE(pac2.code == 0);
    CHECK(read_json(s / "pac.json").at("lipschitz_source") == "supplied");
    CHECK(read_json(s / "pac.json").at("confidence").get<double>() ==
          doctest::Approx(1.0 - 2.0 * std::exp(-2.0 * 800 * 0.02 * 0.02)).epsilon(1e-12));
}

TEST_CASE("cli: land writes traces, summary and plot table") {
    Scratch s;
    const std::string out = " --out " + s.dir.string();
    const auto r = ipcctl("land --baseline --stressed --runs 3 --seed 9" + out);
    REQUIRE(r.code == 0);
    const auto summary = read_json(s / "land/land_summary.json");
    CHECK(summary.at("contract") == "baseline");
    CHECK(summary.at("runs") == 3);
    CHECK(summary.at("scenario").at("buffer_size") == 5);
    CHECK(summary.at("scenario").at("fast_approach") == true);
    CHECK(summary.at("per_run").size() == 3);
    for (int i = 0; i < 3; ++i) {
        const std::string stem = "land/run_00" + std::to_string(i);
        CHECK(fs::exists(s / (stem + ".json")));
        CHECK(fs::exists(s / (stem + "_measurements.csv")));
        CHECK(fs::exists(s / (stem + "_trajectory.csv")));
    }
    const std::string plot = slurp(s / "land/land_plot.csv");
    CHECK(plot.find(",cross,") != std::string::npos);
    CHECK(plot.find(",star,") == std::string::npos);
    const std::string first = slurp(s / "land/land_summary.json");
    REQUIRE(ipcctl("land --baseline --stressed --runs 3 --seed 9 --quiet" + out).code == 0);
    CHECK(slurp(s / "land/land_summary.json") == first);

    std::ofstream(s / "cfg.json") << R"({"landing": {"max_measurements": 0}})";
    CHECK(ipcctl("land --baseline --config " + s / "cfg.json" + out).code == 1);
    std::ofstream(s / "cfg2.json") << R"({"lnding": {}})";
    CHECK(ipcctl("land --baseline --config " + s / "cfg2.json" + out).code == 1);
}

TEST_CASE("cli: land with a learned model") {
    Scratch s;
    make_model(s);
    const auto r = ipcctl("land --model " + s / "model.json" + " --runs 2 --out " + s.dir.string());
    REQUIRE(r.code == 0);
    const auto summary = read_json(s / "land/land_summary.json");
    CHECK(summary.at("contract") == "learned");
    CHECK(summary.at("scenario").at("buffer_size") == 1);
    const std::string plot = slurp(s / "land/land_plot.csv");
    CHECK(plot.find(",circle,") != std::string::npos);
}
