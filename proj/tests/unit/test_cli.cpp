#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / ("snet_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Result snet(const std::string& args) {
  const fs::path out = scratch() / "stdout.txt", err = scratch() / "stderr.txt";
  const std::string cmd = std::string("\"") + SNET_CLI_PATH + "\" " + args + " >\"" +
                          out.string() + "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string cartpole_run(const std::string& name, int steps, int seed = 3) {
  const fs::path dir = scratch() / name;
  const Result r = snet("run --task cartpole --mode Baseline --seed " + std::to_string(seed) +
                        " --out \"" + dir.string() + "\" --set total_steps=" + std::to_string(steps) +
                        " --set eval_interval=500 --set eval_episodes=3 --set warmup_steps=200");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  return dir.string();
}

std::vector<std::string> lines_after_dir(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    const auto pos = line.find(" [");
    if (pos != std::string::npos) out.push_back(line.substr(pos));
  }
  return out;
}

}  // namespace

TEST_CASE("run writes the artifacts and repeats byte-identically") {
  const std::string a = cartpole_run("rep_a", 1000);
  const std::string b = cartpole_run("rep_b", 1000);
  CHECK(fs::exists(fs::path(a) / "DONE"));
  CHECK(fs::exists(fs::path(a) / "resolved-config.txt"));
  const std::string ma = slurp(fs::path(a) / "metrics.csv");
  CHECK(ma == slurp(fs::path(b) / "metrics.csv"));
  CHECK(ma.rfind("run_id,task,mode,seed,step_or_epoch,metric_name,value\n", 0) == 0);
  CHECK(ma.find("eval_mean_reward") != std::string::npos);
  CHECK(ma.find("cartpole_Baseline_s3,cartpole,Baseline,3,500,") != std::string::npos);
  CHECK(slurp(fs::path(a) / "resolved-config.txt").find("total_steps = 1000") != std::string::npos);
}

TEST_CASE("a config file is honored and overridden by flags") {
  const fs::path cfg = scratch() / "cfg.txt";
  {
    std::ofstream f(cfg);
    f << "task = synthetic\nmode = SN\nseed = 1\nepochs = 2\nsynthetic_n = 200\n";
  }
  const fs::path dir = scratch() / "syn";
  const Result r = snet("run --config \"" + cfg.string() + "\" --seed 4 --out \"" + dir.string() + "\"");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const std::string m = slurp(dir / "metrics.csv");
  CHECK(m.find("synthetic_SN_s4,synthetic,SN,4,2,test_accuracy,") != std::string::npos);
  CHECK(m.find("mean_screener_weight") != std::string::npos);
  for (const char* f : {"confusion.csv", "confusion_failures.csv", "highest_weights.csv",
                        "lowest_weights.csv", "weight_traces.csv", "DONE"}) {
    CHECK_MESSAGE(fs::exists(dir / f), f);
  }
  CHECK(slurp(dir / "weight_traces.csv").rfind("sample_id,epoch,weight\n", 0) == 0);
  CHECK(slurp(dir / "highest_weights.csv").rfind("sample_id,label,final_weight\n", 0) == 0);
}

TEST_CASE("invalid invocations exit non-zero with a diagnostic") {
  const Result bad_key = snet("run --task cartpole --out \"" + (scratch() / "x").string() +
                              "\" --set nope=1");
  CHECK(bad_key.code != 0);
  CHECK(bad_key.err.find("unknown key 'nope'") != std::string::npos);

  const Result combo = snet("run --task mnist --mode SN_Sampling --out \"" +
                            (scratch() / "y").string() + "\"");
  CHECK(combo.code != 0);
  CHECK(combo.err.find("SN_Sampling") != std::string::npos);
}

TEST_CASE("missing MNIST files name the expected paths") {
  const fs::path empty = scratch() / "no_data";
  fs::create_directories(empty);
  const fs::path dir = scratch() / "mnist_missing";
  const Result r = snet("run --task mnist --out \"" + dir.string() + "\" --set data_dir=" +
                        empty.string());
  CHECK(r.code != 0);
  CHECK(r.err.find((empty / "train-images-idx3-ubyte").string()) != std::string::npos);
  CHECK(!fs::exists(dir / "DONE"));
}

TEST_CASE("mnist SN smoke run when the data is present") {
  const char* env = std::getenv("SNET_DATA_DIR");
  const fs::path root = env ? env : "data/mnist";
  if (!fs::exists(root / "train-images-idx3-ubyte")) {
    MESSAGE("MNIST not found under " << root.string() << "; skipping");
    return;
  }
  const fs::path dir = scratch() / "mnist_sn";
  const Result r = snet("run --task mnist --mode SN --seed 1 --out \"" + dir.string() +
                        "\" --set epochs=1 --set train_limit=2000 --set test_limit=500"
                        " --set data_dir=" + root.string());
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const std::string m = slurp(dir / "metrics.csv");
  CHECK(m.find(",1,test_accuracy,") != std::string::npos);
  CHECK(m.find(",1,mean_screener_weight,") != std::string::npos);
  CHECK(fs::exists(dir / "extremes"));
}

TEST_CASE("compare: identical runs, truncation, thresholds, merged CSV") {
  const std::string a = cartpole_run("cmp_a", 1000);
  const std::string b = cartpole_run("cmp_b", 1000);
  const Result same = snet("compare \"" + a + "\" \"" + b + "\"");
  REQUIRE_MESSAGE(same.code == 0, same.err);
  const auto lines = lines_after_dir(same.out);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == lines[1]);
  CHECK(same.out.find("note:") == std::string::npos);

  const std::string longer = cartpole_run("cmp_long", 2000);
  const fs::path merged = scratch() / "merged.csv";
  const Result trunc = snet("compare \"" + a + "\" \"" + longer +
                            "\" --threshold eval_mean_reward=100000 --merged-csv \"" +
                            merged.string() + "\"");
  REQUIRE_MESSAGE(trunc.code == 0, trunc.err);
  CHECK(trunc.out.find("different lengths") != std::string::npos);
  CHECK(trunc.out.find("never") != std::string::npos);
  const std::string csv = slurp(merged);
  CHECK(csv.rfind("run,mode,step_or_epoch,metric_name,value\n", 0) == 0);
  CHECK(csv.find(",1500,") == std::string::npos);  // truncated to the shorter run

  const Result reached = snet("compare \"" + a + "\" \"" + b + "\" --threshold eval_mean_reward=0");
  CHECK(reached.out.find("first_step(eval_mean_reward>=0)=500") != std::string::npos);
}

TEST_CASE("compare rejects mismatched tasks and reports incomplete runs") {
  const std::string a = cartpole_run("mix_a", 500);
  const fs::path syn = scratch() / "mix_syn";
  REQUIRE(snet("run --task synthetic --out \"" + syn.string() +
               "\" --set epochs=1 --set synthetic_n=100").code == 0);
  const Result mixed = snet("compare \"" + a + "\" \"" + syn.string() + "\"");
  CHECK(mixed.code != 0);
  CHECK(mixed.err.find("task") != std::string::npos);

  const std::string b = cartpole_run("mix_b", 500);
  const std::string c = cartpole_run("mix_c", 500);
  fs::remove(fs::path(c) / "DONE");
  const Result partial = snet("compare \"" + a + "\" \"" + b + "\" \"" + c + "\"");
  CHECK(partial.code == 0);
  CHECK(partial.out.find("incomplete: " + c) != std::string::npos);
}
