// Copyright 2026 The infracls Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "cli.hpp"
#include "helpers.hpp"
#include "infracls/dataset.hpp"
#include "infracls/wavelet.hpp"

namespace infracls {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string log;
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream log;
  const int code = cli::run(args, log);
  return {code, log.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit with 1") {
    CHECK(run_cli({}).code == cli::kUsageError);
    CHECK(run_cli({"frobnicate"}).code == cli::kUsageError);
    CHECK(run_cli({"synth"}).code == cli::kUsageError);  // --out is required
    CHECK(run_cli({"synth", "--out", "x.csv", "--n", "abc"}).code == cli::kUsageError);
    const auto dir = testing::scratch_dir("cli_usage");
    const Outcome bad_n = run_cli({"synth", "--n", "7", "--out", (dir / "d.csv").string()});
    CHECK(bad_n.code == cli::kUsageError);
    CHECK(bad_n.log.find("multiple of 8") != std::string::npos);
    CHECK(run_cli({"train", "--data", "x.csv", "--approach", "fft"}).code == cli::kUsageError);
    const Outcome help = run_cli({"--help"});
    CHECK(help.code == cli::kOk);
    CHECK(help.log.find("cwt-export") != std::string::npos);
  }

  TEST_CASE("synth writes the dataset and a manifest") {
    const auto dir = testing::scratch_dir("cli_synth");
    const Outcome out = run_cli({"synth", "--n", "2400", "--seed", "42", "--out", (dir / "data.csv").string()});
    REQUIRE(out.code == cli::kOk);
    CHECK(out.log.find("resolved config") != std::string::npos);
    const SignalDataset ds = load_dataset(dir / "data.csv");
    CHECK(ds.size() == 2400);
    CHECK(ds.length == 94);
    const nlohmann::json manifest = read_json(dir / "data.csv.manifest.json");
    CHECK(manifest.at("config").at("seed") == 42);
    CHECK(manifest.at("outputs").at("data.csv").get<std::string>().rfind("fnv1a64:", 0) == 0);

    // Same arguments, same bytes.
    REQUIRE(run_cli({"synth", "--n", "2400", "--seed", "42", "--out", (dir / "again.csv").string()}).code == 0);
    CHECK(slurp(dir / "data.csv") == slurp(dir / "again.csv"));
  }

  TEST_CASE("data problems exit with 2") {
    const auto dir = testing::scratch_dir("cli_data");
    CHECK(run_cli({"train", "--data", (dir / "missing.csv").string(), "--out", (dir / "run").string()}).code ==
          cli::kDataError);
    std::ofstream(dir / "ragged.csv") << "0,1,2,3\n1,1,2\n";
    const Outcome ragged = run_cli({"train", "--data", (dir / "ragged.csv").string(), "--out", (dir / "run").string()});
    CHECK(ragged.code == cli::kDataError);
    CHECK(ragged.log.find(":2:") != std::string::npos);
    CHECK(run_cli({"eval", "--checkpoint", (dir / "none.ckpt").string(), "--data", (dir / "ragged.csv").string()})
              .code == cli::kDataError);
  }

  TEST_CASE("config files fill in flags and reject unknown keys") {
    const auto dir = testing::scratch_dir("cli_config");
    std::ofstream(dir / "synth.cfg") << "# dataset settings\nn = 16\nseed = 9\nout = " << (dir / "cfg.csv").string()
                                     << "\n";
    REQUIRE(run_cli({"synth", "--config", (dir / "synth.cfg").string()}).code == cli::kOk);
    CHECK(load_dataset(dir / "cfg.csv").size() == 16);

    // Flags win over the file.
    REQUIRE(run_cli({"synth", "--config", (dir / "synth.cfg").string(), "--n", "24"}).code == cli::kOk);
    CHECK(load_dataset(dir / "cfg.csv").size() == 24);

    std::ofstream(dir / "bad.cfg") << "n = 16\ncolour = blue\n";
    const Outcome bad = run_cli({"synth", "--config", (dir / "bad.cfg").string(), "--out", "x.csv"});
    CHECK(bad.code == cli::kUsageError);
    CHECK(bad.log.find("colour") != std::string::npos);
    std::ofstream(dir / "syntax.cfg") << "n 16\n";
    CHECK(run_cli({"synth", "--config", (dir / "syntax.cfg").string(), "--out", "x.csv"}).code == cli::kUsageError);
    CHECK(run_cli({"synth", "--config", (dir / "absent.cfg").string(), "--out", "x.csv"}).code == cli::kUsageError);
  }

  TEST_CASE("train, eval, predict and cwt-export work end to end") {
    const auto dir = testing::scratch_dir("cli_pipeline");
    const std::string data = (dir / "data.csv").string();
    REQUIRE(run_cli({"synth", "--n", "160", "--seed", "3", "--out", data}).code == cli::kOk);

    const std::vector<std::string> train_args{"train", "--data", data, "--epochs", "2", "--batch-size", "32",
                                              "--seed", "7", "--lr", "1e-3", "--out", (dir / "run").string()};
    const Outcome trained = run_cli(train_args);
    INFO(trained.log);
    REQUIRE(trained.code == cli::kOk);
    for (const char* f : {"history.json", "model.ckpt", "last.ckpt", "report.json", "manifest.json"}) {
      CHECK(fs::exists(dir / "run" / f));
    }
    const nlohmann::json history = read_json(dir / "run" / "history.json");
    CHECK(history.at("epochs").size() == 2);
    const nlohmann::json manifest = read_json(dir / "run" / "manifest.json");
    CHECK(manifest.at("config").at("seed") == 7);
    CHECK(manifest.at("config").at("lr_policy").at("kind") == "fixed");
    CHECK(manifest.at("outputs").contains("model.ckpt"));

    // A repeated run reproduces the history byte for byte.
    std::vector<std::string> again(train_args);
    again.back() = (dir / "run2").string();
    REQUIRE(run_cli(again).code == cli::kOk);
    CHECK(slurp(dir / "run" / "history.json") == slurp(dir / "run2" / "history.json"));

    const std::string report = (dir / "eval.json").string();
    REQUIRE(run_cli({"eval", "--checkpoint", (dir / "run" / "last.ckpt").string(), "--data", data, "--out", report})
                .code == cli::kOk);
    const nlohmann::json eval = read_json(report);
    CHECK(eval.at("count") == 32);
    CHECK(eval.at("accuracy") == read_json(dir / "run" / "report.json").at("accuracy"));

    const std::string predictions = (dir / "pred.json").string();
    REQUIRE(run_cli({"predict", "--checkpoint", (dir / "run" / "model.ckpt").string(), "--input", data, "--out",
                     predictions})
                .code == cli::kOk);
    const nlohmann::json pred = read_json(predictions).at("predictions");
    REQUIRE(pred.size() == 160);
    CHECK(pred[5].at("index") == 5);
    double total = 0.0;
    for (double p : pred[0].at("probabilities")) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

    const fs::path images = dir / "png";
    REQUIRE(run_cli({"cwt-export", "--data", data, "--out", images.string()}).code == cli::kOk);
    std::size_t count = 0;
    for (const auto& e : fs::directory_iterator(images)) count += e.path().extension() == ".png" ? 1 : 0;
    CHECK(count == 160);
    const RgbImage img = read_png(images / "data_9_1.png");
    CHECK(img.height == 94);
    CHECK(img.width == 94);
  }

  TEST_CASE("lr-find writes its curve") {
    const auto dir = testing::scratch_dir("cli_lrfind");
    const std::string data = (dir / "data.csv").string();
    REQUIRE(run_cli({"synth", "--n", "128", "--out", data}).code == cli::kOk);
    const std::string out = (dir / "lr.json").string();
    const Outcome r = run_cli({"lr-find", "--data", data, "--iters", "12", "--batch-size", "32", "--start", "1e-5",
                               "--end", "1", "--out", out});
    INFO(r.log);
    REQUIRE(r.code == cli::kOk);
    const nlohmann::json j = read_json(out);
    CHECK(j.at("lrs").size() == j.at("losses").size());
    CHECK(j.contains("suggestion"));
    CHECK(run_cli({"lr-find", "--data", data, "--start", "1", "--end", "0.1"}).code == cli::kUsageError);
  }

  TEST_CASE("numeric blow-ups exit with 3") {
    const auto dir = testing::scratch_dir("cli_numeric");
    const std::string data = (dir / "data.csv").string();
    REQUIRE(run_cli({"synth", "--n", "128", "--out", data}).code == cli::kOk);
    const Outcome r = run_cli({"train", "--data", data, "--epochs", "3", "--batch-size", "32", "--lr", "1e38",
                               "--out", (dir / "run").string()});
    CHECK(r.code == cli::kNumericFailure);
    CHECK(r.log.find("numeric failure") != std::string::npos);
  }
}

}  // namespace
}  // namespace infracls
