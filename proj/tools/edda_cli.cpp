// Copyright 2026 The EDDA Authors.
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


// Command-line front end: synth | align | train | eval.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "edda/edda.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

// Thrown to unwind with a C API failure.
struct ApiFailure {
  edda_status status;
};

void check(edda_status status) {
  if (status != EDDA_OK) throw ApiFailure{status};
}

int exit_code(edda_status status) {
  return status == EDDA_ERR_INVALID_ARGUMENT ? kExitUsage : kExitData;
}

template <typename T, void (*Destroy)(T*)>
struct Deleter {
  void operator()(T* p) const { Destroy(p); }
};
using ConfigPtr = std::unique_ptr<edda_config, Deleter<edda_config, edda_config_destroy>>;
using DatasetPtr =
    std::unique_ptr<edda_dataset, Deleter<edda_dataset, edda_dataset_destroy>>;
using PairsPtr = std::unique_ptr<edda_pairs, Deleter<edda_pairs, edda_pairs_destroy>>;
using ModelPtr = std::unique_ptr<edda_model, Deleter<edda_model, edda_model_destroy>>;
using ReportPtr = std::unique_ptr<edda_report, Deleter<edda_report, edda_report_destroy>>;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> variant;
  std::optional<std::string> encoder;
  std::optional<std::string> beta;
  std::optional<int> k;
  std::optional<int> walk_length;
  std::optional<int> num_walks;
  std::optional<int> epochs;
  std::vector<std::string> overrides;  // key=value

  std::string data;
  std::string pairs;
  std::string checkpoint;
  std::string spec;
  std::string out;
  std::string split = "test";
  bool force = false;
};

void add_run_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config_path, "key = value configuration file");
  cmd->add_option("--seed", o.seed, "root seed");
  cmd->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--variant", o.variant, "edda | wo-da | inter | intra | ed-mf");
  cmd->add_option("--encoder", o.encoder, "grec | mf");
  cmd->add_option("--beta", o.beta, "alignment weight");
  cmd->add_option("--k", o.k, "similar nodes kept per node");
  cmd->add_option("--walk-length", o.walk_length, "random-walk length");
  cmd->add_option("--num-walks", o.num_walks, "walks per node");
  cmd->add_option("--epochs", o.epochs, "training epochs");
  cmd->add_option("--set", o.overrides, "extra config override key=value");
}

ConfigPtr make_config(const Options& o) {
  edda_config* raw = nullptr;
  check(edda_config_create(&raw));
  ConfigPtr config(raw);
  if (!o.config_path.empty()) check(edda_config_load_file(config.get(), o.config_path.c_str()));
  const auto set = [&](const char* key, const std::string& value) {
    check(edda_config_set(config.get(), key, value.c_str()));
  };
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw CLI::ValidationError("--set", "expected key=value, got '" + kv + "'");
    }
    set(kv.substr(0, eq).c_str(), kv.substr(eq + 1));
  }
  if (o.seed) set("seed", std::to_string(*o.seed));
  if (o.threads) set("threads", std::to_string(*o.threads));
  if (o.variant) set("variant", *o.variant);
  if (o.encoder) set("encoder", *o.encoder);
  if (o.beta) set("beta", *o.beta);
  if (o.k) set("k", std::to_string(*o.k));
  if (o.walk_length) set("walk_length", std::to_string(*o.walk_length));
  if (o.num_walks) set("num_walks", std::to_string(*o.num_walks));
  if (o.epochs) set("epochs", std::to_string(*o.epochs));
  return config;
}

DatasetPtr load_dataset(const edda_config* config, const std::string& path) {
  edda_dataset* raw = nullptr;
  check(edda_dataset_load(config, path.c_str(), &raw));
  return DatasetPtr(raw);
}

void make_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    std::cerr << "edda: cannot create " << dir << ": " << ec.message() << '\n';
    throw ApiFailure{EDDA_ERR_IO};
  }
}

void write_manifest(const edda_config* config, const char* command,
                    const std::vector<std::string>& inputs, const std::string& out_dir) {
  std::vector<const char*> paths;
  for (const auto& p : inputs) paths.push_back(p.c_str());
  const auto target = (fs::path(out_dir) / "run_manifest.txt").string();
  check(edda_manifest_write(config, command, paths.data(), paths.size(), target.c_str()));
}

// Pair files of a directory, sorted, for hashing into the manifest.
std::vector<std::string> pair_files(const std::string& dir) {
  std::vector<std::string> out;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("pairs_", 0) == 0 && entry.path().extension() == ".tsv") {
      out.push_back(entry.path().string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

int run_synth(const Options& o) {
  const std::uint64_t seed = o.seed.value_or(0);
  check(edda_synth(o.spec.c_str(), o.seed ? &seed : nullptr, o.out.c_str()));
  std::cout << "wrote synthetic dataset to " << o.out << '\n';
  return kExitOk;
}

int run_align(const Options& o) {
  auto config = make_config(o);
  auto dataset = load_dataset(config.get(), o.data);
  make_out_dir(o.out);
  if (edda_dataset_num_domains(dataset.get()) < 2) {
    std::cout << "notice: dataset has a single domain; no pairs to mine\n";
    write_manifest(config.get(), "align", {o.data}, o.out);
    return kExitOk;
  }
  edda_pairs* raw = nullptr;
  check(edda_pairs_mine(config.get(), dataset.get(), &raw));
  PairsPtr pairs(raw);
  std::size_t files = 0;
  check(edda_pairs_write_dir(pairs.get(), o.out.c_str(), &files));
  write_manifest(config.get(), "align", {o.data}, o.out);
  std::cout << "mined " << edda_pairs_count(pairs.get()) << " pairs into " << files
            << " files\n";
  return kExitOk;
}

int run_train(const Options& o) {
  auto config = make_config(o);
  auto dataset = load_dataset(config.get(), o.data);
  PairsPtr pairs;
  std::vector<std::string> inputs = {o.data};
  if (!o.pairs.empty()) {
    edda_pairs* raw = nullptr;
    check(edda_pairs_read_dir(dataset.get(), o.pairs.c_str(), &raw));
    pairs.reset(raw);
    for (auto& f : pair_files(o.pairs)) inputs.push_back(std::move(f));
  }
  make_out_dir(o.out);
  const auto log_path = (fs::path(o.out) / "train_log.tsv").string();
  edda_model* raw = nullptr;
  check(edda_model_train(config.get(), dataset.get(), pairs.get(), log_path.c_str(), &raw));
  ModelPtr model(raw);
  check(edda_model_save(model.get(), o.out.c_str()));
  write_manifest(config.get(), "train", inputs, o.out);
  std::printf("validation AUC %.6f Recall@1 %.6f\n", edda_model_validation_auc(model.get()),
              edda_model_validation_recall(model.get()));
  return kExitOk;
}

int run_eval(const Options& o) {
  auto config = make_config(o);
  auto dataset = load_dataset(config.get(), o.data);
  edda_model* raw = nullptr;
  check(edda_model_load(config.get(), dataset.get(), o.checkpoint.c_str(), o.force ? 1 : 0,
                        &raw));
  ModelPtr model(raw);
  edda_report* report_raw = nullptr;
  check(edda_evaluate(config.get(), dataset.get(), model.get(), o.split == "test" ? 1 : 0,
                      &report_raw));
  ReportPtr report(report_raw);
  make_out_dir(o.out);
  const auto report_path = (fs::path(o.out) / "report.tsv").string();
  check(edda_report_write(report.get(), report_path.c_str()));
  std::vector<std::string> inputs = {o.data,
                                     (fs::path(o.checkpoint) / "manifest.txt").string()};
  write_manifest(config.get(), "eval", inputs, o.out);
  for (std::size_t r = 0; r < edda_report_num_rows(report.get()); ++r) {
    edda_report_row row;
    check(edda_report_row_at(report.get(), r, &row));
    std::printf("%s\tAUC %.4f\tRecall@1 %.4f\n", row.domain, row.auc, row.recall_at_1);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EDDA multi-domain recommender"};
  app.require_subcommand(1);
  Options o;

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  synth->add_option("--spec", o.spec, "synthetic spec file")->required();
  synth->add_option("--seed", o.seed, "overrides the spec seed");
  synth->add_option("--out", o.out, "output directory")->required();

  auto* align = app.add_subcommand("align", "mine cross-domain similar pairs");
  align->add_option("--data", o.data, "interaction file")->required();
  align->add_option("--out", o.out, "output directory")->required();
  add_run_flags(align, o);

  auto* train = app.add_subcommand("train", "train a model");
  train->add_option("--data", o.data, "interaction file")->required();
  train->add_option("--pairs", o.pairs, "directory written by align");
  train->add_option("--out", o.out, "checkpoint directory")->required();
  add_run_flags(train, o);

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  eval->add_option("--data", o.data, "interaction file")->required();
  eval->add_option("--checkpoint", o.checkpoint, "checkpoint directory")->required();
  eval->add_option("--out", o.out, "report directory")->required();
  eval->add_option("--split", o.split, "test | validation")
      ->check(CLI::IsMember({"test", "validation"}));
  eval->add_flag("--force", o.force, "evaluate despite a split/data mismatch");
  add_run_flags(eval, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (synth->parsed()) return run_synth(o);
    if (align->parsed()) return run_align(o);
    if (train->parsed()) return run_train(o);
    return run_eval(o);
  } catch (const ApiFailure& f) {
    const char* message = edda_last_error();
    std::cerr << "edda: " << edda_status_string(f.status);
    if (message[0] != '\0') std::cerr << ": " << message;
    std::cerr << '\n';
    return exit_code(f.status);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "edda: " << e.what() << '\n';
    return kExitUsage;
  }
}
