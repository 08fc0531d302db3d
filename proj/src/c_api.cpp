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


#include "edda/edda.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "edda/config.hpp"
#include "edda/edmodel.hpp"
#include "edda/error.hpp"
#include "edda/evalkit.hpp"
#include "edda/keyvalue.hpp"
#include "edda/mdgraph.hpp"
#include "edda/synthgen.hpp"
#include "edda/trainer.hpp"
#include "edda/walker.hpp"

namespace fs = std::filesystem;

struct edda_config {
  edda::RunConfig run;
};

struct edda_dataset {
  std::string data_hash;
  std::uint64_t split_seed = 0;
  edda::MultiDomainDataset full;
  edda::SplitDataset split;
  edda::MultiDomainDataset train;
  std::vector<edda::EvalCases> validation;
  std::vector<edda::EvalCases> test;
};

struct edda_pairs {
  std::vector<edda::SimilarPairSet> sets;
};

struct edda_model {
  edda::EDModel model;
  edda::KeyValueFile info;
  double val_auc = std::numeric_limits<double>::quiet_NaN();
  double val_recall = std::numeric_limits<double>::quiet_NaN();
};

struct edda_report {
  std::vector<edda::ReportRow> rows;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
edda_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return EDDA_OK;
  } catch (const edda::InvalidArgument& e) {
    g_last_error = e.what();
    return EDDA_ERR_INVALID_ARGUMENT;
  } catch (const edda::IoError& e) {
    g_last_error = e.what();
    return EDDA_ERR_IO;
  } catch (const edda::DataError& e) {
    g_last_error = e.what();
    return EDDA_ERR_DATA;
  } catch (const edda::NumericError& e) {
    g_last_error = e.what();
    return EDDA_ERR_NUMERIC;
  } catch (const edda::MismatchError& e) {
    g_last_error = e.what();
    return EDDA_ERR_MISMATCH;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return EDDA_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return EDDA_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return EDDA_ERR_INTERNAL;
  }
}

void require(const void* p, const char* name) {
  if (p == nullptr) throw edda::InvalidArgument(std::string(name) + " is null");
}

void make_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw edda::IoError("cannot create " + dir + ": " + ec.message());
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw edda::IoError("cannot write " + path.string());
  return out;
}

edda::ValidationMetrics mean_metrics(const std::vector<edda::DomainMetrics>& per_domain) {
  edda::ValidationMetrics m;
  std::size_t counted = 0;
  for (const auto& d : per_domain) {
    if (d.num_cases == 0) continue;
    m.auc += d.auc;
    m.recall_at_1 += d.recall_at_1;
    ++counted;
  }
  if (counted == 0) return {0.5, 0.0};
  m.auc /= static_cast<double>(counted);
  m.recall_at_1 /= static_cast<double>(counted);
  return m;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

extern "C" {

const char* edda_version(void) { return "0.1.0"; }

const char* edda_status_string(edda_status status) {
  switch (status) {
    case EDDA_OK:
      return "ok";
    case EDDA_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case EDDA_ERR_IO:
      return "i/o error";
    case EDDA_ERR_DATA:
      return "data error";
    case EDDA_ERR_NUMERIC:
      return "numeric error";
    case EDDA_ERR_MISMATCH:
      return "mismatch";
    case EDDA_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char* edda_last_error(void) { return g_last_error.c_str(); }

edda_status edda_config_create(edda_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new edda_config();
  });
}

void edda_config_destroy(edda_config* config) { delete config; }

edda_status edda_config_set(edda_config* config, const char* key, const char* value) {
  return guarded([&] {
    require(config, "config");
    require(key, "key");
    require(value, "value");
    config->run.set(key, value);
  });
}

edda_status edda_config_load_file(edda_config* config, const char* path) {
  return guarded([&] {
    require(config, "config");
    require(path, "path");
    config->run.apply(edda::KeyValueFile::read(path));
  });
}

edda_status edda_config_write(const edda_config* config, const char* path) {
  return guarded([&] {
    require(config, "config");
    require(path, "path");
    config->run.to_key_values().write(std::string(path));
  });
}

edda_status edda_synth(const char* spec_path, const uint64_t* seed, const char* out_dir) {
  return guarded([&] {
    require(spec_path, "spec_path");
    require(out_dir, "out_dir");
    edda::KeyValueFile file = edda::KeyValueFile::read(spec_path);
    if (seed != nullptr) file.set("seed", std::to_string(*seed));
    const edda::SynthSpec spec = edda::synth_spec_from(file);
    const edda::SynthData data = edda::generate(spec);

    make_dir(out_dir);
    const fs::path root(out_dir);
    {
      auto out = open_out(root / "interactions.tsv");
      edda::write_interactions(out, data.interactions);
    }
    {
      auto out = open_out(root / "latents.tsv");
      edda::write_latents(out, data.latents);
    }
    edda::KeyValueFile manifest = edda::to_key_values(spec);
    manifest.set("command", "synth");
    manifest.set("spec_hash", edda::file_hash(spec_path));
    manifest.set("interactions_hash", edda::file_hash((root / "interactions.tsv").string()));
    manifest.write((root / "manifest.txt").string());
  });
}

edda_status edda_dataset_load(const edda_config* config, const char* path,
                              edda_dataset** out) {
  return guarded([&] {
    require(config, "config");
    require(path, "path");
    require(out, "out");
    const auto& run = config->run;
    run.validate();
    auto records = edda::read_interaction_file(path);
    auto full = edda::ingest(records);
    auto split = edda::split(full, run.split_ratios, run.split_seed());
    auto train = split.train_dataset();
    std::vector<edda::EvalCases> validation;
    std::vector<edda::EvalCases> test;
    for (edda::DomainId d = 0; d < full.num_domains(); ++d) {
      validation.push_back(edda::build_eval_cases(split, train, d,
                                                   edda::EvalSet::kValidation,
                                                   run.eval_seed()));
      test.push_back(
          edda::build_eval_cases(split, train, d, edda::EvalSet::kTest, run.eval_seed()));
    }
    *out = new edda_dataset{edda::file_hash(path), run.split_seed(), std::move(full),
                            std::move(split),      std::move(train),  std::move(validation),
                            std::move(test)};
  });
}

void edda_dataset_destroy(edda_dataset* dataset) { delete dataset; }

size_t edda_dataset_num_domains(const edda_dataset* dataset) {
  return dataset == nullptr ? 0 : dataset->full.num_domains();
}

edda_status edda_dataset_domain_stats(const edda_dataset* dataset, uint32_t domain,
                                      edda_domain_stats* out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(out, "out");
    if (domain >= dataset->full.num_domains()) {
      throw edda::InvalidArgument("domain out of range");
    }
    const auto& g = dataset->full.domain(domain);
    out->users = g.num_users();
    out->items = g.num_items();
    out->interactions = g.num_edges();
    out->train_interactions = dataset->train.domain(domain).num_edges();
    out->validation_cases = dataset->validation[domain].cases.size();
    out->test_cases = dataset->test[domain].cases.size();
  });
}

edda_status edda_pairs_mine(const edda_config* config, const edda_dataset* dataset,
                            edda_pairs** out) {
  return guarded([&] {
    require(config, "config");
    require(dataset, "dataset");
    require(out, "out");
    const auto& run = config->run;
    auto sets = edda::mine_all_pairs(dataset->train, run.train.k, run.walk_config(),
                                     run.threads);
    *out = new edda_pairs{std::move(sets)};
  });
}

edda_status edda_pairs_write_dir(const edda_pairs* pairs, const char* dir,
                                 size_t* files_written) {
  return guarded([&] {
    require(pairs, "pairs");
    require(dir, "dir");
    make_dir(dir);
    std::size_t files = 0;
    std::vector<std::pair<edda::DomainId, edda::DomainId>> keys;
    for (const auto& set : pairs->sets) {
      const auto [a, b] = set.domain_pair;
      const std::pair key{std::min(a, b), std::max(a, b)};
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
    }
    for (const auto& [a, b] : keys) {
      std::vector<edda::SimilarPairSet> group;
      for (const auto& set : pairs->sets) {
        const auto [x, y] = set.domain_pair;
        if (std::min(x, y) == a && std::max(x, y) == b) group.push_back(set);
      }
      auto out = open_out(fs::path(dir) /
                          ("pairs_" + std::to_string(a) + "_" + std::to_string(b) + ".tsv"));
      edda::write_pairs(out, group);
      ++files;
    }
    if (files_written != nullptr) *files_written = files;
  });
}

edda_status edda_pairs_read_dir(const edda_dataset* dataset, const char* dir,
                                edda_pairs** out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(dir, "dir");
    require(out, "out");
    if (!fs::is_directory(dir)) throw edda::IoError(std::string("not a directory: ") + dir);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      const auto name = entry.path().filename().string();
      if (name.rfind("pairs_", 0) == 0 && entry.path().extension() == ".tsv") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    auto result = std::make_unique<edda_pairs>();
    for (const auto& file : files) {
      std::ifstream in(file);
      if (!in) throw edda::IoError("cannot open " + file.string());
      auto sets = edda::read_pairs(in);
      for (auto& s : sets) result->sets.push_back(std::move(s));
    }
    // Validates every node against the training graph.
    edda::resolve_pairs(dataset->train, result->sets);
    *out = result.release();
  });
}

size_t edda_pairs_count(const edda_pairs* pairs) {
  if (pairs == nullptr) return 0;
  std::size_t n = 0;
  for (const auto& set : pairs->sets) n += set.pairs.size();
  return n;
}

void edda_pairs_destroy(edda_pairs* pairs) { delete pairs; }

edda_status edda_model_train(const edda_config* config, const edda_dataset* dataset,
                             const edda_pairs* pairs, const char* log_path,
                             edda_model** out) {
  return guarded([&] {
    require(config, "config");
    require(dataset, "dataset");
    require(out, "out");
    const auto& run = config->run;
    run.validate();
    edda::TrainConfig cfg = run.train_config();
    std::vector<edda::SimilarPairSet> sets;
    if (pairs != nullptr && run.uses_alignment()) sets = pairs->sets;
    if (sets.empty()) cfg.beta = 0.0;

    edda::EDModel model = edda::init_model(run.model_spec(), dataset->train, run.init_seed());

    std::ofstream log;
    if (log_path != nullptr) {
      log = open_out(log_path);
      log << "#epoch\tL_BPR\tL_align\tL_total\tval_AUC\tval_Recall@1\twall_ms\n";
    }
    edda::TrainCallbacks callbacks;
    callbacks.validate = [&](const edda::EDModel& m) {
      return mean_metrics(
          edda::evaluate_all(m, dataset->train, dataset->validation, run.threads));
    };
    callbacks.on_epoch = [&](const edda::EpochLog& entry, const edda::EDModel&) {
      if (log.is_open()) edda::write_epoch_log(log, entry, !run.determinism);
    };
    edda::train(model, dataset->train, sets, cfg, callbacks);

    const auto final_metrics = mean_metrics(
        edda::evaluate_all(model, dataset->train, dataset->validation, run.threads));
    edda::KeyValueFile info;
    info.set("data_hash", dataset->data_hash);
    info.set("split_seed", hex(dataset->split_seed));
    info.set("seed", std::to_string(run.seed));
    info.set("variant", edda::to_string(run.variant));
    *out = new edda_model{std::move(model), std::move(info), final_metrics.auc,
                          final_metrics.recall_at_1};
  });
}

edda_status edda_model_save(const edda_model* model, const char* dir) {
  return guarded([&] {
    require(model, "model");
    require(dir, "dir");
    edda::save_checkpoint(model->model, dir, model->info);
  });
}

edda_status edda_model_load(const edda_config* config, const edda_dataset* dataset,
                            const char* dir, int force, edda_model** out) {
  return guarded([&] {
    require(config, "config");
    require(dataset, "dataset");
    require(dir, "dir");
    require(out, "out");
    auto [model, manifest] = edda::load_checkpoint(dir, dataset->train);
    if (force == 0) {
      const auto hash = manifest.get("data_hash");
      if (hash && *hash != dataset->data_hash) {
        throw edda::MismatchError("checkpoint was trained on different data");
      }
      const auto seed = manifest.get("split_seed");
      if (seed && *seed != hex(dataset->split_seed)) {
        throw edda::MismatchError("checkpoint was trained with a different split seed");
      }
    }
    *out = new edda_model{std::move(model), std::move(manifest)};
  });
}

void edda_model_destroy(edda_model* model) { delete model; }

size_t edda_model_num_parameters(const edda_model* model) {
  return model == nullptr ? 0 : model->model.num_parameters();
}

double edda_model_validation_auc(const edda_model* model) {
  return model == nullptr ? std::numeric_limits<double>::quiet_NaN() : model->val_auc;
}

double edda_model_validation_recall(const edda_model* model) {
  return model == nullptr ? std::numeric_limits<double>::quiet_NaN() : model->val_recall;
}

edda_status edda_model_score(const edda_model* model, const edda_dataset* dataset,
                             uint32_t domain, uint64_t user, uint64_t item, double* out) {
  return guarded([&] {
    require(model, "model");
    require(dataset, "dataset");
    require(out, "out");
    if (domain >= dataset->train.num_domains()) {
      throw edda::InvalidArgument("domain out of range");
    }
    *out = edda::score(model->model, dataset->train, user, item, domain);
  });
}

edda_status edda_model_recommend(const edda_model* model, const edda_dataset* dataset,
                                 uint32_t domain, uint64_t user, size_t n, uint64_t* items,
                                 double* scores, size_t* count) {
  return guarded([&] {
    require(model, "model");
    require(dataset, "dataset");
    require(count, "count");
    if (n > 0) {
      require(items, "items");
      require(scores, "scores");
    }
    if (domain >= dataset->train.num_domains()) {
      throw edda::InvalidArgument("domain out of range");
    }
    const auto& g = dataset->train.domain(domain);
    std::vector<std::uint64_t> exclude;
    if (const auto u = g.local_index(edda::user_node(user))) {
      for (const auto i : g.neighbors(*u)) exclude.push_back(g.node(i).id);
    }
    std::sort(exclude.begin(), exclude.end());
    const auto top = edda::recommend_topn(model->model, dataset->train, user, domain, n,
                                          exclude);
    for (std::size_t k = 0; k < top.size(); ++k) {
      items[k] = top[k].item;
      scores[k] = top[k].score;
    }
    *count = top.size();
  });
}

edda_status edda_evaluate(const edda_config* config, const edda_dataset* dataset,
                          const edda_model* model, int test_set, edda_report** out) {
  return guarded([&] {
    require(config, "config");
    require(dataset, "dataset");
    require(model, "model");
    require(out, "out");
    const auto& cases = test_set != 0 ? dataset->test : dataset->validation;
    const auto metrics =
        edda::evaluate_all(model->model, dataset->train, cases, config->run.threads);
    *out = new edda_report{edda::build_report(dataset->train, metrics)};
  });
}

size_t edda_report_num_rows(const edda_report* report) {
  return report == nullptr ? 0 : report->rows.size();
}

edda_status edda_report_row_at(const edda_report* report, size_t index,
                               edda_report_row* out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    if (index >= report->rows.size()) throw edda::InvalidArgument("row out of range");
    const auto& r = report->rows[index];
    *out = {r.domain.c_str(), r.auc, r.recall_at_1, r.num_cases, r.domain_size,
            r.out_of_domain_interaction};
  });
}

edda_status edda_report_write(const edda_report* report, const char* path) {
  return guarded([&] {
    require(report, "report");
    require(path, "path");
    auto out = open_out(path);
    edda::write_report(out, report->rows);
  });
}

void edda_report_destroy(edda_report* report) { delete report; }

edda_status edda_manifest_write(const edda_config* config, const char* command,
                                const char* const* input_paths, size_t num_inputs,
                                const char* out_path) {
  return guarded([&] {
    require(config, "config");
    require(command, "command");
    require(out_path, "out_path");
    if (num_inputs > 0) require(input_paths, "input_paths");
    const auto& run = config->run;
    edda::KeyValueFile manifest = run.to_key_values();
    manifest.set("command", command);
    manifest.set("split_seed", hex(run.split_seed()));
    manifest.set("eval_seed", hex(run.eval_seed()));
    manifest.set("init_seed", hex(run.init_seed()));
    manifest.set("walk_seed", hex(run.walk_seed()));
    manifest.set("train_seed", hex(run.train_seed()));
    for (std::size_t k = 0; k < num_inputs; ++k) {
      require(input_paths[k], "input path");
      const std::string key = "input." + std::to_string(k);
      manifest.set(key + ".path", fs::path(input_paths[k]).filename().string());
      manifest.set(key + ".hash", edda::file_hash(input_paths[k]));
    }
    manifest.write(std::string(out_path));
  });
}

}  // extern "C"
