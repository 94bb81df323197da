// pausekit/cli.hpp

// Copyright 2026  The pausekit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pausekit/acoustics.hpp"
#include "pausekit/error.hpp"
#include "pausekit/io.hpp"
#include "pausekit/labeling.hpp"
#include "pausekit/metrics.hpp"
#include "pausekit/parallel.hpp"
#include "pausekit/train.hpp"
#include "pausekit/transcript.hpp"

namespace pausekit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitUsage = 2;

// Raised for argument problems CLI11 cannot see (e.g. ratio count).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string manifest, criteria, out, audio_dir, vad_config, ref, hyp, ratios = "0.8,0.1,0.1",
      out_prefix, config, trace;
  std::uint64_t seed = 17;
  std::size_t jobs = 0;
  bool per_severity = false;
};

namespace detail {

inline void log_config(std::ostream &err, const std::string &subcommand, nlohmann::json cfg) {
  cfg["subcommand"] = subcommand;
  // Full precision here; small values like epsilon must survive.
  err << cfg.dump() << '\n';
}

inline std::string jsonl(const std::vector<nlohmann::json> &lines, int decimals = 6) {
  std::string out;
  for (const auto &j : lines) out += dump_fixed(j, decimals) + "\n";
  return out;
}

template <typename T>
void sort_by_id(std::vector<T> &items) {
  std::stable_sort(items.begin(), items.end(),
                   [](const T &a, const T &b) { return a.utterance_id < b.utterance_id; });
}

inline PausePosition parse_position(const nlohmann::json &j) {
  const auto s = j.get<std::string>();
  if (s == "within_word") return PausePosition::kWithinWordUnit;
  if (s == "between_words") return PausePosition::kBetweenWordUnits;
  throw Error(ErrorCode::kParse, "unknown pause position '" + s + "'");
}

inline PauseContext context_from_json(const nlohmann::json &j) {
  PauseContext c;
  c.duration_s = j.at("duration_s").get<double>();
  c.position = parse_position(j.at("position"));
  c.preceded_by_filler = j.value("preceded_by_filler", false);
  c.follows_repair_attempt = j.value("follows_repair_attempt", false);
  return c;
}

inline LabelingCriteria criteria_from_json(const nlohmann::json &j) {
  LabelingCriteria c;
  c.long_pause_s = j.value("long_pause_s", c.long_pause_s);
  c.min_pause_s = j.value("min_pause_s", c.min_pause_s);
  c.validate();
  return c;
}

inline VadConfig vad_from_json(const nlohmann::json &j) {
  VadConfig c;
  c.frame_len_s = j.value("frame_len_s", c.frame_len_s);
  c.hop_s = j.value("hop_s", c.hop_s);
  c.energy_percentile = j.value("energy_percentile", c.energy_percentile);
  c.threshold_gain = j.value("threshold_gain", c.threshold_gain);
  c.min_pause_s = j.value("min_pause_s", c.min_pause_s);
  c.ceiling_percentile = j.value("ceiling_percentile", c.ceiling_percentile);
  c.ceiling_ratio = j.value("ceiling_ratio", c.ceiling_ratio);
  c.validate();
  return c;
}

inline nlohmann::json vad_to_json(const VadConfig &c) {
  return {{"frame_len_s", c.frame_len_s},       {"hop_s", c.hop_s},
          {"energy_percentile", c.energy_percentile}, {"threshold_gain", c.threshold_gain},
          {"min_pause_s", c.min_pause_s},       {"ceiling_percentile", c.ceiling_percentile},
          {"ceiling_ratio", c.ceiling_ratio}};
}

inline void print_diagnostics(std::ostream &os, const std::vector<Diagnostic> &diags) {
  for (const auto &d : diags)
    os << dump_fixed(nlohmann::json{{"record", d.record_index + 1},
                                    {"utterance_id", d.utterance_id},
                                    {"kind", std::string(diagnostic_kind_name(d.kind))},
                                    {"message", d.message}})
       << '\n';
}

// ---------------------------------------------------------------------------

inline int run_annotate(const Options &o, std::ostream &out, std::ostream &err) {
  const auto criteria = criteria_from_json(read_json_file(o.criteria));
  log_config(err, "annotate", {{"manifest", o.manifest}, {"criteria", o.criteria}, {"out", o.out},
                               {"long_pause_s", criteria.long_pause_s},
                               {"min_pause_s", criteria.min_pause_s}, {"jobs", resolve_jobs(o.jobs)}});
  const auto raw = read_jsonl(o.manifest);
  std::vector<ManifestRecord> records(raw.size());
  std::vector<std::vector<Diagnostic>> per_record(raw.size());
  parallel_for(raw.size(), resolve_jobs(o.jobs), [&](std::size_t i) {
    const auto &j = raw[i];
    auto fail = [&](DiagnosticKind kind, const std::string &msg) {
      per_record[i].push_back({i, j.is_object() ? j.value("utterance_id", "") : "", kind, msg});
    };
    if (!j.is_object()) return fail(DiagnosticKind::kMalformedLine, "record is not a JSON object");
    try {
      nlohmann::json base = j;
      base.erase("pause_contexts");
      base["ip_labels"] = nlohmann::json::array();
      std::vector<PauseContext> contexts;
      for (const auto &c : j.at("pause_contexts")) contexts.push_back(context_from_json(c));
      const auto t = parse_tagged(j.at("transcript").get<std::string>());
      const auto ann = build_ip_annotation(t, contexts, criteria);
      base["ip_labels"] = ann.labels;
      std::vector<Diagnostic> diags;
      check_record_json(base, i, diags);
      if (!diags.empty()) {
        per_record[i] = std::move(diags);
        return;
      }
      records[i] = record_from_json(base);
    } catch (const Error &e) {
      fail(DiagnosticKind::kMalformedLine, e.what());
    } catch (const nlohmann::json::exception &e) {
      fail(DiagnosticKind::kMissingField, e.what());
    }
  });
  std::vector<Diagnostic> diags;
  for (auto &d : per_record) diags.insert(diags.end(), d.begin(), d.end());
  if (!diags.empty()) {
    print_diagnostics(err, diags);
    return kExitInvalid;
  }
  sort_by_id(records);
  std::vector<nlohmann::json> lines;
  for (const auto &r : records) lines.push_back(record_to_json(r));
  write_file_atomic(o.out, jsonl(lines));
  out << dump_fixed(nlohmann::json{{"annotated", records.size()}, {"out", o.out}}) << '\n';
  return kExitOk;
}

inline int run_detect(const Options &o, std::ostream &out, std::ostream &err) {
  const VadConfig vad = o.vad_config.empty() ? VadConfig{} : vad_from_json(read_json_file(o.vad_config));
  const std::size_t jobs = resolve_jobs(o.jobs);
  log_config(err, "detect-pauses", {{"audio_dir", o.audio_dir}, {"manifest", o.manifest},
                                    {"vad", vad_to_json(vad)}, {"out", o.out}, {"jobs", jobs}});
  struct Item {
    std::string utterance_id, audio_path;
    std::optional<std::size_t> transcript_pauses;
    nlohmann::json result;
  };
  std::vector<Item> items;
  for (const auto &j : read_jsonl(o.manifest)) {
    if (!j.is_object() || !j.contains("utterance_id") || !j.contains("audio_path"))
      throw Error(ErrorCode::kParse, "manifest record without utterance_id/audio_path");
    Item it{j["utterance_id"].get<std::string>(), j["audio_path"].get<std::string>(), {}, {}};
    if (j.contains("transcript") && j["transcript"].is_string())
      it.transcript_pauses = parse_tagged(j["transcript"].get<std::string>()).pause_count();
    items.push_back(std::move(it));
  }
  parallel_for(items.size(), jobs, [&](std::size_t i) {
    auto &it = items[i];
    std::filesystem::path path(it.audio_path);
    if (path.is_relative()) path = std::filesystem::path(o.audio_dir) / path;
    const auto intervals = detect_pause_intervals(read_wav(path.string()), vad);
    nlohmann::json list = nlohmann::json::array();
    for (const auto &iv : intervals) list.push_back({{"start_s", iv.start_s}, {"end_s", iv.end_s}});
    it.result = {{"utterance_id", it.utterance_id},
                 {"intervals", std::move(list)},
                 {"tag_count", intervals_to_tag_count(intervals)}};
    if (it.transcript_pauses) it.result["transcript_pause_count"] = *it.transcript_pauses;
  });
  sort_by_id(items);
  std::vector<nlohmann::json> lines;
  for (auto &it : items) lines.push_back(std::move(it.result));
  write_file_atomic(o.out, jsonl(lines, 3));
  out << dump_fixed(nlohmann::json{{"utterances", items.size()}, {"out", o.out}}) << '\n';
  return kExitOk;
}

inline nlohmann::json counts_json(const EditCounts &c) {
  return {{"substitutions", c.substitutions}, {"deletions", c.deletions},
          {"insertions", c.insertions}, {"ref_len", c.ref_len}};
}

inline nlohmann::json rate_json(const EditCounts &c) {
  const auto r = c.rate_if_defined();
  return r ? nlohmann::json(*r) : nlohmann::json(nullptr);
}

inline nlohmann::json metric_counts_json(const MetricCounts &m) {
  return {{"utterances", m.utterances},
          {"wer", rate_json(m.word)},
          {"cer", rate_json(m.chr)},
          {"pauer", rate_json(m.pause)},
          {"iper", rate_json(m.ip)},
          {"counts",
           {{"word", counts_json(m.word)}, {"char", counts_json(m.chr)},
            {"pause", counts_json(m.pause)}, {"ip", counts_json(m.ip)}}},
          {"ip_coercions", {{"coerced_pauses", m.coerced_pauses}, {"forced_words", m.forced_words}}}};
}

inline nlohmann::json report_json(const CorpusReport &r, bool per_severity) {
  nlohmann::json j{{"overall", metric_counts_json(r.overall)}};
  if (per_severity) {
    nlohmann::json sev = nlohmann::json::object();
    for (const auto &[s, m] : r.per_severity) sev[std::string(severity_name(s))] = metric_counts_json(m);
    j["per_severity"] = std::move(sev);
  }
  return j;
}

inline std::vector<HypRecord> read_hypotheses(const std::string &path) {
  std::vector<HypRecord> hyps;
  std::size_t line = 0;
  for (const auto &j : read_jsonl(path)) {
    ++line;
    try {
      HypRecord h;
      h.utterance_id = j.at("utterance_id").get<std::string>();
      const auto text = j.at("transcript").get<std::string>();
      if (!split_whitespace(text).empty()) h.transcript = parse_tagged(text);
      h.head_labels = j.at("ip_labels").get<std::vector<int>>();
      hyps.push_back(std::move(h));
    } catch (const nlohmann::json::exception &e) {
      throw Error(ErrorCode::kParse, path + " record " + std::to_string(line) + ": " + e.what());
    }
  }
  return hyps;
}

inline int run_score(const Options &o, std::ostream &out, std::ostream &err) {
  const std::size_t jobs = resolve_jobs(o.jobs);
  log_config(err, "score", {{"ref", o.ref}, {"hyp", o.hyp}, {"out", o.out},
                            {"per_severity", o.per_severity}, {"jobs", jobs}});
  auto refs = read_manifest(o.ref);
  sort_by_id(refs);
  const auto hyps = read_hypotheses(o.hyp);
  const auto report = score_corpus(refs, hyps, jobs);
  const auto j = report_json(report, o.per_severity);
  write_file_atomic(o.out, dump_fixed(j, 6, 2) + "\n");
  out << dump_fixed(j.at("overall")) << '\n';
  return kExitOk;
}

inline SplitRatios parse_ratios(const std::string &text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception &) {
      throw UsageError("--ratios: '" + item + "' is not a number");
    }
  }
  if (values.size() != 3) throw UsageError("--ratios needs exactly three values (train,valid,test)");
  SplitRatios r{values[0], values[1], values[2]};
  try {
    r.validate();
  } catch (const Error &e) {
    throw UsageError(std::string("--ratios: ") + e.what());
  }
  return r;
}

inline int run_split(const Options &o, std::ostream &out, std::ostream &err) {
  const auto ratios = parse_ratios(o.ratios);
  std::string prefix = o.out_prefix;
  if (prefix.empty()) {
    std::filesystem::path p(o.manifest);
    prefix = (p.parent_path() / p.stem()).string() + ".";
  }
  log_config(err, "split", {{"manifest", o.manifest}, {"ratios", {ratios.train, ratios.valid, ratios.test}},
                            {"seed", o.seed}, {"out_prefix", prefix}});
  const auto records = read_manifest(o.manifest);
  auto split = stratified_split(records, ratios, o.seed);
  nlohmann::json summary = nlohmann::json::object();
  auto emit = [&](const char *name, std::vector<ManifestRecord> &set) {
    sort_by_id(set);
    std::vector<nlohmann::json> lines;
    std::map<std::string, std::size_t> by_sev;
    for (const auto &r : set) {
      lines.push_back(record_to_json(r));
      ++by_sev[std::string(severity_name(r.severity))];
    }
    write_file_atomic(prefix + name + ".jsonl", jsonl(lines));
    summary[name] = {{"count", set.size()}, {"per_severity", by_sev}};
  };
  emit("train", split.train);
  emit("valid", split.valid);
  emit("test", split.test);
  out << dump_fixed(summary) << '\n';
  return kExitOk;
}

inline TrainConfig train_config_from_json(const nlohmann::json &j) {
  TrainConfig c;
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.steps = j.value("steps", c.steps);
  c.gamma = j.value("gamma", c.gamma);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  c.beta1 = j.value("beta1", c.beta1);
  c.beta2 = j.value("beta2", c.beta2);
  c.epsilon = j.value("epsilon", c.epsilon);
  c.init_scale = j.value("init_scale", c.init_scale);
  c.loss_weights.cross_entropy = j.value("ce_weight", c.loss_weights.cross_entropy);
  c.loss_weights.soft_dtw = j.value("sdtw_weight", c.loss_weights.soft_dtw);
  c.seed = j.value("seed", c.seed);
  c.validate();
  return c;
}

inline nlohmann::json train_config_to_json(const TrainConfig &c) {
  return {{"learning_rate", c.learning_rate}, {"batch_size", c.batch_size}, {"steps", c.steps},
          {"gamma", c.gamma}, {"weight_decay", c.weight_decay}, {"beta1", c.beta1},
          {"beta2", c.beta2}, {"epsilon", c.epsilon}, {"init_scale", c.init_scale},
          {"ce_weight", c.loss_weights.cross_entropy}, {"sdtw_weight", c.loss_weights.soft_dtw},
          {"seed", c.seed}};
}

inline PlantedCorpusConfig planted_from_json(const nlohmann::json &j) {
  PlantedCorpusConfig c;
  c.utterances = j.value("utterances", c.utterances);
  c.vocab_words = j.value("vocab_words", c.vocab_words);
  c.latent_dim = j.value("latent_dim", c.latent_dim);
  c.min_words = j.value("min_words", c.min_words);
  c.max_words = j.value("max_words", c.max_words);
  c.pause_prob = j.value("pause_prob", c.pause_prob);
  c.inappropriate_prob = j.value("inappropriate_prob", c.inappropriate_prob);
  c.latent_scale = j.value("latent_scale", c.latent_scale);
  c.noise = j.value("noise", c.noise);
  c.pad_every = j.value("pad_every", c.pad_every);
  c.prototype_seed = j.value("prototype_seed", c.prototype_seed);
  c.sample_seed = j.value("sample_seed", c.sample_seed);
  return c;
}

inline int run_train(const Options &o, std::ostream &out, std::ostream &err) {
  const auto cfg_json = read_json_file(o.config);
  const auto cfg = train_config_from_json(cfg_json);
  const auto base_dir = std::filesystem::path(o.config).parent_path();

  ToyCorpus corpus;
  std::optional<ToyCorpus> heldout;
  nlohmann::json corpus_log;
  if (cfg_json.contains("corpus_file")) {
    auto path = std::filesystem::path(cfg_json["corpus_file"].get<std::string>());
    if (path.is_relative()) path = base_dir / path;
    corpus = corpus_from_json(read_json_file(path.string()));
    corpus_log = path.string();
  } else {
    const auto planted = planted_from_json(cfg_json.value("corpus", nlohmann::json::object()));
    corpus = make_planted_corpus(planted);
    corpus_log = {{"utterances", planted.utterances}, {"latent_dim", planted.latent_dim},
                  {"prototype_seed", planted.prototype_seed}, {"sample_seed", planted.sample_seed}};
    if (cfg_json.contains("heldout")) {
      auto h = planted;
      const auto &hj = cfg_json["heldout"];
      h.utterances = hj.value("utterances", std::size_t{8});
      h.sample_seed = hj.value("sample_seed", planted.sample_seed + 1000);
      h.pad_every = 0;
      heldout = make_planted_corpus(h);
    }
  }
  log_config(err, "train-toy", {{"config", o.config}, {"out", o.out}, {"trace", o.trace},
                                {"train", train_config_to_json(cfg)}, {"corpus", corpus_log}});

  const auto result = train_toy(corpus, cfg);
  write_file_atomic(o.out, dump_fixed(params_to_json(result.params), 6, 2) + "\n");
  if (!o.trace.empty()) {
    std::string csv = "step,learning_rate,batch_loss,corpus_loss\n";
    char buf[160];
    for (const auto &row : result.trace) {
      std::snprintf(buf, sizeof buf, "%zu,%.8f,%.6f,%.6f\n", row.step, row.learning_rate,
                    row.batch_loss, row.corpus_loss);
      csv += buf;
    }
    std::snprintf(buf, sizeof buf, "%zu,%.8f,,%.6f\n", cfg.steps, 0.0, result.final_loss);
    csv += buf;
    write_file_atomic(o.trace, csv);
  }
  nlohmann::json summary{{"initial_loss", result.initial_loss}, {"final_loss", result.final_loss},
                         {"steps", cfg.steps}};
  const auto train_eval = evaluate_toy(corpus, result.params);
  summary["train"] = {{"pauer", rate_json(train_eval.pause)}, {"iper", rate_json(train_eval.ip)}};
  if (heldout) {
    const auto ev = evaluate_toy(*heldout, result.params);
    summary["heldout"] = {{"pauer", rate_json(ev.pause)}, {"iper", rate_json(ev.ip)}};
  }
  out << dump_fixed(summary) << '\n';
  return kExitOk;
}

inline int run_validate(const Options &o, std::ostream &out, std::ostream &err) {
  log_config(err, "validate", {{"manifest", o.manifest}});
  const auto raw = read_jsonl(o.manifest);
  const auto diags = validate_manifest(raw);
  print_diagnostics(out, diags);
  out << dump_fixed(nlohmann::json{{"records", raw.size()}, {"diagnostics", diags.size()}}) << '\n';
  return diags.empty() ? kExitOk : kExitInvalid;
}

}  // namespace detail

/// Entry point shared by the pausekit binary and the tests.
inline int run(int argc, const char *const *argv, std::ostream &out = std::cout,
               std::ostream &err = std::cerr) {
  CLI::App app{"pausekit: pause and inappropriate-pause tooling"};
  app.require_subcommand(1);
  Options o;

  auto *annotate = app.add_subcommand("annotate", "Label pauses from annotator judgments");
  annotate->add_option("--manifest", o.manifest, "Input JSONL with pause_contexts")->required()->check(CLI::ExistingFile);
  annotate->add_option("--criteria", o.criteria, "Criteria JSON")->required()->check(CLI::ExistingFile);
  annotate->add_option("--out", o.out, "Labeled manifest")->required();
  annotate->add_option("--jobs", o.jobs, "Worker threads");

  auto *detect = app.add_subcommand("detect-pauses", "Energy-threshold pause detection");
  detect->add_option("--audio-dir", o.audio_dir, "Base directory for audio paths")->required()->check(CLI::ExistingDirectory);
  detect->add_option("--manifest", o.manifest, "Manifest JSONL")->required()->check(CLI::ExistingFile);
  detect->add_option("--vad-config", o.vad_config, "Detector settings JSON")->check(CLI::ExistingFile);
  detect->add_option("--out", o.out, "Output JSONL")->required();
  detect->add_option("--jobs", o.jobs, "Worker threads");

  auto *score = app.add_subcommand("score", "WER/CER/PauER/IPER report");
  score->add_option("--ref", o.ref, "Reference manifest")->required()->check(CLI::ExistingFile);
  score->add_option("--hyp", o.hyp, "Hypothesis JSONL")->required()->check(CLI::ExistingFile);
  score->add_option("--out", o.out, "Report JSON")->required();
  score->add_flag("--per-severity", o.per_severity, "Add per-severity breakdown");
  score->add_option("--jobs", o.jobs, "Worker threads");

  auto *split = app.add_subcommand("split", "Severity-stratified train/valid/test split");
  split->add_option("--manifest", o.manifest, "Manifest JSONL")->required()->check(CLI::ExistingFile);
  split->add_option("--ratios", o.ratios, "train,valid,test")->capture_default_str();
  split->add_option("--seed", o.seed, "Shuffle seed")->capture_default_str();
  split->add_option("--out-prefix", o.out_prefix, "Prefix for <prefix>{train,valid,test}.jsonl");

  auto *train = app.add_subcommand("train-toy", "Train the two heads on a synthetic corpus");
  train->add_option("--config", o.config, "Training config JSON")->required()->check(CLI::ExistingFile);
  train->add_option("--out", o.out, "Trained parameters JSON")->required();
  train->add_option("--trace", o.trace, "Loss trace CSV");

  auto *validate = app.add_subcommand("validate", "Check a manifest");
  validate->add_option("--manifest", o.manifest, "Manifest JSONL")->required()->check(CLI::ExistingFile);

  auto usage = [&](const std::string &msg) {
    err << "error: " << msg << "\n";
    const auto chosen = app.get_subcommands();
    err << (chosen.empty() ? app.help() : chosen.front()->help());
    return kExitUsage;
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &) {
    const auto chosen = app.get_subcommands();
    out << (chosen.empty() ? app.help() : chosen.front()->help());
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    return usage(e.what());
  }

  try {
    if (annotate->parsed()) return detail::run_annotate(o, out, err);
    if (detect->parsed()) return detail::run_detect(o, out, err);
    if (score->parsed()) return detail::run_score(o, out, err);
    if (split->parsed()) return detail::run_split(o, out, err);
    if (train->parsed()) return detail::run_train(o, out, err);
    if (validate->parsed()) return detail::run_validate(o, out, err);
  } catch (const UsageError &e) {
    return usage(e.what());
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const nlohmann::json::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return usage("no subcommand");
}

}  // namespace pausekit::cli
