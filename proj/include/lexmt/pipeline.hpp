#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "lexmt/corpus.hpp"

namespace lexmt {

// Flat key-value experiment config with [section] headers; values are
// addressed as "section.key".  All paths are relative to the config
// file's directory.
struct Config {
  std::map<std::string, std::string> values;
  std::filesystem::path base_dir;
  std::string raw;  // exact file bytes, fingerprinted into the manifest

  bool has(const std::string& key) const { return values.count(key) > 0; }
  std::string get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& dflt) const;
  std::filesystem::path get_path(const std::string& key) const;
  bool get_bool(const std::string& key, bool dflt) const;
  long long get_int(const std::string& key, long long dflt) const;
  double get_double(const std::string& key, double dflt) const;
};

Config load_config(const std::filesystem::path& path);

struct PipelineResult {
  double bleu = 0.0;  // [0,1]
  long long oov_tokens = 0;
  long long oov_types = 0;
  long long passthrough_tokens = 0;  // OOV copies the decoder emitted
  std::filesystem::path report_path;
};

// Runs clean -> lists (augment/filter/integrate) -> align -> phrases ->
// lm -> tune -> decode -> evaluate, writing every stage artifact under
// out_dir (01_clean/ ... 08_eval/ plus manifest.txt).  Each stage's
// serialized artifact is reloaded before the next stage consumes it, so
// a stage rerun from cached files reproduces the end-to-end run exactly.
PipelineResult run_pipeline(const std::filesystem::path& config_path,
                            const std::filesystem::path& out_dir,
                            int jobs = 1);

}  // namespace lexmt
