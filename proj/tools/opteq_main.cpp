/*
 * Copyright (c) 2026, the opteq authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "opteq/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

namespace {

/// Subcommand names in pipeline order; running one runs everything before it.
const std::vector<std::pair<std::string, opteq::Stage>> kVerbs = {
    {"simulate", opteq::Stage::kSimulate},     {"train", opteq::Stage::kTrain},
    {"prune", opteq::Stage::kPrune},           {"quantize", opteq::Stage::kQuantize},
    {"complexity", opteq::Stage::kComplexity}, {"bench", opteq::Stage::kBench},
    {"all", opteq::Stage::kReport},
};

const std::vector<std::pair<std::string, std::string>> kVerbHelp = {
    {"simulate", "generate train/test symbol sets over the fiber link"},
    {"train", "train the nonlinear equalizer (runs simulate first)"},
    {"prune", "magnitude-prune and fine-tune at each target sparsity"},
    {"quantize", "post-training int8 quantization of every model"},
    {"complexity", "bit-operation counts and serialized model sizes"},
    {"bench", "wall-clock inference latency for every model variant"},
    {"all", "full pipeline including the report files"},
};

void print_summary(const opteq::PipelineResult& result) {
  for (const opteq::PowerReport& p : result.powers) {
    std::printf("power %+.1f dBm  LE Q %.3f dB", p.power_dbm, p.le.q_db);
    if (p.fp32.n_bits > 0) std::printf("  MLP Q %.3f dB", p.fp32.q_db);
    for (const auto& [pct, m] : p.pruned) std::printf("  s%d Q %.3f dB", pct, m.q_db);
    for (const auto& [pct, m] : p.quantized)
      std::printf("  s%d+int8 Q %.3f dB", pct, m.q_db);
    std::printf("\n");
  }
  for (const opteq::ComplexityRow& r : result.complexity)
    std::printf("%s s=%.2f  %.0f BoPs (-%.2f%%)  %llu bytes (-%.2f%%)\n", r.variant.c_str(),
                r.sparsity, r.bops, r.bops_reduction_pct,
                static_cast<unsigned long long>(r.model_bytes), r.size_reduction_pct);
  for (const opteq::LatencyRow& r : result.latency)
    std::printf("%s  %.6f s/inference (sigma %.6f)  %.4f us/symbol%s\n", r.variant.c_str(),
                r.stats.mean_s, r.stats.sigma_s, r.stats.per_symbol_us,
                r.stats.timer_warning ? "  [timer resolution warning]" : "");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dual-polarization fiber link simulation with a prunable, quantizable MLP equalizer"};
  app.require_subcommand(1);

  std::string config_path, profile_name, out_dir;
  std::uint64_t master_seed = 0;
  app.add_option("--config", config_path, "JSON experiment configuration file")
      ->check(CLI::ExistingFile);
  app.add_option("--profile", profile_name, "parameter profile: paper (full size) or desk (small)");
  app.add_option("--out", out_dir, "output directory (overrides OPTEQ_OUT and the config file)");
  auto* seed_opt =
      app.add_option("--seed-set", master_seed, "master seed for every random stream");

  for (const auto& [name, help] : kVerbHelp) app.add_subcommand(name, help)->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    opteq::ExperimentConfig cfg = opteq::load_config_json(config_path, profile_name);
    if (seed_opt->count() > 0) cfg.master_seed = master_seed;
    if (!out_dir.empty()) {
      cfg.output_dir = out_dir;
    } else if (const char* env = std::getenv("OPTEQ_OUT"); env != nullptr && *env != '\0') {
      cfg.output_dir = env;
    }
    cfg.validate();

    opteq::Stage through = opteq::Stage::kReport;
    for (const auto& [name, stage] : kVerbs)
      if (app.get_subcommand(name)->parsed()) through = stage;

    const opteq::PipelineResult result = opteq::run_pipeline(cfg, through);
    print_summary(result);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
