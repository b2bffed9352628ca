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
#pragma once

#include "opteq/bench.hpp"
#include "opteq/dsp.hpp"
#include "opteq/fiber.hpp"
#include "opteq/prune.hpp"
#include "opteq/quant.hpp"
#include "opteq/train.hpp"
#include "opteq/txsim.hpp"

#include <map>
#include <string>
#include <vector>

namespace opteq {

/// Built-in parameter sets: "paper" runs the full-size experiment, "desk"
/// a proportionally compressed one that completes on a workstation.
enum class Profile { kPaper, kDesk };

Profile parse_profile(const std::string& name);

/// Pipeline stages in execution order; running a later stage runs all
/// earlier ones (each stage resumes from its on-disk checkpoints).
enum class Stage {
  kSimulate,    ///< link simulation + linear receiver, symbol checkpoints
  kTrain,       ///< FP32 equalizer training
  kPrune,       ///< gradual magnitude pruning + fine-tuning per sparsity
  kQuantize,    ///< INT8 post-training quantization
  kComplexity,  ///< bit-operation and model-size accounting
  kBench,       ///< wall-clock inference latency
  kReport       ///< CSV / plot-data emission
};

struct ExperimentConfig {
  Profile profile = Profile::kPaper;
  TxConfig tx;                      ///< launch power and seed are set per run
  FiberParams fiber;
  double amp_nf_db = 4.5;
  bool amp_enable_ase = true;
  std::vector<double> powers_dbm{1.0};
  Index n_symbols_train = Index(1) << 18;
  Index n_symbols_test = Index(1) << 18;
  int neighbors = 10;               ///< window half-width N; input width 4*(2N+1)
  std::vector<Index> hidden_dims{500, 10, 500};
  int augment_folds = 2;            ///< symmetry folds for training data (1, 2, 8, or 16)
  TrainConfig train;
  PruneSchedule prune;              ///< final_sparsity is overridden per target below
  std::vector<double> sparsities{0.6, 0.9};
  LatencyConfig bench;
  std::uint64_t master_seed = 42;
  std::string output_dir = "opteq_out";

  std::vector<Index> model_dims() const;
  void validate() const;
};

ExperimentConfig default_config(Profile profile);

/// Parses a JSON config file on top of the profile defaults.  Every key is
/// optional; unknown keys are rejected.  profile_override (when non-empty)
/// wins over the file's "profile" entry.
ExperimentConfig load_config_json(const std::string& path, const std::string& profile_override);

struct PowerReport {
  double power_dbm = 0.0;
  QualityMetrics le;                      ///< linear receiver, H polarization
  QualityMetrics fp32;                    ///< trained equalizer
  std::map<int, QualityMetrics> pruned;   ///< sparsity percent -> metrics
  std::map<int, QualityMetrics> quantized;///< sparsity percent (0 = unpruned PTQ)
};

struct ComplexityRow {
  std::string variant;  ///< "fp32" or "int8"
  double sparsity = 0.0;
  double bops = 0.0;
  double bops_reduction_pct = 0.0;
  std::uint64_t model_bytes = 0;
  double size_reduction_pct = 0.0;
};

struct LatencyRow {
  std::string variant;  ///< "fp32" or "int8_s<pct>"
  LatencyStats stats;
};

struct PipelineResult {
  std::vector<PowerReport> powers;
  std::vector<ComplexityRow> complexity;
  std::vector<LatencyRow> latency;
};

/// Runs the pipeline through the given stage (inclusive).  Every stage
/// checkpoints its products under cfg.output_dir and is skipped when its
/// outputs already exist, so interrupted runs resume.  Errors surface as
/// exceptions whose message names the failing stage.
PipelineResult run_pipeline(const ExperimentConfig& cfg, Stage through);

}  // namespace opteq
