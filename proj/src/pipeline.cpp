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

#include "opteq/bops.hpp"
#include "opteq/rng.hpp"
#include "opteq/serialize.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace opteq {

namespace fs = std::filesystem;
using nlohmann::json;

Profile parse_profile(const std::string& name) {
  if (name == "paper") return Profile::kPaper;
  if (name == "desk") return Profile::kDesk;
  throw std::invalid_argument("unknown profile '" + name + "' (expected paper or desk)");
}

std::vector<Index> ExperimentConfig::model_dims() const {
  std::vector<Index> dims;
  dims.push_back(4 * (2 * static_cast<Index>(neighbors) + 1));
  dims.insert(dims.end(), hidden_dims.begin(), hidden_dims.end());
  dims.push_back(2);
  return dims;
}

void ExperimentConfig::validate() const {
  tx.validate();
  fiber.validate();
  train.validate();
  prune.validate();
  bench.validate();
  if (amp_nf_db < 0.0) throw std::invalid_argument("config: amplifier noise figure must be >= 0");
  if (powers_dbm.empty()) throw std::invalid_argument("config: powers_dbm must not be empty");
  if (neighbors < 0) throw std::invalid_argument("config: neighbors must be >= 0");
  if (augment_folds != 1 && augment_folds != 2 && augment_folds != 8 && augment_folds != 16)
    throw std::invalid_argument("config: augment_folds must be 1, 2, 8, or 16");
  if (hidden_dims.empty()) throw std::invalid_argument("config: hidden_dims must not be empty");
  for (Index d : hidden_dims)
    if (d <= 0) throw std::invalid_argument("config: hidden widths must be positive");
  for (double s : sparsities)
    if (!(s >= 0.0 && s <= 0.95))
      throw std::invalid_argument("config: target sparsities must lie in [0, 0.95]");
  const Index min_symbols = 4 * static_cast<Index>(neighbors) + 4;
  if (n_symbols_train < min_symbols || n_symbols_test < min_symbols)
    throw std::invalid_argument("config: symbol counts too small for the window size");
  if (output_dir.empty()) throw std::invalid_argument("config: output_dir must not be empty");
}

ExperimentConfig default_config(Profile profile) {
  ExperimentConfig cfg;
  cfg.profile = profile;
  cfg.fiber = FiberParams::standard_smf();
  if (profile == Profile::kDesk) {
    cfg.n_symbols_train = Index(1) << 14;
    cfg.n_symbols_test = Index(1) << 14;
    // The short block leaves few windows, so the desk profile leans on the
    // full 16-fold symmetry augmentation and a smaller batch / lower rate
    // tuned for that sample count.
    cfg.augment_folds = 16;
    cfg.train.learning_rate = 5e-4;
    cfg.train.batch_size = 512;
    cfg.train.max_epochs = 200;
    cfg.train.patience_epochs = 30;
    cfg.prune.total_epochs = 60;
    cfg.sparsities = {0.6};
    cfg.bench.n_inferences = 10;
    cfg.bench.n_repeats = 5;
  }
  return cfg;
}

namespace {

// ---------------------------------------------------------------------
// configuration parsing

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& scope) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) known = true;
    if (!known)
      throw std::invalid_argument("config: unknown key '" + scope + item.key() + "'");
  }
}

void parse_tx(const json& j, TxConfig& tx) {
  reject_unknown_keys(j, {"baud_rate_gbd", "sps", "rolloff", "mod_order", "prbs_order",
                          "filter_span_symbols"},
                      "tx.");
  tx.baud_rate_gbd = j.value("baud_rate_gbd", tx.baud_rate_gbd);
  tx.sps = j.value("sps", tx.sps);
  tx.rolloff = j.value("rolloff", tx.rolloff);
  tx.mod_order = j.value("mod_order", tx.mod_order);
  tx.prbs_order = j.value("prbs_order", tx.prbs_order);
  tx.filter_span_symbols = j.value("filter_span_symbols", tx.filter_span_symbols);
}

void parse_fiber(const json& j, FiberParams& fiber) {
  reject_unknown_keys(j, {"preset", "alpha_db_per_km", "dispersion_ps_nm_km", "gamma_w_km",
                          "span_km", "n_spans", "step_km", "carrier_wavelength_nm",
                          "manakov_factor"},
                      "fiber.");
  if (j.contains("preset")) {
    const std::string preset = j["preset"].get<std::string>();
    if (preset == "ssmf") {
      fiber = FiberParams::standard_smf();
    } else if (preset == "twc") {
      fiber = FiberParams::true_wave_classic();
    } else {
      throw std::invalid_argument("config: unknown fiber preset '" + preset + "'");
    }
  }
  fiber.alpha_db_per_km = j.value("alpha_db_per_km", fiber.alpha_db_per_km);
  fiber.dispersion_ps_nm_km = j.value("dispersion_ps_nm_km", fiber.dispersion_ps_nm_km);
  fiber.gamma_w_km = j.value("gamma_w_km", fiber.gamma_w_km);
  fiber.span_km = j.value("span_km", fiber.span_km);
  fiber.n_spans = j.value("n_spans", fiber.n_spans);
  fiber.step_km = j.value("step_km", fiber.step_km);
  fiber.carrier_wavelength_nm = j.value("carrier_wavelength_nm", fiber.carrier_wavelength_nm);
  fiber.manakov_factor = j.value("manakov_factor", fiber.manakov_factor);
}

void parse_train(const json& j, TrainConfig& t) {
  reject_unknown_keys(j, {"learning_rate", "batch_size", "max_epochs", "patience_epochs",
                          "min_delta"},
                      "train.");
  t.learning_rate = j.value("learning_rate", t.learning_rate);
  t.batch_size = j.value("batch_size", t.batch_size);
  t.max_epochs = j.value("max_epochs", t.max_epochs);
  t.patience_epochs = j.value("patience_epochs", t.patience_epochs);
  t.min_delta = j.value("min_delta", t.min_delta);
}

void parse_prune(const json& j, PruneSchedule& p) {
  reject_unknown_keys(j, {"initial_sparsity", "power", "prune_every_steps", "total_epochs"},
                      "prune.");
  p.initial_sparsity = j.value("initial_sparsity", p.initial_sparsity);
  p.power = j.value("power", p.power);
  p.prune_every_steps = j.value("prune_every_steps", p.prune_every_steps);
  p.total_epochs = j.value("total_epochs", p.total_epochs);
}

void parse_bench(const json& j, LatencyConfig& b) {
  reject_unknown_keys(j, {"n_symbols", "n_inferences", "n_repeats"}, "bench.");
  b.n_symbols = j.value("n_symbols", b.n_symbols);
  b.n_inferences = j.value("n_inferences", b.n_inferences);
  b.n_repeats = j.value("n_repeats", b.n_repeats);
}

}  // namespace

ExperimentConfig load_config_json(const std::string& path, const std::string& profile_override) {
  json j;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    try {
      in >> j;
    } catch (const json::parse_error& e) {
      throw std::runtime_error("config: " + path + ": " + e.what());
    }
  }
  if (j.is_null()) j = json::object();
  if (!j.is_object()) throw std::runtime_error("config: top level must be a JSON object");

  std::string profile_name = profile_override;
  if (profile_name.empty()) profile_name = j.value("profile", "paper");
  ExperimentConfig cfg = default_config(parse_profile(profile_name));

  reject_unknown_keys(j,
                      {"profile", "powers_dbm", "n_symbols_train", "n_symbols_test", "neighbors",
                       "augment_folds", "hidden_dims", "sparsities", "master_seed", "output_dir",
                       "tx", "fiber", "amp", "train", "prune", "bench"},
                      "");
  if (j.contains("powers_dbm")) cfg.powers_dbm = j["powers_dbm"].get<std::vector<double>>();
  cfg.n_symbols_train = j.value("n_symbols_train", cfg.n_symbols_train);
  cfg.n_symbols_test = j.value("n_symbols_test", cfg.n_symbols_test);
  cfg.neighbors = j.value("neighbors", cfg.neighbors);
  cfg.augment_folds = j.value("augment_folds", cfg.augment_folds);
  if (j.contains("hidden_dims")) {
    cfg.hidden_dims.clear();
    for (const auto& d : j["hidden_dims"]) cfg.hidden_dims.push_back(d.get<Index>());
  }
  if (j.contains("sparsities")) cfg.sparsities = j["sparsities"].get<std::vector<double>>();
  cfg.master_seed = j.value("master_seed", cfg.master_seed);
  cfg.output_dir = j.value("output_dir", cfg.output_dir);
  if (j.contains("tx")) parse_tx(j["tx"], cfg.tx);
  if (j.contains("fiber")) parse_fiber(j["fiber"], cfg.fiber);
  if (j.contains("amp")) {
    reject_unknown_keys(j["amp"], {"nf_db", "enable_ase"}, "amp.");
    cfg.amp_nf_db = j["amp"].value("nf_db", cfg.amp_nf_db);
    cfg.amp_enable_ase = j["amp"].value("enable_ase", cfg.amp_enable_ase);
  }
  if (j.contains("train")) parse_train(j["train"], cfg.train);
  if (j.contains("prune")) parse_prune(j["prune"], cfg.prune);
  if (j.contains("bench")) parse_bench(j["bench"], cfg.bench);
  cfg.validate();
  return cfg;
}

namespace {

// ---------------------------------------------------------------------
// pipeline internals

struct PowerSeeds {
  std::uint64_t tx_train, tx_test, ase_train, ase_test, init, shuffle, prune_shuffle;
};

PowerSeeds derive_seeds(std::uint64_t master, std::size_t power_index) {
  const std::uint64_t base = mix_seed(master, 100 + power_index);
  return {mix_seed(base, 1), mix_seed(base, 2), mix_seed(base, 3), mix_seed(base, 4),
          mix_seed(base, 5), mix_seed(base, 6), mix_seed(base, 7)};
}

std::string power_tag(double power_dbm) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "p%g", power_dbm);
  return buf;
}

int sparsity_pct(double s) { return static_cast<int>(std::lround(s * 100.0)); }

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

class CsvFile {
 public:
  CsvFile(const fs::path& path, const std::string& header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot open " + path.string());
    out_ << header << "\n";
  }
  void row(const std::string& line) { out_ << line << "\n"; }
  ~CsvFile() = default;

 private:
  std::ofstream out_;
};

void write_history_csv(const fs::path& path, const std::vector<EpochRecord>& history) {
  CsvFile csv(path, "epoch,train_mse,test_ber,test_q_db");
  for (const EpochRecord& r : history) {
    csv.row(std::to_string(r.epoch) + "," + fmt("%.9g", r.train_mse) + "," +
            fmt("%.9g", r.test_ber) + "," + fmt("%.9g", r.test_q_db));
  }
}

/// Per-power working state accumulated across stages.
struct PowerContext {
  double power_dbm = 0.0;
  std::string tag;
  PowerSeeds seeds{};
  SymbolBlock train_block, test_block;
  MlpModel fp32;
  std::map<int, MlpModel> pruned;          // sparsity pct -> fine-tuned model
  std::map<int, QuantizedModel> quantized; // sparsity pct (0 = unpruned PTQ)
};

class PipelineRunner {
 public:
  PipelineRunner(const ExperimentConfig& cfg, Stage through)
      : cfg_(cfg), through_(through), out_(cfg.output_dir) {}

  PipelineResult run() {
    cfg_.validate();
    fs::create_directories(out_);
    for (std::size_t i = 0; i < cfg_.powers_dbm.size(); ++i) {
      PowerContext ctx;
      ctx.power_dbm = cfg_.powers_dbm[i];
      ctx.tag = power_tag(ctx.power_dbm);
      ctx.seeds = derive_seeds(cfg_.master_seed, i);
      stage("simulate", [&] { simulate(ctx); });
      if (reached(Stage::kTrain)) stage("train", [&] { train(ctx); });
      if (reached(Stage::kPrune)) stage("prune", [&] { prune(ctx); });
      if (reached(Stage::kQuantize)) stage("quantize", [&] { quantize(ctx); });
      contexts_.push_back(std::move(ctx));
    }
    if (reached(Stage::kComplexity)) stage("complexity", [&] { complexity(); });
    if (reached(Stage::kBench)) stage("bench", [&] { bench(); });
    if (reached(Stage::kReport)) stage("report", [&] { report(); });
    return std::move(result_);
  }

 private:
  bool reached(Stage s) const { return static_cast<int>(through_) >= static_cast<int>(s); }

  template <typename F>
  void stage(const char* name, F&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string("stage ") + name + ": " + e.what());
    }
  }

  AmplifierParams make_amp(std::uint64_t seed) const {
    AmplifierParams amp;
    amp.nf_db = cfg_.amp_nf_db;
    amp.enable_ase = cfg_.amp_enable_ase;
    amp.seed = seed;
    return amp;
  }

  /// Simulates (or loads) one dataset and returns the equalized block.
  SymbolBlock make_dataset(const fs::path& path, double power_dbm, Index n_symbols,
                           std::uint64_t tx_seed, std::uint64_t ase_seed) {
    if (!fs::exists(path)) {
      TxConfig tx = cfg_.tx;
      tx.launch_power_dbm = power_dbm;
      tx.seed = tx_seed;
      const LinkOutput link = simulate_link(tx, cfg_.fiber, make_amp(ase_seed), n_symbols);
      const SymbolBlock block =
          linear_equalize(link.rx, link.tx_h, link.tx_v, tx, cfg_.fiber);
      save_symbols(path.string(), block, tx.sample_rate_hz());
    } else {
      std::cerr << "[simulate] reusing " << path.string() << "\n";
    }
    // Always read back from the checkpoint so that fresh and resumed runs
    // evaluate bit-identical data.
    return load_symbols(path.string());
  }

  void simulate(PowerContext& ctx) {
    std::cerr << "[simulate] " << ctx.tag << ": " << cfg_.n_symbols_train << " train / "
              << cfg_.n_symbols_test << " test symbols\n";
    ctx.train_block = make_dataset(out_ / ("sim_" + ctx.tag + "_train.sym"), ctx.power_dbm,
                                   cfg_.n_symbols_train, ctx.seeds.tx_train, ctx.seeds.ase_train);
    ctx.test_block = make_dataset(out_ / ("sim_" + ctx.tag + "_test.sym"), ctx.power_dbm,
                                  cfg_.n_symbols_test, ctx.seeds.tx_test, ctx.seeds.ase_test);
  }

  /// Linear-receiver quality on the same central region the equalizer sees.
  QualityMetrics le_quality(const SymbolBlock& block) const {
    const Index n = static_cast<Index>(cfg_.neighbors);
    const Index len = block.rx_h.size() - 2 * n;
    return measure_quality(block.rx_h.segment(n, len), block.tx_h.segment(n, len));
  }

  void train(PowerContext& ctx) {
    const fs::path model_path = out_ / ("model_" + ctx.tag + "_fp32.mlpz");
    if (fs::exists(model_path)) {
      std::cerr << "[train] reusing " << model_path.string() << "\n";
      ctx.fp32 = load_model_fp32(model_path.string());
      return;
    }
    MlpModel model = make_mlp<float>(cfg_.model_dims(), Activation::kTanh);
    init_glorot(model, ctx.seeds.init);
    const WindowedDataset data = build_windows_augmented<float>(
        ctx.train_block, cfg_.neighbors, Polarization::kH, cfg_.augment_folds);

    // Two-phase rate schedule: the bulk of the epoch budget at the
    // configured rate, then the final fifth at a tenth of it so the run
    // settles into its optimum instead of orbiting it.
    TrainConfig tc = cfg_.train;
    tc.shuffle_seed = ctx.seeds.shuffle;
    const int cool_epochs = cfg_.train.max_epochs / 5;
    tc.max_epochs = cfg_.train.max_epochs - cool_epochs;
    std::cerr << "[train] " << ctx.tag << ": " << data.inputs.rows() << " windows ("
              << cfg_.augment_folds << " folds), up to " << tc.max_epochs << " + "
              << cool_epochs << " epochs\n";
    TrainResult tr = train_mlp(model, data, tc, &ctx.test_block);
    if (cool_epochs > 0) {
      TrainConfig cool = tc;
      cool.learning_rate = cfg_.train.learning_rate / 10.0;
      cool.max_epochs = cool_epochs;
      cool.shuffle_seed = mix_seed(ctx.seeds.shuffle, 1);
      const TrainResult tail = train_mlp(model, data, cool, &ctx.test_block);
      for (EpochRecord rec : tail.history) {
        rec.epoch += tr.epochs_run;
        tr.history.push_back(rec);
      }
      tr.epochs_run += tail.epochs_run;
      tr.early_stopped = tr.early_stopped || tail.early_stopped;
    }
    std::cerr << "[train] " << ctx.tag << ": " << tr.epochs_run << " epochs"
              << (tr.early_stopped ? " (early stop)" : "") << ", final Q "
              << fmt("%.3f", tr.history.back().test_q_db) << " dB\n";
    write_history_csv(out_ / ("history_" + ctx.tag + "_fp32.csv"), tr.history);
    save_model_fp32(model_path.string(), model);
    ctx.fp32 = std::move(model);
  }

  void prune(PowerContext& ctx) {
    for (double target : cfg_.sparsities) {
      const int pct = sparsity_pct(target);
      const fs::path model_path =
          out_ / ("model_" + ctx.tag + "_s" + std::to_string(pct) + "_pruned.mlpz");
      if (fs::exists(model_path)) {
        std::cerr << "[prune] reusing " << model_path.string() << "\n";
        ctx.pruned[pct] = load_model_fp32(model_path.string());
        continue;
      }
      MlpModel model = ctx.fp32;
      PruneSchedule sched = cfg_.prune;
      sched.final_sparsity = target;
      // Fine-tuning starts from an already converged model, so it runs at
      // the cooled rate of the two-phase schedule: large steps here would
      // re-disturb the dense optimum more than each mask increment does.
      TrainConfig tc = cfg_.train;
      tc.learning_rate = cfg_.train.learning_rate / 10.0;
      tc.shuffle_seed = mix_seed(ctx.seeds.prune_shuffle, static_cast<std::uint64_t>(pct));
      const WindowedDataset data = build_windows_augmented<float>(
          ctx.train_block, cfg_.neighbors, Polarization::kH, cfg_.augment_folds);
      std::cerr << "[prune] " << ctx.tag << ": target " << pct << "% over "
                << sched.total_epochs << " epochs\n";
      const PruneResult pr = prune_with_finetune(model, sched, data, tc, &ctx.test_block);
      write_history_csv(out_ / ("history_" + ctx.tag + "_s" + std::to_string(pct) + "_prune.csv"),
                        pr.history);
      save_model_fp32(model_path.string(), model);
      ctx.pruned[pct] = std::move(model);
    }
  }

  /// Calibration batch: the head of the test-set windows.
  Eigen::MatrixXf calibration_batch(const PowerContext& ctx) const {
    const WindowedDataset data =
        build_windows<float>(ctx.test_block, cfg_.neighbors, Polarization::kH);
    const Index rows = std::min<Index>(100, data.inputs.rows());
    return data.inputs.topRows(rows);
  }

  void quantize_one(PowerContext& ctx, int pct, const MlpModel& source) {
    const fs::path path =
        out_ / ("model_" + ctx.tag + "_s" + std::to_string(pct) + "_int8.mlpz");
    if (fs::exists(path)) {
      std::cerr << "[quantize] reusing " << path.string() << "\n";
      ctx.quantized[pct] = load_model_int8(path.string());
      return;
    }
    const QuantizedModel q = quantize_ptq(source, calibrate_activations(source, calibration_batch(ctx)));
    save_model_int8(path.string(), q, /*sparse=*/pct > 0);
    ctx.quantized[pct] = load_model_int8(path.string());
  }

  void quantize(PowerContext& ctx) {
    std::cerr << "[quantize] " << ctx.tag << "\n";
    quantize_one(ctx, 0, ctx.fp32);
    for (const auto& [pct, model] : ctx.pruned) quantize_one(ctx, pct, model);
  }

  /// Structural metrics come from the first power's models: BoPs depend
  /// only on the architecture and file sizes only on the sparsity pattern.
  void complexity() {
    const PowerContext& ctx = contexts_.front();
    const std::vector<Index> dims = cfg_.model_dims();
    const BitWidths fp32_widths{32, 32, 32};
    const BitWidths int8_widths{32, 8, 8};

    const double baseline_bops = bops_mlp(dims, fp32_widths, 0.0);
    const auto fp32_bytes =
        model_file_size((out_ / ("model_" + ctx.tag + "_fp32.mlpz")).string());
    result_.complexity.push_back(
        {"fp32", 0.0, baseline_bops, 0.0, fp32_bytes, 0.0});
    for (const auto& [pct, q] : ctx.quantized) {
      const double f = pct / 100.0;
      const double bops = bops_mlp(dims, int8_widths, f);
      const auto bytes = model_file_size(
          (out_ / ("model_" + ctx.tag + "_s" + std::to_string(pct) + "_int8.mlpz")).string());
      result_.complexity.push_back({"int8", f, bops, reduction_pct(baseline_bops, bops), bytes,
                                    reduction_pct(static_cast<double>(fp32_bytes),
                                                  static_cast<double>(bytes))});
    }
  }

  /// Inference input for the latency runs: test windows tiled to n_symbols.
  Eigen::MatrixXf bench_batch(const PowerContext& ctx) const {
    const WindowedDataset data =
        build_windows<float>(ctx.test_block, cfg_.neighbors, Polarization::kH);
    Eigen::MatrixXf x(cfg_.bench.n_symbols, data.inputs.cols());
    for (Index r = 0; r < x.rows(); ++r) x.row(r) = data.inputs.row(r % data.inputs.rows());
    return x;
  }

  void bench() {
    const PowerContext& ctx = contexts_.front();
    const Eigen::MatrixXf x = bench_batch(ctx);
    float sink = 0.0f;  // keeps the optimizer from discarding the inference

    std::cerr << "[bench] fp32: " << cfg_.bench.n_repeats << " x " << cfg_.bench.n_inferences
              << " inferences over " << cfg_.bench.n_symbols << " symbols\n";
    LatencyRow fp32_row{"fp32", bench_latency(
                                    [&] {
                                      const Eigen::MatrixXf y = forward(ctx.fp32, x);
                                      sink += y(0, 0);
                                    },
                                    cfg_.bench)};
    result_.latency.push_back(std::move(fp32_row));
    for (const auto& [pct, q] : ctx.quantized) {
      std::cerr << "[bench] int8 s" << pct << "\n";
      LatencyRow row{"int8_s" + std::to_string(pct), bench_latency(
                                                         [&] {
                                                           const Eigen::MatrixXf y = infer_int8(q, x);
                                                           sink += y(0, 0);
                                                         },
                                                         cfg_.bench)};
      result_.latency.push_back(std::move(row));
    }
    if (!std::isfinite(static_cast<double>(sink)))
      std::cerr << "[bench] note: non-finite checksum\n";
  }

  void evaluate_power(PowerContext& ctx, PowerReport& report) {
    report.power_dbm = ctx.power_dbm;
    report.le = le_quality(ctx.test_block);
    if (reached(Stage::kTrain))
      report.fp32 = evaluate_q(ctx.fp32, ctx.test_block, cfg_.neighbors);
    if (reached(Stage::kPrune))
      for (const auto& [pct, model] : ctx.pruned)
        report.pruned[pct] = evaluate_q(model, ctx.test_block, cfg_.neighbors);
    if (reached(Stage::kQuantize)) {
      const WindowedDataset data =
          build_windows<float>(ctx.test_block, cfg_.neighbors, Polarization::kH);
      const ArrayXc reference =
          ctx.test_block.tx_h.segment(cfg_.neighbors, data.inputs.rows());
      for (const auto& [pct, q] : ctx.quantized) {
        const ArrayXc predicted = predictions_to_symbols(infer_int8(q, data.inputs));
        report.quantized[pct] = measure_quality(predicted, reference);
      }
    }
  }

  void report() {
    for (PowerContext& ctx : contexts_) {
      PowerReport rep;
      evaluate_power(ctx, rep);
      result_.powers.push_back(std::move(rep));
    }

    {
      CsvFile csv(out_ / "le_metrics.csv", "power_dbm,stage,ber,q_db,n_bits");
      for (const PowerReport& r : result_.powers)
        csv.row(fmt("%.9g", r.power_dbm) + ",LE," + fmt("%.9g", r.le.ber) + "," +
                fmt("%.9g", r.le.q_db) + "," + std::to_string(r.le.n_bits));
    }

    if (reached(Stage::kTrain)) {
      CsvFile csv(out_ / "q_vs_sparsity.csv", "power_dbm,sparsity,stage,ber,q_db");
      for (const PowerReport& r : result_.powers) {
        const std::string p = fmt("%.9g", r.power_dbm);
        csv.row(p + ",0,LE," + fmt("%.9g", r.le.ber) + "," + fmt("%.9g", r.le.q_db));
        csv.row(p + ",0,FP32," + fmt("%.9g", r.fp32.ber) + "," + fmt("%.9g", r.fp32.q_db));
        for (const auto& [pct, m] : r.pruned)
          csv.row(p + "," + fmt("%.2f", pct / 100.0) + ",pruned," + fmt("%.9g", m.ber) + "," +
                  fmt("%.9g", m.q_db));
        for (const auto& [pct, m] : r.quantized)
          csv.row(p + "," + fmt("%.2f", pct / 100.0) + ",pruned+quant," + fmt("%.9g", m.ber) +
                  "," + fmt("%.9g", m.q_db));
      }
    }

    if (reached(Stage::kComplexity) && !result_.complexity.empty()) {
      CsvFile csv(out_ / "complexity.csv",
                  "variant,sparsity,bops,bops_reduction_pct,model_bytes,size_reduction_pct");
      for (const ComplexityRow& r : result_.complexity)
        csv.row(r.variant + "," + fmt("%.2f", r.sparsity) + "," + fmt("%.2f", r.bops) + "," +
                fmt("%.4f", r.bops_reduction_pct) + "," + std::to_string(r.model_bytes) + "," +
                fmt("%.4f", r.size_reduction_pct));
    }

    if (reached(Stage::kBench) && !result_.latency.empty()) {
      CsvFile csv(out_ / "latency.csv",
                  "model_variant,mean_s,sigma_s,per_symbol_us,n_repeats,n_inferences,n_symbols");
      for (const LatencyRow& r : result_.latency)
        csv.row(r.variant + "," + fmt("%.9g", r.stats.mean_s) + "," +
                fmt("%.9g", r.stats.sigma_s) + "," + fmt("%.9g", r.stats.per_symbol_us) + "," +
                std::to_string(r.stats.n_repeats) + "," + std::to_string(r.stats.n_inferences) +
                "," + std::to_string(r.stats.n_symbols));
      CsvFile raw(out_ / "latency_raw.csv", "model_variant,repeat,inference,seconds");
      for (const LatencyRow& r : result_.latency)
        for (std::size_t i = 0; i < r.stats.raw_seconds.size(); ++i)
          raw.row(r.variant + "," + std::to_string(i / r.stats.n_inferences) + "," +
                  std::to_string(i % r.stats.n_inferences) + "," +
                  fmt("%.9g", r.stats.raw_seconds[i]));
    }

    write_plot_data();
    std::cerr << "[report] wrote " << out_.string() << "\n";
  }

  void write_plot_data() {
    if (reached(Stage::kTrain)) {
      std::ofstream dat(out_ / "fig_q_vs_sparsity.dat");
      dat << "# q factor vs pruned weight fraction\n";
      dat << "# power_dbm sparsity q_le_db q_fp32_db q_pruned_db q_pruned_quant_db\n";
      for (const PowerReport& r : result_.powers) {
        for (const auto& [pct, m] : r.pruned) {
          const auto qit = r.quantized.find(pct);
          dat << fmt("%.9g", r.power_dbm) << " " << fmt("%.2f", pct / 100.0) << " "
              << fmt("%.9g", r.le.q_db) << " " << fmt("%.9g", r.fp32.q_db) << " "
              << fmt("%.9g", m.q_db) << " "
              << (qit != r.quantized.end() ? fmt("%.9g", qit->second.q_db) : "nan") << "\n";
        }
        dat << "\n";
      }
    }
    if (reached(Stage::kComplexity) && !result_.complexity.empty()) {
      std::ofstream dat(out_ / "fig_complexity.dat");
      dat << "# inference complexity and serialized size per variant\n";
      dat << "# sparsity bops model_bytes variant\n";
      for (const ComplexityRow& r : result_.complexity)
        dat << fmt("%.2f", r.sparsity) << " " << fmt("%.2f", r.bops) << " " << r.model_bytes
            << " " << r.variant << "\n";
    }
    if (reached(Stage::kBench) && !result_.latency.empty()) {
      std::ofstream dat(out_ / "fig_latency.dat");
      dat << "# per-inference latency per model variant\n";
      dat << "# index mean_s sigma_s per_symbol_us variant\n";
      for (std::size_t i = 0; i < result_.latency.size(); ++i) {
        const LatencyRow& r = result_.latency[i];
        dat << i << " " << fmt("%.9g", r.stats.mean_s) << " " << fmt("%.9g", r.stats.sigma_s)
            << " " << fmt("%.9g", r.stats.per_symbol_us) << " " << r.variant << "\n";
      }
    }
  }

  ExperimentConfig cfg_;
  Stage through_;
  fs::path out_;
  std::vector<PowerContext> contexts_;
  PipelineResult result_;
};

}  // namespace

PipelineResult run_pipeline(const ExperimentConfig& cfg, Stage through) {
  PipelineRunner runner(cfg, through);
  return runner.run();
}

}  // namespace opteq
