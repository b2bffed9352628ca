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
#include "opteq/serialize.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace opteq {

namespace {

constexpr char kModelMagic[4] = {'M', 'L', 'P', 'Z'};
constexpr char kDataMagic[8] = {'O', 'P', 'T', 'Q', 'D', 'A', 'T', 'A'};
constexpr std::uint16_t kModelVersion = 1;
constexpr std::uint32_t kDataVersion = 1;

enum ModelVariant : std::uint16_t { kDenseF32 = 1, kDenseI8 = 2, kSparseI8 = 3 };
enum DataKind : std::uint32_t { kWaveform = 1, kSymbols = 2 };

void require_little_endian() {
  const std::uint16_t probe = 0x0102;
  char bytes[2];
  std::memcpy(bytes, &probe, 2);
  if (bytes[0] != 0x02)
    throw std::runtime_error("serialize: containers are little-endian; host is not");
}

class Writer {
 public:
  explicit Writer(const std::string& path) : path_(path), out_(path, std::ios::binary) {
    require_little_endian();
    if (!out_) throw std::runtime_error("serialize: cannot open for writing: " + path);
  }

  template <typename T>
  void put(const T& value) {
    static_assert(std::is_trivially_copyable_v<T>);
    out_.write(reinterpret_cast<const char*>(&value), sizeof(T));
  }

  void put_bytes(const void* data, std::size_t n) {
    out_.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n));
  }

  void finish() {
    out_.flush();
    if (!out_) throw std::runtime_error("serialize: write failed: " + path_);
  }

 private:
  std::string path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
    require_little_endian();
    if (!in_) throw std::runtime_error("serialize: cannot open for reading: " + path);
  }

  template <typename T>
  T get() {
    static_assert(std::is_trivially_copyable_v<T>);
    T value;
    in_.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in_) throw std::runtime_error("serialize: truncated container: " + path_);
    return value;
  }

  void get_bytes(void* data, std::size_t n) {
    in_.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n));
    if (!in_) throw std::runtime_error("serialize: truncated container: " + path_);
  }

  void expect_eof() {
    in_.peek();
    if (!in_.eof()) throw std::runtime_error("serialize: trailing bytes in container: " + path_);
  }

 private:
  std::string path_;
  std::ifstream in_;
};

std::size_t bitmap_bytes(std::size_t count) { return (count + 7) / 8; }

template <typename Pred>
std::vector<std::uint8_t> pack_bitmap(Index count, Pred&& bit_at) {
  std::vector<std::uint8_t> bytes(bitmap_bytes(static_cast<std::size_t>(count)), 0);
  for (Index i = 0; i < count; ++i)
    if (bit_at(i)) bytes[static_cast<std::size_t>(i) / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  return bytes;
}

bool bitmap_get(const std::vector<std::uint8_t>& bytes, Index i) {
  return (bytes[static_cast<std::size_t>(i) / 8] >> (i % 8)) & 1u;
}

struct ModelHeader {
  std::uint16_t variant = 0;
  std::vector<Index> dims;
  int input_bits = 32, act_bits = 32, weight_bits = 32;
  std::vector<Activation> hidden_activations;
};

void write_model_header(Writer& w, std::uint16_t variant, const std::vector<Index>& dims,
                        int input_bits, int act_bits, int weight_bits,
                        const std::vector<Activation>& hidden) {
  if (dims.empty()) throw std::invalid_argument("serialize: model needs at least one layer width");
  w.put_bytes(kModelMagic, sizeof(kModelMagic));
  w.put<std::uint16_t>(kModelVersion);
  w.put<std::uint16_t>(variant);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(dims.size() - 1));
  for (Index d : dims) w.put<std::uint32_t>(static_cast<std::uint32_t>(d));
  w.put<std::uint8_t>(static_cast<std::uint8_t>(input_bits));
  w.put<std::uint8_t>(static_cast<std::uint8_t>(act_bits));
  w.put<std::uint8_t>(static_cast<std::uint8_t>(weight_bits));
  for (Activation a : hidden) w.put<std::uint8_t>(a == Activation::kTanh ? 0 : 1);
}

ModelHeader read_model_header(Reader& r, const std::string& path) {
  char magic[4];
  r.get_bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kModelMagic, sizeof(magic)) != 0)
    throw std::runtime_error("serialize: not a model container: " + path);
  const auto version = r.get<std::uint16_t>();
  if (version != kModelVersion)
    throw std::runtime_error("serialize: unsupported model version " + std::to_string(version));
  ModelHeader h;
  h.variant = r.get<std::uint16_t>();
  const auto n_layers = r.get<std::uint32_t>();
  h.dims.resize(n_layers + 1);
  for (auto& d : h.dims) d = static_cast<Index>(r.get<std::uint32_t>());
  h.input_bits = r.get<std::uint8_t>();
  h.act_bits = r.get<std::uint8_t>();
  h.weight_bits = r.get<std::uint8_t>();
  if (n_layers > 0) {
    h.hidden_activations.resize(n_layers - 1);
    for (auto& a : h.hidden_activations) {
      const auto code = r.get<std::uint8_t>();
      if (code > 1) throw std::runtime_error("serialize: unknown activation code");
      a = (code == 0) ? Activation::kTanh : Activation::kIdentity;
    }
  }
  return h;
}

void write_int8_tail(Writer& w, const QuantizedModel& q) {
  for (double s : q.act_scales) w.put<double>(s);
  for (const ActRange& r : q.act_ranges) {
    w.put<double>(r.lo);
    w.put<double>(r.hi);
  }
  w.put<double>(q.recorded_sparsity);
}

void read_int8_tail(Reader& r, QuantizedModel& q) {
  const std::size_t n_layers = q.dims.size() - 1;
  q.act_scales.resize(n_layers > 0 ? n_layers - 1 : 0);
  for (auto& s : q.act_scales) s = r.get<double>();
  q.act_ranges.resize(q.dims.size());
  for (auto& range : q.act_ranges) {
    range.lo = r.get<double>();
    range.hi = r.get<double>();
  }
  q.recorded_sparsity = r.get<double>();
}

}  // namespace

void save_model_fp32(const std::string& path, const MlpModel& model) {
  if (model.dims.size() >= 2) check_model(model);
  Writer w(path);
  write_model_header(w, kDenseF32, model.dims, 32, 32, 32, model.hidden_activations);
  w.put<std::uint8_t>(model.has_masks() ? 1 : 0);
  for (const auto& weights : model.weights)
    w.put_bytes(weights.data(), sizeof(float) * static_cast<std::size_t>(weights.size()));
  if (model.has_masks()) {
    for (const auto& mask : model.masks) {
      const auto bytes = pack_bitmap(mask.size(), [&](Index i) { return mask.data()[i] != 0.0f; });
      w.put_bytes(bytes.data(), bytes.size());
    }
  }
  w.finish();
}

MlpModel load_model_fp32(const std::string& path) {
  Reader r(path);
  const ModelHeader h = read_model_header(r, path);
  if (h.variant != kDenseF32)
    throw std::runtime_error("serialize: expected a dense fp32 model: " + path);
  MlpModel m;
  m.dims = h.dims;
  m.hidden_activations = h.hidden_activations;
  const bool has_masks = r.get<std::uint8_t>() != 0;
  for (std::size_t l = 0; l + 1 < h.dims.size(); ++l) {
    MatrixX<float> weights(h.dims[l], h.dims[l + 1]);
    r.get_bytes(weights.data(), sizeof(float) * static_cast<std::size_t>(weights.size()));
    m.weights.push_back(std::move(weights));
  }
  if (has_masks) {
    for (const auto& weights : m.weights) {
      std::vector<std::uint8_t> bytes(bitmap_bytes(static_cast<std::size_t>(weights.size())));
      r.get_bytes(bytes.data(), bytes.size());
      MatrixX<float> mask(weights.rows(), weights.cols());
      for (Index i = 0; i < mask.size(); ++i)
        mask.data()[i] = bitmap_get(bytes, i) ? 1.0f : 0.0f;
      m.masks.push_back(std::move(mask));
    }
  }
  r.expect_eof();
  if (m.dims.size() >= 2) check_model(m);
  return m;
}

void save_model_int8(const std::string& path, const QuantizedModel& model, bool sparse) {
  if (model.dims.size() < 2 || model.weights.size() != model.dims.size() - 1)
    throw std::invalid_argument("serialize: inconsistent quantized model");
  if (model.act_ranges.size() != model.dims.size())
    throw std::invalid_argument("serialize: quantized model lacks calibration ranges");
  Writer w(path);
  write_model_header(w, sparse ? kSparseI8 : kDenseI8, model.dims, model.input_bits,
                     model.act_bits, model.weight_bits, model.hidden_activations);
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    const Int8Matrix& weights = model.weights[l];
    w.put<double>(model.weight_scales[l]);
    if (!sparse) {
      w.put_bytes(weights.data(), static_cast<std::size_t>(weights.size()));
      continue;
    }
    const auto bytes = pack_bitmap(weights.size(), [&](Index i) { return weights.data()[i] != 0; });
    std::vector<std::int8_t> values;
    values.reserve(static_cast<std::size_t>(weights.size()));
    for (Index i = 0; i < weights.size(); ++i)
      if (weights.data()[i] != 0) values.push_back(weights.data()[i]);
    w.put<std::uint64_t>(values.size());
    w.put_bytes(bytes.data(), bytes.size());
    w.put_bytes(values.data(), values.size());
  }
  write_int8_tail(w, model);
  w.finish();
}

QuantizedModel load_model_int8(const std::string& path) {
  Reader r(path);
  const ModelHeader h = read_model_header(r, path);
  if (h.variant != kDenseI8 && h.variant != kSparseI8)
    throw std::runtime_error("serialize: expected an int8 model: " + path);
  QuantizedModel q;
  q.dims = h.dims;
  q.hidden_activations = h.hidden_activations;
  q.input_bits = h.input_bits;
  q.act_bits = h.act_bits;
  q.weight_bits = h.weight_bits;
  for (std::size_t l = 0; l + 1 < h.dims.size(); ++l) {
    Int8Matrix weights(h.dims[l], h.dims[l + 1]);
    q.weight_scales.push_back(r.get<double>());
    if (h.variant == kDenseI8) {
      r.get_bytes(weights.data(), static_cast<std::size_t>(weights.size()));
    } else {
      const auto nnz = r.get<std::uint64_t>();
      if (nnz > static_cast<std::uint64_t>(weights.size()))
        throw std::runtime_error("serialize: nonzero count exceeds layer size: " + path);
      std::vector<std::uint8_t> bytes(bitmap_bytes(static_cast<std::size_t>(weights.size())));
      r.get_bytes(bytes.data(), bytes.size());
      std::vector<std::int8_t> values(nnz);
      if (nnz > 0) r.get_bytes(values.data(), values.size());
      std::size_t next = 0;
      for (Index i = 0; i < weights.size(); ++i) {
        if (bitmap_get(bytes, i)) {
          if (next >= values.size())
            throw std::runtime_error("serialize: bitmap/value count mismatch: " + path);
          weights.data()[i] = values[next++];
        } else {
          weights.data()[i] = 0;
        }
      }
      if (next != values.size())
        throw std::runtime_error("serialize: bitmap/value count mismatch: " + path);
    }
    q.weights.push_back(std::move(weights));
  }
  read_int8_tail(r, q);
  r.expect_eof();
  return q;
}

std::uint64_t model_file_size(const std::string& path) {
  Reader r(path);
  read_model_header(r, path);  // validates magic and version
  return static_cast<std::uint64_t>(std::filesystem::file_size(path));
}

namespace {

void write_data_header(Writer& w, DataKind kind, std::uint64_t n_symbols, std::uint32_t sps,
                       double sample_rate_hz, double launch_power_dbm) {
  w.put_bytes(kDataMagic, sizeof(kDataMagic));
  w.put<std::uint32_t>(kDataVersion);
  w.put<std::uint32_t>(kind);
  w.put<std::uint64_t>(n_symbols);
  w.put<std::uint32_t>(sps);
  w.put<double>(sample_rate_hz);
  w.put<double>(launch_power_dbm);
}

struct DataHeader {
  DataKind kind;
  std::uint64_t n_symbols;
  std::uint32_t sps;
  double sample_rate_hz;
  double launch_power_dbm;
};

DataHeader read_data_header(Reader& r, const std::string& path, DataKind expected) {
  char magic[8];
  r.get_bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kDataMagic, sizeof(magic)) != 0)
    throw std::runtime_error("serialize: not a dataset container: " + path);
  const auto version = r.get<std::uint32_t>();
  if (version != kDataVersion)
    throw std::runtime_error("serialize: unsupported dataset version " + std::to_string(version));
  DataHeader h;
  h.kind = static_cast<DataKind>(r.get<std::uint32_t>());
  if (h.kind != expected)
    throw std::runtime_error("serialize: dataset kind mismatch: " + path);
  h.n_symbols = r.get<std::uint64_t>();
  h.sps = r.get<std::uint32_t>();
  h.sample_rate_hz = r.get<double>();
  h.launch_power_dbm = r.get<double>();
  return h;
}

void put_complex64(Writer& w, const Complex& z) {
  w.put<float>(static_cast<float>(z.real()));
  w.put<float>(static_cast<float>(z.imag()));
}

Complex get_complex64(Reader& r) {
  const float re = r.get<float>();
  const float im = r.get<float>();
  return Complex(re, im);
}

}  // namespace

void save_waveform(const std::string& path, const DualPolWaveform& w, Index n_symbols, int sps) {
  if (n_symbols <= 0 || sps < 1)
    throw std::invalid_argument("save_waveform: invalid symbol layout");
  if (w.h.size() != w.v.size() || w.h.size() < n_symbols * sps)
    throw std::invalid_argument("save_waveform: waveform shorter than n_symbols * sps");
  Writer out(path);
  write_data_header(out, kWaveform, static_cast<std::uint64_t>(n_symbols),
                    static_cast<std::uint32_t>(sps), w.sample_rate_hz, w.launch_power_dbm);
  const Index n = n_symbols * sps;
  for (Index i = 0; i < n; ++i) {
    put_complex64(out, w.h[i]);
    put_complex64(out, w.v[i]);
  }
  out.finish();
}

DualPolWaveform load_waveform(const std::string& path, Index* n_symbols, int* sps) {
  Reader r(path);
  const DataHeader h = read_data_header(r, path, kWaveform);
  const Index n = static_cast<Index>(h.n_symbols) * static_cast<Index>(h.sps);
  DualPolWaveform w;
  w.sample_rate_hz = h.sample_rate_hz;
  w.launch_power_dbm = h.launch_power_dbm;
  w.h.resize(n);
  w.v.resize(n);
  for (Index i = 0; i < n; ++i) {
    w.h[i] = get_complex64(r);
    w.v[i] = get_complex64(r);
  }
  r.expect_eof();
  if (n_symbols) *n_symbols = static_cast<Index>(h.n_symbols);
  if (sps) *sps = static_cast<int>(h.sps);
  return w;
}

void save_symbols(const std::string& path, const SymbolBlock& block, double sample_rate_hz) {
  const Index n = block.tx_h.size();
  if (n == 0 || block.tx_v.size() != n || block.rx_h.size() != n || block.rx_v.size() != n)
    throw std::invalid_argument("save_symbols: streams must be non-empty and equal length");
  Writer out(path);
  write_data_header(out, kSymbols, static_cast<std::uint64_t>(n), 1, sample_rate_hz,
                    block.launch_power_dbm);
  for (Index i = 0; i < n; ++i) {
    put_complex64(out, block.tx_h[i]);
    put_complex64(out, block.tx_v[i]);
    put_complex64(out, block.rx_h[i]);
    put_complex64(out, block.rx_v[i]);
  }
  out.finish();
}

SymbolBlock load_symbols(const std::string& path) {
  Reader r(path);
  const DataHeader h = read_data_header(r, path, kSymbols);
  const Index n = static_cast<Index>(h.n_symbols);
  SymbolBlock block;
  block.launch_power_dbm = h.launch_power_dbm;
  block.tx_h.resize(n);
  block.tx_v.resize(n);
  block.rx_h.resize(n);
  block.rx_v.resize(n);
  for (Index i = 0; i < n; ++i) {
    block.tx_h[i] = get_complex64(r);
    block.tx_v[i] = get_complex64(r);
    block.rx_h[i] = get_complex64(r);
    block.rx_v[i] = get_complex64(r);
  }
  r.expect_eof();
  return block;
}

}  // namespace opteq
