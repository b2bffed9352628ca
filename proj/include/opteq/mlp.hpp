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

#include "opteq/dsp.hpp"
#include "opteq/rng.hpp"
#include "opteq/types.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace opteq {

enum class Activation { kTanh, kIdentity };

/// Fully connected feed-forward network without biases.  weights[l] has
/// shape dims[l] x dims[l+1]; a batch is one sample per row, so layer l
/// computes activations(l) * weights[l].  The last layer is linear; every
/// hidden layer applies hidden_activations[l].
///
/// masks is either empty (dense model) or holds one 0/1 matrix per layer.
/// Masked weights are kept exactly zero in storage, so forward passes never
/// consult the masks; they exist to pin pruned positions during training.
template <typename Scalar>
struct MlpModelT {
  std::vector<Index> dims;
  std::vector<MatrixX<Scalar>> weights;
  std::vector<MatrixX<Scalar>> masks;
  std::vector<Activation> hidden_activations;

  Index n_layers() const { return static_cast<Index>(weights.size()); }
  bool has_masks() const { return !masks.empty(); }

  std::size_t weight_count() const {
    std::size_t n = 0;
    for (const auto& w : weights) n += static_cast<std::size_t>(w.size());
    return n;
  }
};

using MlpModel = MlpModelT<float>;

/// Zero-initialized model; dims needs at least an input and an output width.
template <typename Scalar>
MlpModelT<Scalar> make_mlp(const std::vector<Index>& dims, Activation hidden = Activation::kTanh) {
  if (dims.size() < 2) throw std::invalid_argument("make_mlp: need at least two layer widths");
  for (Index d : dims)
    if (d <= 0) throw std::invalid_argument("make_mlp: layer widths must be positive");
  MlpModelT<Scalar> m;
  m.dims = dims;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l)
    m.weights.push_back(MatrixX<Scalar>::Zero(dims[l], dims[l + 1]));
  m.hidden_activations.assign(dims.size() - 2, hidden);
  return m;
}

/// Uniform Glorot initialization: weights of layer l drawn i.i.d. from
/// +-sqrt(6 / (fan_in + fan_out)), layer by layer, row-major within a layer.
template <typename Scalar>
void init_glorot(MlpModelT<Scalar>& m, std::uint64_t seed) {
  UniformSampler rng(seed);
  for (auto& w : m.weights) {
    const double bound = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    for (Index r = 0; r < w.rows(); ++r)
      for (Index c = 0; c < w.cols(); ++c)
        w(r, c) = static_cast<Scalar>(bound * (2.0 * rng.next() - 1.0));
  }
}

template <typename Scalar>
MatrixX<Scalar> apply_activation(const MatrixX<Scalar>& z, Activation a) {
  switch (a) {
    case Activation::kTanh:
      return z.array().tanh().matrix();
    case Activation::kIdentity:
      return z;
  }
  throw std::invalid_argument("apply_activation: unknown activation");
}

template <typename Scalar>
struct ForwardCacheT {
  // act[0] is the input batch, act[l] the output of layer l after its
  // activation (the last layer is linear, so act.back() == pre.back()).
  std::vector<MatrixX<Scalar>> act;
  std::vector<MatrixX<Scalar>> pre;
};

template <typename Scalar>
void check_model(const MlpModelT<Scalar>& m) {
  if (m.dims.size() < 2 || m.weights.size() != m.dims.size() - 1)
    throw std::invalid_argument("mlp: inconsistent layer layout");
  if (m.hidden_activations.size() != m.dims.size() - 2)
    throw std::invalid_argument("mlp: one activation per hidden layer required");
  for (std::size_t l = 0; l < m.weights.size(); ++l)
    if (m.weights[l].rows() != m.dims[l] || m.weights[l].cols() != m.dims[l + 1])
      throw std::invalid_argument("mlp: weight shape mismatch");
  if (m.has_masks() && m.masks.size() != m.weights.size())
    throw std::invalid_argument("mlp: one mask per layer required");
}

/// Batched forward pass, one sample per row.  When cache is given, the
/// per-layer pre-activations and activations are stored for backprop.
template <typename Scalar>
MatrixX<Scalar> forward(const MlpModelT<Scalar>& m, const MatrixX<Scalar>& x,
                        ForwardCacheT<Scalar>* cache = nullptr) {
  check_model(m);
  if (x.cols() != m.dims.front())
    throw std::invalid_argument("forward: input width does not match dims[0]");
  if (cache) {
    cache->act.clear();
    cache->pre.clear();
    cache->act.push_back(x);
  }
  MatrixX<Scalar> a = x;
  for (Index l = 0; l < m.n_layers(); ++l) {
    MatrixX<Scalar> z = a * m.weights[static_cast<std::size_t>(l)];
    const bool is_hidden = l + 1 < m.n_layers();
    a = is_hidden ? apply_activation(z, m.hidden_activations[static_cast<std::size_t>(l)]) : z;
    if (cache) {
      cache->pre.push_back(std::move(z));
      cache->act.push_back(a);
    }
  }
  return a;
}

/// Mean squared error averaged over all batch entries and output units.
template <typename Scalar>
double mse_loss(const MatrixX<Scalar>& y, const MatrixX<Scalar>& t) {
  if (y.rows() != t.rows() || y.cols() != t.cols())
    throw std::invalid_argument("mse_loss: shape mismatch");
  if (y.size() == 0) throw std::invalid_argument("mse_loss: empty batch");
  return (y - t).template cast<double>().array().square().sum() /
         static_cast<double>(y.size());
}

/// Gradients of mse_loss(forward(m, x), targets) w.r.t. every weight
/// matrix, given the cache of the corresponding forward pass.
template <typename Scalar>
std::vector<MatrixX<Scalar>> backward_mse(const MlpModelT<Scalar>& m,
                                          const ForwardCacheT<Scalar>& cache,
                                          const MatrixX<Scalar>& targets) {
  const Index n_layers = m.n_layers();
  if (cache.pre.size() != static_cast<std::size_t>(n_layers) ||
      cache.act.size() != static_cast<std::size_t>(n_layers) + 1)
    throw std::invalid_argument("backward_mse: cache does not match model");
  const MatrixX<Scalar>& y = cache.act.back();
  if (y.rows() != targets.rows() || y.cols() != targets.cols())
    throw std::invalid_argument("backward_mse: target shape mismatch");

  std::vector<MatrixX<Scalar>> grads(static_cast<std::size_t>(n_layers));
  // dL/dz for the linear output layer.
  MatrixX<Scalar> g =
      (y - targets) * static_cast<Scalar>(2.0 / static_cast<double>(y.size()));
  for (Index l = n_layers - 1; l >= 0; --l) {
    const std::size_t lu = static_cast<std::size_t>(l);
    grads[lu] = cache.act[lu].transpose() * g;
    if (l == 0) break;
    g = g * m.weights[lu].transpose();
    switch (m.hidden_activations[lu - 1]) {
      case Activation::kTanh:
        // f'(z) = 1 - tanh(z)^2, reusing the cached activation.
        g = g.cwiseProduct(
            (MatrixX<Scalar>::Ones(g.rows(), g.cols()) - cache.act[lu].cwiseProduct(cache.act[lu])));
        break;
      case Activation::kIdentity:
        break;
    }
  }
  return grads;
}

/// Fraction of weights pinned to zero: mask-based when masks are present,
/// otherwise the fraction of exactly-zero stored weights.
template <typename Scalar>
double model_sparsity(const MlpModelT<Scalar>& m) {
  check_model(m);
  const std::size_t total = m.weight_count();
  if (total == 0) return 0.0;
  std::size_t zeros = 0;
  if (m.has_masks()) {
    for (const auto& mask : m.masks)
      zeros += static_cast<std::size_t>((mask.array() == Scalar(0)).count());
  } else {
    for (const auto& w : m.weights)
      zeros += static_cast<std::size_t>((w.array() == Scalar(0)).count());
  }
  return static_cast<double>(zeros) / static_cast<double>(total);
}

enum class Polarization { kH, kV };

/// Supervised dataset of sliding windows over a symbol block: one row per
/// central symbol k in [neighbors, L - neighbors), with 4 features per
/// window tap (Re rx_h, Im rx_h, Re rx_v, Im rx_v at k - neighbors .. k +
/// neighbors) and the transmitted symbol of the chosen polarization as the
/// (Re, Im) regression target.
template <typename Scalar>
struct WindowedDatasetT {
  MatrixX<Scalar> inputs;   // (L - 2 neighbors) x (4 * (2 neighbors + 1))
  MatrixX<Scalar> targets;  // (L - 2 neighbors) x 2
  int neighbors = 0;
  Polarization pol = Polarization::kH;
};

using WindowedDataset = WindowedDatasetT<float>;

template <typename Scalar>
WindowedDatasetT<Scalar> build_windows(const SymbolBlock& block, int neighbors,
                                       Polarization pol) {
  if (neighbors < 0) throw std::invalid_argument("build_windows: neighbors must be >= 0");
  const Index length = block.rx_h.size();
  if (length == 0 || block.rx_v.size() != length || block.tx_h.size() != length ||
      block.tx_v.size() != length)
    throw std::invalid_argument("build_windows: block streams must be non-empty and equal length");
  const Index rows = length - 2 * static_cast<Index>(neighbors);
  if (rows <= 0) throw std::invalid_argument("build_windows: block shorter than the window");

  const Index taps = 2 * static_cast<Index>(neighbors) + 1;
  WindowedDatasetT<Scalar> data;
  data.neighbors = neighbors;
  data.pol = pol;
  data.inputs.resize(rows, 4 * taps);
  data.targets.resize(rows, 2);
  const ArrayXc& tx = (pol == Polarization::kH) ? block.tx_h : block.tx_v;
  for (Index r = 0; r < rows; ++r) {
    const Index center = r + neighbors;
    for (Index m = 0; m < taps; ++m) {
      const Index i = center - neighbors + m;
      data.inputs(r, 4 * m + 0) = static_cast<Scalar>(block.rx_h[i].real());
      data.inputs(r, 4 * m + 1) = static_cast<Scalar>(block.rx_h[i].imag());
      data.inputs(r, 4 * m + 2) = static_cast<Scalar>(block.rx_v[i].real());
      data.inputs(r, 4 * m + 3) = static_cast<Scalar>(block.rx_v[i].imag());
    }
    data.targets(r, 0) = static_cast<Scalar>(tx[center].real());
    data.targets(r, 1) = static_cast<Scalar>(tx[center].imag());
  }
  return data;
}

/// Sliding-window dataset enlarged by exact symmetries of the channel and
/// linear receiver: polarization swap, global rotation by a quarter turn
/// (which maps the square QAM grid onto itself), and time reversal.  Fold
/// f of the fixed 16-element enumeration applies polarization swap for
/// f >= 8, rotation by i^((f % 8) / 2), and time reversal for odd f; fold
/// 0 is the untransformed block, and `folds` must be 1, 2, 8, or 16 so
/// the enumeration closes under the subgroup it uses.  Rows are the folds
/// concatenated in order, each laid out exactly as build_windows.
template <typename Scalar>
WindowedDatasetT<Scalar> build_windows_augmented(const SymbolBlock& block, int neighbors,
                                                 Polarization pol, int folds) {
  if (folds != 1 && folds != 2 && folds != 8 && folds != 16)
    throw std::invalid_argument("build_windows_augmented: folds must be 1, 2, 8, or 16");
  if (folds == 1) return build_windows<Scalar>(block, neighbors, pol);

  static const Complex kQuarterTurns[4] = {Complex(1.0, 0.0), Complex(0.0, 1.0),
                                           Complex(-1.0, 0.0), Complex(0.0, -1.0)};
  WindowedDatasetT<Scalar> data;
  data.neighbors = neighbors;
  data.pol = pol;
  Index rows = 0;
  for (int f = 0; f < folds; ++f) {
    SymbolBlock b = (f < 8) ? block : swap_polarizations(block);
    const int quarter_turns = (f % 8) / 2;
    if (quarter_turns != 0) b = rotate_phase(b, kQuarterTurns[quarter_turns]);
    if (f % 2 == 1) b = reverse_time(b);
    const WindowedDatasetT<Scalar> part = build_windows<Scalar>(b, neighbors, pol);
    if (f == 0) {
      rows = part.inputs.rows();
      data.inputs.resize(rows * folds, part.inputs.cols());
      data.targets.resize(rows * folds, part.targets.cols());
    }
    data.inputs.middleRows(static_cast<Index>(f) * rows, rows) = part.inputs;
    data.targets.middleRows(static_cast<Index>(f) * rows, rows) = part.targets;
  }
  return data;
}

/// Interprets a two-column prediction matrix as complex symbols.
template <typename Scalar>
ArrayXc predictions_to_symbols(const MatrixX<Scalar>& y) {
  if (y.cols() != 2) throw std::invalid_argument("predictions_to_symbols: expected 2 columns");
  ArrayXc s(y.rows());
  for (Index r = 0; r < y.rows(); ++r)
    s[r] = Complex(static_cast<double>(y(r, 0)), static_cast<double>(y(r, 1)));
  return s;
}

/// Bit error ratio and Q of the model acting as a nonlinear equalizer on
/// the central symbols of the block (edges lack full windows).
template <typename Scalar>
QualityMetrics evaluate_q(const MlpModelT<Scalar>& model, const SymbolBlock& block,
                          int neighbors, Polarization pol = Polarization::kH) {
  const WindowedDatasetT<Scalar> data = build_windows<Scalar>(block, neighbors, pol);
  const ArrayXc predicted = predictions_to_symbols(forward(model, data.inputs));
  const ArrayXc& tx = (pol == Polarization::kH) ? block.tx_h : block.tx_v;
  const ArrayXc reference = tx.segment(neighbors, data.inputs.rows());
  return measure_quality(predicted, reference);
}

}  // namespace opteq
