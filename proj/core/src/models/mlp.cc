// Copyright 2026 The vflattack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vfl/models/mlp.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "vfl/errors.h"
#include "vfl/linalg/activations.h"

namespace vfl {
namespace {

constexpr double kLayerNormEps = 1e-5;

// z = x W^T + b. Accumulates rows of W^T so the inner loop is a contiguous
// axpy; the summation order per entry is still bias, then i ascending.
void Affine(const DenseLayer& layer, const Matrix& x, Matrix& z) {
  const std::size_t out = layer.weight.rows();
  const Matrix wt = layer.weight.transposed();
  z = Matrix(x.rows(), out);
  for (std::size_t b = 0; b < x.rows(); ++b) {
    auto xr = x.row(b);
    double* zr = z.row(b).data();
    std::copy(layer.bias.begin(), layer.bias.end(), zr);
    for (std::size_t i = 0; i < xr.size(); ++i) {
      const double xi = xr[i];
      const double* w = wt.row(i).data();
      for (std::size_t o = 0; o < out; ++o) zr[o] += xi * w[o];
    }
  }
}

void ApplyHead(Head head, Matrix& z) {
  switch (head) {
    case Head::kSoftmax:
      softmax_rows(z);
      break;
    case Head::kSigmoid:
      for (double& v : z.data()) v = sigmoid(v);
      break;
    case Head::kIdentity:
      break;
  }
}

// d loss / d z from d loss / d output for the head.
Matrix HeadBackward(Head head, const Matrix& output, const Matrix& grad) {
  Matrix dz = grad;
  switch (head) {
    case Head::kSoftmax:
      for (std::size_t b = 0; b < output.rows(); ++b) {
        auto v = output.row(b);
        auto g = dz.row(b);
        double gv = 0.0;
        for (std::size_t k = 0; k < v.size(); ++k) gv += g[k] * v[k];
        for (std::size_t k = 0; k < v.size(); ++k) g[k] = v[k] * (g[k] - gv);
      }
      break;
    case Head::kSigmoid: {
      auto v = output.data();
      auto g = dz.data();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] *= v[i] * (1.0 - v[i]);
      break;
    }
    case Head::kIdentity:
      break;
  }
  return dz;
}

double XavierBound(std::size_t fan_in, std::size_t fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

}  // namespace

std::string_view head_name(Head head) {
  switch (head) {
    case Head::kSoftmax:
      return "softmax";
    case Head::kSigmoid:
      return "sigmoid";
    case Head::kIdentity:
      return "identity";
  }
  return "softmax";
}

Head parse_head(std::string_view name) {
  if (name == "softmax") return Head::kSoftmax;
  if (name == "sigmoid") return Head::kSigmoid;
  if (name == "identity") return Head::kIdentity;
  throw InputError("unknown output head '" + std::string(name) + "'");
}

std::size_t MlpModel::num_parameters() const {
  std::size_t total = 0;
  for (const auto& l : layers) {
    total += l.weight.data().size() + l.bias.size() + l.ln_gain.size() + l.ln_bias.size();
  }
  return total;
}

void MlpModel::validate() const {
  if (sizes.size() < 2) throw InputError("mlp: need at least input and output sizes");
  if (layers.size() != sizes.size() - 1) throw InputError("mlp: layer count mismatch");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    if (layer.weight.rows() != sizes[l + 1] || layer.weight.cols() != sizes[l] ||
        layer.bias.size() != sizes[l + 1]) {
      throw InputError("mlp: layer " + std::to_string(l) + " shape does not chain");
    }
    const bool hidden = l + 1 < layers.size();
    const std::size_t ln = hidden && layer_norm ? sizes[l + 1] : 0;
    if (layer.ln_gain.size() != ln || layer.ln_bias.size() != ln) {
      throw InputError("mlp: layer " + std::to_string(l) + " layer-norm shape mismatch");
    }
    if (!(layer.dropout >= 0.0 && layer.dropout < 1.0)) {
      throw InputError("mlp: dropout must lie in [0, 1)");
    }
  }
}

MlpModel make_mlp(const MlpArchitecture& arch, Rng& rng) {
  if (arch.input == 0 || arch.output == 0) throw InputError("mlp: zero-width input/output");
  if (!(arch.dropout >= 0.0 && arch.dropout < 1.0)) {
    throw InputError("mlp: dropout must lie in [0, 1)");
  }
  MlpModel m;
  m.sizes.push_back(arch.input);
  for (std::size_t h : arch.hidden) {
    if (h == 0) throw InputError("mlp: zero-width hidden layer");
    m.sizes.push_back(h);
  }
  m.sizes.push_back(arch.output);
  m.head = arch.head;
  m.layer_norm = arch.layer_norm;

  for (std::size_t l = 0; l + 1 < m.sizes.size(); ++l) {
    const std::size_t in = m.sizes[l];
    const std::size_t out = m.sizes[l + 1];
    const bool hidden = l + 2 < m.sizes.size();
    DenseLayer layer;
    layer.weight = Matrix(out, in);
    layer.bias.assign(out, 0.0);
    if (arch.init == InitScheme::kXavierUniform) {
      const double bound = XavierBound(in, out);
      for (double& w : layer.weight.data()) w = rng.uniform(-bound, bound);
    } else {
      for (double& w : layer.weight.data()) w = arch.init_scale * rng.normal();
      for (double& b : layer.bias) b = arch.init_scale * rng.normal();
    }
    if (hidden && arch.layer_norm) {
      layer.ln_gain.assign(out, 1.0);
      layer.ln_bias.assign(out, 0.0);
    }
    layer.dropout = hidden ? arch.dropout : 0.0;
    m.layers.push_back(std::move(layer));
  }
  return m;
}

Matrix mlp_forward(const MlpModel& model, const Matrix& x, bool training, Rng* rng,
                   MlpCache* cache) {
  if (x.cols() != model.input_size()) {
    throw ShapeError("mlp_forward: input has " + std::to_string(x.cols()) +
                     " columns, model expects " + std::to_string(model.input_size()));
  }
  if (cache) cache->layers.assign(model.layers.size(), {});

  Matrix current = x;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const DenseLayer& layer = model.layers[l];
    const bool hidden = l + 1 < model.layers.size();
    Matrix z;
    Affine(layer, current, z);
    if (cache) cache->layers[l].input = std::move(current);
    if (!hidden) {
      current = std::move(z);
      break;
    }

    if (!layer.ln_gain.empty()) {
      Matrix normed(z.rows(), z.cols());
      Vector inv_std(z.rows());
      const double width = static_cast<double>(z.cols());
      for (std::size_t b = 0; b < z.rows(); ++b) {
        auto zr = z.row(b);
        double mean = 0.0;
        for (double v : zr) mean += v;
        mean /= width;
        double var = 0.0;
        for (double v : zr) var += (v - mean) * (v - mean);
        var /= width;
        inv_std[b] = 1.0 / std::sqrt(var + kLayerNormEps);
        auto nr = normed.row(b);
        for (std::size_t o = 0; o < zr.size(); ++o) {
          nr[o] = (zr[o] - mean) * inv_std[b];
          zr[o] = layer.ln_gain[o] * nr[o] + layer.ln_bias[o];
        }
      }
      if (cache) {
        cache->layers[l].normed = std::move(normed);
        cache->layers[l].inv_std = std::move(inv_std);
      }
    }

    for (double& v : z.data()) v = v > 0.0 ? v : 0.0;
    if (cache) cache->layers[l].active = z;

    if (training && layer.dropout > 0.0) {
      if (rng == nullptr) throw InputError("mlp_forward: dropout needs an Rng");
      Matrix mask(z.rows(), z.cols());
      const double keep_scale = 1.0 / (1.0 - layer.dropout);
      auto md = mask.data();
      auto zd = z.data();
      for (std::size_t i = 0; i < md.size(); ++i) {
        md[i] = rng->uniform() >= layer.dropout ? keep_scale : 0.0;
        zd[i] *= md[i];
      }
      if (cache) cache->layers[l].mask = std::move(mask);
    }
    current = std::move(z);
  }

  ApplyHead(model.head, current);
  if (cache) cache->output = current;
  return current;
}

Vector mlp_predict(const MlpModel& model, std::span<const double> x) {
  Matrix xm(1, x.size());
  xm.set_row(0, x);
  return mlp_forward(model, xm).row_vector(0);
}

MlpGradients mlp_backward(const MlpModel& model, const MlpCache& cache,
                          const Matrix& grad_output, bool param_grads) {
  if (cache.layers.size() != model.layers.size()) {
    throw InputError("mlp_backward: cache does not belong to this model");
  }
  if (grad_output.rows() != cache.output.rows() ||
      grad_output.cols() != cache.output.cols()) {
    throw ShapeError("mlp_backward: gradient shape does not match cached output");
  }
  MlpGradients grads;
  if (param_grads) {
    grads.layers.resize(model.layers.size());
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
      const auto& src = model.layers[l];
      auto& dst = grads.layers[l];
      dst.weight = Matrix(src.weight.rows(), src.weight.cols());
      dst.bias.assign(src.bias.size(), 0.0);
      dst.ln_gain.assign(src.ln_gain.size(), 0.0);
      dst.ln_bias.assign(src.ln_bias.size(), 0.0);
    }
  }

  Matrix dz = HeadBackward(model.head, cache.output, grad_output);
  for (std::size_t l = model.layers.size(); l-- > 0;) {
    const DenseLayer& layer = model.layers[l];
    const auto& c = cache.layers[l];
    const bool hidden = l + 1 < model.layers.size();

    if (hidden) {
      // dz currently holds d loss / d (layer output after dropout).
      if (!c.mask.empty()) {
        auto g = dz.data();
        auto m = c.mask.data();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] *= m[i];
      }
      {
        auto g = dz.data();
        auto a = c.active.data();
        for (std::size_t i = 0; i < g.size(); ++i) {
          if (a[i] <= 0.0) g[i] = 0.0;
        }
      }
      if (!layer.ln_gain.empty()) {
        const double width = static_cast<double>(dz.cols());
        for (std::size_t b = 0; b < dz.rows(); ++b) {
          auto g = dz.row(b);
          auto nr = c.normed.row(b);
          double sum_dxhat = 0.0;
          double sum_dxhat_xhat = 0.0;
          for (std::size_t o = 0; o < g.size(); ++o) {
            if (param_grads) {
              grads.layers[l].ln_gain[o] += g[o] * nr[o];
              grads.layers[l].ln_bias[o] += g[o];
            }
            const double dxhat = g[o] * layer.ln_gain[o];
            sum_dxhat += dxhat;
            sum_dxhat_xhat += dxhat * nr[o];
          }
          const double mean_dxhat = sum_dxhat / width;
          const double mean_dxhat_xhat = sum_dxhat_xhat / width;
          for (std::size_t o = 0; o < g.size(); ++o) {
            const double dxhat = g[o] * layer.ln_gain[o];
            g[o] = c.inv_std[b] * (dxhat - mean_dxhat - nr[o] * mean_dxhat_xhat);
          }
        }
      }
    }

    // dz is d loss / d (x W^T + b) for this layer.
    const Matrix& input = c.input;
    if (param_grads) {
      auto& gl = grads.layers[l];
      for (std::size_t b = 0; b < dz.rows(); ++b) {
        auto g = dz.row(b);
        auto xr = input.row(b);
        for (std::size_t o = 0; o < g.size(); ++o) {
          const double go = g[o];
          if (go == 0.0) continue;
          gl.bias[o] += go;
          auto gw = gl.weight.row(o);
          for (std::size_t i = 0; i < xr.size(); ++i) gw[i] += go * xr[i];
        }
      }
    }
    Matrix dx(dz.rows(), input.cols());
    for (std::size_t b = 0; b < dz.rows(); ++b) {
      auto g = dz.row(b);
      auto dxr = dx.row(b);
      for (std::size_t o = 0; o < g.size(); ++o) {
        const double go = g[o];
        if (go == 0.0) continue;
        auto w = layer.weight.row(o);
        for (std::size_t i = 0; i < dxr.size(); ++i) dxr[i] += go * w[i];
      }
    }
    dz = std::move(dx);
  }
  grads.input = std::move(dz);
  return grads;
}

void for_each_param(MlpModel& model, const MlpGradients& grads,
                    const std::function<void(std::span<double>, std::span<const double>)>& fn) {
  if (grads.layers.size() != model.layers.size()) {
    throw ShapeError("for_each_param: gradients do not match model");
  }
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    auto& p = model.layers[l];
    const auto& g = grads.layers[l];
    fn(p.weight.data(), g.weight.data());
    fn(p.bias, g.bias);
    if (!p.ln_gain.empty()) {
      fn(p.ln_gain, g.ln_gain);
      fn(p.ln_bias, g.ln_bias);
    }
  }
}

Optimizer::Optimizer(OptimizerKind kind, double learning_rate, double momentum,
                     double weight_decay)
    : kind_(kind), lr_(learning_rate), momentum_(momentum), weight_decay_(weight_decay) {}

void Optimizer::step(MlpModel& model, const MlpGradients& grads) {
  ++step_count_;
  std::size_t slot = 0;
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  const double bias1 = 1.0 - std::pow(kBeta1, static_cast<double>(step_count_));
  const double bias2 = 1.0 - std::pow(kBeta2, static_cast<double>(step_count_));
  for_each_param(model, grads, [&](std::span<double> p, std::span<const double> g) {
    if (first_.size() <= slot) {
      first_.emplace_back(p.size(), 0.0);
      second_.emplace_back(kind_ == OptimizerKind::kAdam ? p.size() : 0, 0.0);
    }
    Vector& m = first_[slot];
    Vector& s = second_[slot];
    ++slot;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double gi = g[i] + weight_decay_ * p[i];
      if (kind_ == OptimizerKind::kSgd) {
        m[i] = momentum_ * m[i] - lr_ * gi;
        p[i] += m[i];
      } else {
        m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * gi;
        s[i] = kBeta2 * s[i] + (1.0 - kBeta2) * gi * gi;
        p[i] -= lr_ * (m[i] / bias1) / (std::sqrt(s[i] / bias2) + 1e-8);
      }
    }
  });
}

double mlp_loss(MlpLoss loss, const Matrix& output, const Matrix& targets,
                Matrix* grad_output) {
  if (output.rows() != targets.rows() || output.cols() != targets.cols()) {
    throw ShapeError("mlp_loss: output/target shape mismatch");
  }
  const double inv_b = 1.0 / static_cast<double>(output.rows());
  if (grad_output) *grad_output = Matrix(output.rows(), output.cols());
  double total = 0.0;
  auto v = output.data();
  auto y = targets.data();
  if (loss == MlpLoss::kCrossEntropy) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (y[i] == 0.0) continue;
      const double p = std::max(v[i], 1e-300);
      total -= y[i] * std::log(p) * inv_b;
      if (grad_output) grad_output->data()[i] = -y[i] / p * inv_b;
    }
  } else {
    const double scale = inv_b / static_cast<double>(output.cols());
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double diff = v[i] - y[i];
      total += diff * diff * scale;
      if (grad_output) grad_output->data()[i] = 2.0 * diff * scale;
    }
  }
  return total;
}

MlpModel train_mlp(const Matrix& x, const Matrix& targets, const MlpTrainConfig& cfg) {
  if (x.rows() == 0) throw InputError("train_mlp: empty dataset");
  if (x.rows() != targets.rows()) throw ShapeError("train_mlp: x/target row mismatch");
  if (cfg.batch_size == 0) throw InputError("train_mlp: batch_size must be positive");
  if (cfg.loss == MlpLoss::kCrossEntropy && cfg.head != Head::kSoftmax) {
    throw InputError("train_mlp: cross-entropy requires the softmax head");
  }
  Rng root(cfg.seed);
  Rng init_rng = root.fork("init");
  Rng order_rng = root.fork("order");
  Rng dropout_rng = root.fork("dropout");

  MlpModel model = make_mlp(MlpArchitecture{x.cols(), cfg.hidden, targets.cols(), cfg.head,
                                            cfg.layer_norm, cfg.dropout, cfg.init,
                                            cfg.init_scale},
                            init_rng);
  Optimizer opt(cfg.optimizer, cfg.learning_rate, cfg.momentum, cfg.weight_decay);

  const std::size_t n = x.rows();
  MlpCache cache;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto order = order_rng.permutation(n);
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t stop = std::min(n, start + cfg.batch_size);
      Matrix xb(stop - start, x.cols());
      Matrix yb(stop - start, targets.cols());
      for (std::size_t i = start; i < stop; ++i) {
        xb.set_row(i - start, x.row(order[i]));
        yb.set_row(i - start, targets.row(order[i]));
      }
      const Matrix out = mlp_forward(model, xb, true, &dropout_rng, &cache);
      Matrix grad;
      const double loss = mlp_loss(cfg.loss, out, yb, &grad);
      if (!std::isfinite(loss)) {
        throw NumericError("train_mlp: non-finite loss at epoch " + std::to_string(epoch));
      }
      opt.step(model, mlp_backward(model, cache, grad));
    }
  }
  return model;
}

MlpModel train_mlp(const Dataset& data, const MlpTrainConfig& cfg) {
  if (data.size() == 0) throw InputError("train_mlp: empty dataset");
  data.validate();
  Matrix onehot(data.size(), static_cast<std::size_t>(data.num_classes));
  for (std::size_t i = 0; i < data.size(); ++i) {
    onehot(i, static_cast<std::size_t>(data.labels[i])) = 1.0;
  }
  return train_mlp(data.features, onehot, cfg);
}

}  // namespace vfl
