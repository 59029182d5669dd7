#include "climd/simlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "climd/error.hpp"
#include "climd/kernels.hpp"
#include "climd/simlab/random.hpp"

namespace climd::simlab {
namespace {

double log_sum_exp(std::span<const double> z) {
  const double mx = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (double v : z) s += std::exp(v - mx);
  return mx + std::log(s);
}

void check_features(const FusionModel& model, std::span<const std::vector<double>> features) {
  if (features.size() != model.modalities()) {
    throw ValidationError("sample has " + std::to_string(features.size()) + " modalities, model expects " +
                          std::to_string(model.modalities()));
  }
  for (std::size_t m = 0; m < features.size(); ++m) {
    if (features[m].size() != model.dims[m]) {
      throw ValidationError("modality " + std::to_string(m) + " has dimension " +
                            std::to_string(features[m].size()) + ", model expects " +
                            std::to_string(model.dims[m]));
    }
  }
}

void fill_gaussian(Affine& layer, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(layer.in)));
  for (double& w : layer.weight) w = normal(rng);
}

}  // namespace

FusionModel FusionModel::zeros(std::span<const std::size_t> dims, std::size_t hidden, std::size_t classes) {
  if (dims.size() < 2) throw ValidationError("fusion model needs at least 2 modalities");
  if (hidden == 0 || classes < 2) throw ValidationError("fusion model needs hidden >= 1 and C >= 2");
  FusionModel m;
  m.classes = classes;
  m.hidden = hidden;
  m.dims.assign(dims.begin(), dims.end());
  for (std::size_t d : dims) {
    if (d == 0) throw ValidationError("modality dimension must be >= 1");
    m.encoders.emplace_back(d, hidden);
    m.aux_heads.emplace_back(hidden, classes);
  }
  m.head = Affine(hidden * dims.size(), classes);
  return m;
}

template <class Model, class Block>
std::vector<Block> collect_blocks(Model& model) {
  std::vector<Block> blocks;
  for (auto& e : model.encoders) {
    blocks.emplace_back(e.weight);
    blocks.emplace_back(e.bias);
  }
  blocks.emplace_back(model.head.weight);
  blocks.emplace_back(model.head.bias);
  for (auto& a : model.aux_heads) {
    blocks.emplace_back(a.weight);
    blocks.emplace_back(a.bias);
  }
  return blocks;
}

std::vector<std::span<double>> FusionModel::parameter_blocks() {
  return collect_blocks<FusionModel, std::span<double>>(*this);
}

std::vector<std::span<const double>> FusionModel::parameter_blocks() const {
  return collect_blocks<const FusionModel, std::span<const double>>(*this);
}

std::size_t FusionModel::parameter_count() const {
  std::size_t n = 0;
  for (auto b : parameter_blocks()) n += b.size();
  return n;
}

bool FusionModel::same_shape(const FusionModel& other) const {
  return classes == other.classes && hidden == other.hidden && dims == other.dims;
}

FusionModel init_model(std::span<const std::size_t> dims, std::size_t hidden, std::size_t classes,
                       std::uint64_t seed) {
  FusionModel m = FusionModel::zeros(dims, hidden, classes);
  auto rng = stream(seed, "model-init");
  for (auto& e : m.encoders) fill_gaussian(e, rng);
  fill_gaussian(m.head, rng);
  for (auto& a : m.aux_heads) fill_gaussian(a, rng);
  return m;
}

void softmax_inplace(std::span<double> z) {
  const double mx = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (double& v : z) {
    v = std::exp(v - mx);
    s += v;
  }
  for (double& v : z) v /= s;
}

ForwardPass forward(const FusionModel& model, std::span<const std::vector<double>> features) {
  check_features(model, features);
  const std::size_t mods = model.modalities();
  const std::size_t h = model.hidden;
  ForwardPass pass;
  pass.embeddings.resize(mods);
  pass.modality_logits.resize(mods);
  pass.modality_probs.resize(mods);
  std::vector<double> fused_input(mods * h);
  for (std::size_t m = 0; m < mods; ++m) {
    const auto& enc = model.encoders[m];
    auto& e = pass.embeddings[m];
    e.resize(h);
    kernels::affine(enc.weight, enc.bias, features[m], e);
    std::copy(e.begin(), e.end(), fused_input.begin() + static_cast<std::ptrdiff_t>(m * h));

    const auto& aux = model.aux_heads[m];
    auto& logits = pass.modality_logits[m];
    logits.resize(model.classes);
    kernels::affine(aux.weight, aux.bias, e, logits);
    pass.modality_probs[m] = logits;
    softmax_inplace(pass.modality_probs[m]);
  }
  pass.fused_logits.resize(model.classes);
  kernels::affine(model.head.weight, model.head.bias, fused_input, pass.fused_logits);
  pass.fused_probs = pass.fused_logits;
  softmax_inplace(pass.fused_probs);
  return pass;
}

double loss(const ForwardPass& pass, std::size_t label) {
  if (label >= pass.fused_logits.size()) throw ValidationError("label out of range");
  double total = log_sum_exp(pass.fused_logits) - pass.fused_logits[label];
  double aux = 0.0;
  for (const auto& z : pass.modality_logits) aux += log_sum_exp(z) - z[label];
  return total + aux / static_cast<double>(pass.modality_logits.size());
}

double accumulate_gradient(const FusionModel& model, std::span<const std::vector<double>> features,
                           std::size_t label, FusionModel& grad) {
  if (!model.same_shape(grad)) throw ValidationError("gradient buffer shape mismatch");
  const ForwardPass pass = forward(model, features);
  const double value = loss(pass, label);
  const std::size_t mods = model.modalities();
  const std::size_t h = model.hidden;
  const double aux_weight = 1.0 / static_cast<double>(mods);

  std::vector<double> fused_input(mods * h);
  for (std::size_t m = 0; m < mods; ++m) {
    std::copy(pass.embeddings[m].begin(), pass.embeddings[m].end(),
              fused_input.begin() + static_cast<std::ptrdiff_t>(m * h));
  }

  std::vector<double> dz = pass.fused_probs;
  dz[label] -= 1.0;
  kernels::rank1_update(grad.head.weight, 1.0, dz, fused_input);
  kernels::axpy(1.0, dz, grad.head.bias);
  std::vector<double> d_fused(mods * h, 0.0);
  kernels::affine_transpose_acc(model.head.weight, dz, d_fused);

  std::vector<double> da(model.classes);
  for (std::size_t m = 0; m < mods; ++m) {
    std::span<double> de(d_fused.data() + m * h, h);
    for (std::size_t c = 0; c < model.classes; ++c) {
      da[c] = aux_weight * (pass.modality_probs[m][c] - (c == label ? 1.0 : 0.0));
    }
    auto& gaux = grad.aux_heads[m];
    kernels::rank1_update(gaux.weight, 1.0, da, pass.embeddings[m]);
    kernels::axpy(1.0, da, gaux.bias);
    kernels::affine_transpose_acc(model.aux_heads[m].weight, da, de);

    auto& genc = grad.encoders[m];
    kernels::rank1_update(genc.weight, 1.0, de, features[m]);
    kernels::axpy(1.0, de, genc.bias);
  }
  return value;
}

std::size_t predict(const FusionModel& model, std::span<const std::vector<double>> features) {
  const auto pass = forward(model, features);
  return static_cast<std::size_t>(
      std::max_element(pass.fused_logits.begin(), pass.fused_logits.end()) - pass.fused_logits.begin());
}

}  // namespace climd::simlab
