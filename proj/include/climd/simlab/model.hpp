#pragma once

// Early-fusion classifier used as the training baseline.
//
//   e_m = W_m x_m + b_m                    per-modality encoder (embedding)
//   p   = softmax(W_h [e_1; ...; e_M] + b_h)   fused head
//   p_m = softmax(A_m e_m + a_m)           auxiliary per-modality heads
//
// Loss: CE(p, y) + (1/M) sum_m CE(p_m, y).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace climd::simlab {

struct Affine {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weight;  // out x in, row-major
  std::vector<double> bias;    // out

  Affine() = default;
  Affine(std::size_t in_dim, std::size_t out_dim)
      : in(in_dim), out(out_dim), weight(in_dim * out_dim, 0.0), bias(out_dim, 0.0) {}
};

struct FusionModel {
  std::size_t classes = 0;
  std::size_t hidden = 0;
  std::vector<std::size_t> dims;
  std::vector<Affine> encoders;
  Affine head;
  std::vector<Affine> aux_heads;

  /// All-zero parameters with the given shapes.
  static FusionModel zeros(std::span<const std::size_t> dims, std::size_t hidden, std::size_t classes);

  std::size_t modalities() const { return dims.size(); }
  /// Every parameter array, in a fixed order.
  std::vector<std::span<double>> parameter_blocks();
  std::vector<std::span<const double>> parameter_blocks() const;
  std::size_t parameter_count() const;
  bool same_shape(const FusionModel& other) const;
};

/// Gaussian init with variance 1/fan_in, zero biases.
FusionModel init_model(std::span<const std::size_t> dims, std::size_t hidden, std::size_t classes,
                       std::uint64_t seed);

struct ForwardPass {
  std::vector<std::vector<double>> embeddings;      // per modality, length hidden
  std::vector<std::vector<double>> modality_logits;
  std::vector<std::vector<double>> modality_probs;
  std::vector<double> fused_logits;
  std::vector<double> fused_probs;
};

ForwardPass forward(const FusionModel& model, std::span<const std::vector<double>> features);

/// Loss of a forward pass for the true class.
double loss(const ForwardPass& pass, std::size_t label);

/// Adds the gradient of the sample loss to `grad` and returns the loss.
double accumulate_gradient(const FusionModel& model, std::span<const std::vector<double>> features,
                           std::size_t label, FusionModel& grad);

/// Index of the largest fused probability (lowest index on ties).
std::size_t predict(const FusionModel& model, std::span<const std::vector<double>> features);

void softmax_inplace(std::span<double> logits);

}  // namespace climd::simlab
