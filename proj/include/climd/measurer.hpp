#pragma once

// Per-sample training difficulty from multimodal model outputs.
//
// For a sample with M modality outputs the difficulty is
//
//   r = phi + mean_m psi_m
//
// where psi_m = sigmoid(ln p_m[label] / C) is the confidence of modality m
// in the true class and phi = 1 - mean_{m != m'} cos(F_m, F_m') is the
// complementarity of the modality embeddings. Larger r means the modalities
// are confident and carry distinct information.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace climd {

/// Floor applied to probabilities before taking the log.
inline constexpr double kProbabilityFloor = 1e-12;
/// Allowed deviation of a probability vector's sum from 1.
inline constexpr double kProbabilitySumTolerance = 1e-6;

struct ModalityOutput {
  std::vector<double> probs;
  std::vector<double> embedding;
};

struct SampleTrace {
  std::string sample_id;
  std::size_t label = 0;
  std::vector<ModalityOutput> modalities;

  std::size_t classes() const { return modalities.empty() ? 0 : modalities.front().probs.size(); }
};

struct DifficultyRecord {
  std::string sample_id;
  std::size_t label = 0;
  std::vector<double> psi;  // one per modality, in (0, 0.5]
  double phi = 0.0;         // [0, 2]
  double r = 0.0;
};

using DifficultyTable = std::vector<DifficultyRecord>;

/// Throws ValidationError unless `probs` is a probability vector over >= 2 classes.
void validate_probabilities(std::span<const double> probs);

/// sigmoid(ln(max(probs[label], 1e-12)) / C) with C = probs.size().
double intra_modal_confidence(std::span<const double> probs, std::size_t label);

/// Cosine similarity; both vectors must be nonzero and equally long.
double pairwise_similarity(std::span<const double> a, std::span<const double> b);

/// 1 - (sum over ordered pairs m != m' of cos(e_m, e_m')) / (M (M - 1)), M >= 2.
double complementarity(std::span<const std::vector<double>> embeddings);

void validate_trace(const SampleTrace& trace);

DifficultyRecord score_sample(const SampleTrace& trace);

/// One record per trace, in input order. Traces must share C and have
/// unique ids. `workers` > 1 scores in parallel; the table is identical
/// for any worker count.
DifficultyTable score_dataset(std::span<const SampleTrace> traces, unsigned workers = 1);

}  // namespace climd
