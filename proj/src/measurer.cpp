#include "climd/measurer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "climd/error.hpp"
#include "climd/kernels.hpp"
#include "climd/parallel.hpp"

namespace climd {
namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double norm(std::span<const double> v) { return std::sqrt(kernels::dot(v, v)); }

}  // namespace

void validate_probabilities(std::span<const double> probs) {
  if (probs.size() < 2) throw ValidationError("probability vector needs at least 2 classes");
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw ValidationError("probability entry outside [0, 1]");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kProbabilitySumTolerance) {
    std::ostringstream msg;
    msg << "probabilities sum to " << sum << ", expected 1";
    throw ValidationError(msg.str());
  }
}

double intra_modal_confidence(std::span<const double> probs, std::size_t label) {
  validate_probabilities(probs);
  if (label >= probs.size()) throw ValidationError("label out of range for probability vector");
  const double p = std::max(probs[label], kProbabilityFloor);
  return sigmoid(std::log(p) / static_cast<double>(probs.size()));
}

double pairwise_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("embeddings have different dimensions");
  if (a.empty()) throw ValidationError("embedding is empty");
  const double na = norm(a);
  const double nb = norm(b);
  if (!(na > 0.0) || !(nb > 0.0) || !std::isfinite(na) || !std::isfinite(nb)) {
    throw ValidationError("embedding has zero or non-finite norm");
  }
  const double s = kernels::dot(a, b) / (na * nb);
  return std::clamp(s, -1.0, 1.0);
}

double complementarity(std::span<const std::vector<double>> embeddings) {
  const std::size_t m = embeddings.size();
  if (m < 2) throw ValidationError("complementarity needs at least 2 modalities");
  // The similarity matrix is symmetric: sum the upper triangle twice.
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) sum += 2.0 * pairwise_similarity(embeddings[i], embeddings[j]);
  }
  return 1.0 - sum / static_cast<double>(m * (m - 1));
}

void validate_trace(const SampleTrace& trace) {
  if (trace.sample_id.empty()) throw ValidationError("sample has an empty id");
  if (trace.modalities.size() < 2) {
    throw ValidationError("sample " + trace.sample_id + " has fewer than 2 modalities");
  }
  const std::size_t c = trace.classes();
  for (const auto& mod : trace.modalities) {
    if (mod.probs.size() != c) {
      throw ValidationError("sample " + trace.sample_id + " mixes class counts across modalities");
    }
  }
  if (trace.label >= c) throw ValidationError("sample " + trace.sample_id + " has label >= C");
}

DifficultyRecord score_sample(const SampleTrace& trace) {
  validate_trace(trace);
  DifficultyRecord rec;
  rec.sample_id = trace.sample_id;
  rec.label = trace.label;
  rec.psi.reserve(trace.modalities.size());
  std::vector<std::vector<double>> embeddings;
  embeddings.reserve(trace.modalities.size());
  double psi_sum = 0.0;
  for (const auto& mod : trace.modalities) {
    rec.psi.push_back(intra_modal_confidence(mod.probs, trace.label));
    psi_sum += rec.psi.back();
    embeddings.push_back(mod.embedding);
  }
  rec.phi = complementarity(embeddings);
  rec.r = rec.phi + psi_sum / static_cast<double>(trace.modalities.size());
  return rec;
}

DifficultyTable score_dataset(std::span<const SampleTrace> traces, unsigned workers) {
  if (traces.empty()) return {};
  const std::size_t c = traces.front().classes();
  std::vector<std::string> problems;
  std::unordered_map<std::string_view, std::size_t> seen;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto& t = traces[i];
    if (t.classes() != c) {
      problems.push_back("row " + std::to_string(i + 1) + " (" + t.sample_id + "): has " +
                         std::to_string(t.classes()) + " classes, expected " + std::to_string(c));
    }
    auto [it, inserted] = seen.emplace(t.sample_id, i);
    if (!inserted) {
      problems.push_back("row " + std::to_string(i + 1) + ": duplicate sample_id " + t.sample_id +
                         " (first at row " + std::to_string(it->second + 1) + ")");
    }
  }
  if (!problems.empty()) {
    std::string msg = "invalid trace set:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ValidationError(msg);
  }

  DifficultyTable table(traces.size());
  parallel_for(traces.size(), workers, [&](std::size_t i) { table[i] = score_sample(traces[i]); });
  return table;
}

}  // namespace climd
