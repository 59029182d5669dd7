#include "climd/metrics.hpp"

#include <numeric>
#include <string>

#include "climd/error.hpp"

namespace climd {
namespace {

void require_nonempty(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw ValidationError("metric undefined on an empty confusion matrix");
}

}  // namespace

void ConfusionMatrix::add(std::size_t truth, std::size_t predicted) {
  if (truth >= classes_ || predicted >= classes_) {
    throw ValidationError("label out of range: true=" + std::to_string(truth) +
                          " pred=" + std::to_string(predicted) + " classes=" + std::to_string(classes_));
  }
  ++cells_[truth * classes_ + predicted];
}

std::uint64_t ConfusionMatrix::total() const {
  return std::accumulate(cells_.begin(), cells_.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::correct() const {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < classes_; ++i) s += at(i, i);
  return s;
}

std::uint64_t ConfusionMatrix::support(std::size_t cls) const {
  std::uint64_t s = 0;
  for (std::size_t j = 0; j < classes_; ++j) s += at(cls, j);
  return s;
}

std::uint64_t ConfusionMatrix::predicted(std::size_t cls) const {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < classes_; ++i) s += at(i, cls);
  return s;
}

ConfusionMatrix confusion(std::span<const std::size_t> truth, std::span<const std::size_t> predicted,
                          std::size_t classes) {
  if (truth.size() != predicted.size()) {
    throw ValidationError("truth and prediction lists differ in length");
  }
  ConfusionMatrix cm(classes);
  for (std::size_t i = 0; i < truth.size(); ++i) cm.add(truth[i], predicted[i]);
  return cm;
}

std::vector<double> per_class_f1(const ConfusionMatrix& cm) {
  std::vector<double> f1(cm.classes(), 0.0);
  for (std::size_t c = 0; c < cm.classes(); ++c) {
    const double tp = static_cast<double>(cm.at(c, c));
    const double pred = static_cast<double>(cm.predicted(c));
    const double sup = static_cast<double>(cm.support(c));
    const double precision = pred > 0 ? tp / pred : 0.0;
    const double recall = sup > 0 ? tp / sup : 0.0;
    if (precision + recall > 0.0) f1[c] = 2.0 * precision * recall / (precision + recall);
  }
  return f1;
}

double accuracy(const ConfusionMatrix& cm) {
  require_nonempty(cm);
  return static_cast<double>(cm.correct()) / static_cast<double>(cm.total());
}

double macro_f1(const ConfusionMatrix& cm) {
  require_nonempty(cm);
  const auto f1 = per_class_f1(cm);
  return std::accumulate(f1.begin(), f1.end(), 0.0) / static_cast<double>(f1.size());
}

double weighted_f1(const ConfusionMatrix& cm) {
  require_nonempty(cm);
  const auto f1 = per_class_f1(cm);
  double s = 0.0;
  for (std::size_t c = 0; c < f1.size(); ++c) s += static_cast<double>(cm.support(c)) * f1[c];
  return s / static_cast<double>(cm.total());
}

MetricSummary summarize(const ConfusionMatrix& cm) {
  return {accuracy(cm), weighted_f1(cm), macro_f1(cm)};
}

}  // namespace climd
