#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace climd {

/// Rows are true classes, columns predicted classes.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t classes) : classes_(classes), cells_(classes * classes, 0) {}

  std::size_t classes() const { return classes_; }
  std::uint64_t at(std::size_t truth, std::size_t predicted) const {
    return cells_[truth * classes_ + predicted];
  }
  void add(std::size_t truth, std::size_t predicted);

  std::uint64_t total() const;
  std::uint64_t correct() const;
  std::uint64_t support(std::size_t cls) const;     // row sum
  std::uint64_t predicted(std::size_t cls) const;   // column sum

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::size_t classes_;
  std::vector<std::uint64_t> cells_;
};

ConfusionMatrix confusion(std::span<const std::size_t> truth, std::span<const std::size_t> predicted,
                          std::size_t classes);

/// Per-class F1, 0 where precision + recall is 0.
std::vector<double> per_class_f1(const ConfusionMatrix& cm);

double accuracy(const ConfusionMatrix& cm);
double macro_f1(const ConfusionMatrix& cm);
double weighted_f1(const ConfusionMatrix& cm);

struct MetricSummary {
  double accuracy = 0.0;
  double weighted_f1 = 0.0;
  double macro_f1 = 0.0;
};

MetricSummary summarize(const ConfusionMatrix& cm);

}  // namespace climd
