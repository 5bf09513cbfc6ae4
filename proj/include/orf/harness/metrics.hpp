#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace orf::harness {

struct EmptyInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Confusion counts and derived ratios. Ratios with a zero denominator are
// absent rather than zero.
struct Metrics {
  size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::optional<double> accuracy, precision, recall, f1;

  size_t total() const { return tp + fp + tn + fn; }
};

Metrics metrics_from_counts(size_t tp, size_t fp, size_t tn, size_t fn);

// Aligned sequences of predicted/gold labels ('P'/'F'); `positive` selects
// which label counts as the positive class.
Metrics compute_metrics(const std::vector<char>& predicted, const std::vector<char>& gold,
                        char positive = 'P');

// Per-family breakdown; summing the per-family counts reproduces the overall.
std::map<std::string, Metrics> compute_metrics_per_family(const std::vector<char>& predicted,
                                                          const std::vector<char>& gold,
                                                          const std::vector<std::string>& families,
                                                          char positive = 'P');

}  // namespace orf::harness
