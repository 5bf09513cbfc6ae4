#include "orf/harness/metrics.hpp"

namespace orf::harness {

Metrics metrics_from_counts(size_t tp, size_t fp, size_t tn, size_t fn) {
  Metrics m;
  m.tp = tp;
  m.fp = fp;
  m.tn = tn;
  m.fn = fn;
  size_t total = m.total();
  if (total > 0) m.accuracy = static_cast<double>(tp + tn) / static_cast<double>(total);
  if (tp + fp > 0) m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (m.precision && m.recall && *m.precision + *m.recall > 0.0)
    m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
  return m;
}

Metrics compute_metrics(const std::vector<char>& predicted, const std::vector<char>& gold,
                        char positive) {
  if (predicted.empty()) throw EmptyInput("no verdicts to score");
  if (predicted.size() != gold.size()) throw std::invalid_argument("verdict/gold length mismatch");
  size_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (size_t i = 0; i < predicted.size(); ++i) {
    if ((predicted[i] != 'P' && predicted[i] != 'F') || (gold[i] != 'P' && gold[i] != 'F'))
      throw std::invalid_argument("labels must be 'P' or 'F'");
    bool pred_pos = predicted[i] == positive;
    bool gold_pos = gold[i] == positive;
    if (pred_pos && gold_pos) ++tp;
    else if (pred_pos && !gold_pos) ++fp;
    else if (!pred_pos && !gold_pos) ++tn;
    else ++fn;
  }
  return metrics_from_counts(tp, fp, tn, fn);
}

std::map<std::string, Metrics> compute_metrics_per_family(const std::vector<char>& predicted,
                                                          const std::vector<char>& gold,
                                                          const std::vector<std::string>& families,
                                                          char positive) {
  if (predicted.empty()) throw EmptyInput("no verdicts to score");
  if (predicted.size() != gold.size() || predicted.size() != families.size())
    throw std::invalid_argument("verdict/gold/family length mismatch");
  std::map<std::string, std::vector<size_t>> idx;
  for (size_t i = 0; i < families.size(); ++i) idx[families[i]].push_back(i);
  std::map<std::string, Metrics> out;
  for (const auto& [fam, ids] : idx) {
    std::vector<char> p, g;
    for (size_t i : ids) {
      p.push_back(predicted[i]);
      g.push_back(gold[i]);
    }
    out[fam] = compute_metrics(p, g, positive);
  }
  return out;
}

}  // namespace orf::harness
