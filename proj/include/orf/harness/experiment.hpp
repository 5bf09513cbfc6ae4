#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "orf/data/dataset.hpp"
#include "orf/harness/metrics.hpp"
#include "orf/train/trainer.hpp"

namespace orf::harness {

struct ExperimentConfig {
  std::string mode = "within";  // "within" or "cross_family"
  data::SynthConfig corpus;
  train::TrainConfig train;
  std::array<double, 3> ratios = {0.90, 0.05, 0.05};
  uint64_t split_seed = 1;
  int mutants_per_method = 6;
  int max_hom_order = 2;
  char positive_class = 'P';
  std::vector<std::string> held_out;  // cross_family mode only
  std::filesystem::path out_dir;
};

// Seeded HOM generation across the corpus: up to `mutants_per_method` distinct
// mutants per method, orders cycling 1..max_hom_order.
std::vector<data::MutantRecord> generate_mutants(const data::Corpus& corpus,
                                                 int mutants_per_method, int max_hom_order,
                                                 uint64_t seed);

// 90/5/5-style split, two-phase training, test metrics vs the majority-class
// baseline. Writes report.json, verdicts.csv, metrics_per_family.csv, the
// dataset files, and the checkpoint under cfg.out_dir; returns the report.
nlohmann::json run_within_experiment(const ExperimentConfig& cfg);

// Trains on every family except cfg.held_out, then scores the held-out pairs
// next to the within-corpus test metrics (deltas + vocab-overlap statistic).
nlohmann::json run_cross_family_experiment(const ExperimentConfig& cfg);

uint64_t fnv1a(std::string_view bytes);
// Hash over the deterministic report content (the "timings" section and the
// hash field itself are excluded).
uint64_t report_content_hash(nlohmann::json report);

nlohmann::json metrics_to_json(const Metrics& m);

}  // namespace orf::harness
