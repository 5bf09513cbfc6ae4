#pragma once

#include <filesystem>
#include <stdexcept>

#include "orf/interpret/attention.hpp"

namespace orf::interpret {

struct TooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Writes an n x n grayscale grid (0 -> white, row-max -> black) with token
// labels to `svg_path`, plus a raw-weights CSV next to it (.csv extension).
// Throws TooLarge when n > 200.
void emit_heatmap(const AttentionMatrix& sa, const std::filesystem::path& svg_path);

// Reads back the companion CSV written by emit_heatmap.
AttentionMatrix load_heatmap_csv(const std::filesystem::path& csv_path);

}  // namespace orf::interpret
