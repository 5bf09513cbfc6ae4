#include "orf/interpret/heatmap.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace orf::interpret {

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  return out + "\"";
}

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void emit_heatmap(const AttentionMatrix& sa, const std::filesystem::path& svg_path) {
  size_t n = sa.weights.rows;
  if (n > 200) throw TooLarge("heatmap capped at 200 tokens, got " + std::to_string(n));

  constexpr int cell = 14, label = 90, font = 9;
  int size = label + static_cast<int>(n) * cell;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
      << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (size_t i = 0; i < n; ++i) {
    double row_max = 0.0;
    for (size_t j = 0; j < n; ++j) row_max = std::max(row_max, sa.weights.at(i, j));
    for (size_t j = 0; j < n; ++j) {
      double shade = row_max > 0.0 ? sa.weights.at(i, j) / row_max : 0.0;
      int gray = static_cast<int>(std::lround(255.0 * (1.0 - shade)));
      char color[8];
      std::snprintf(color, sizeof(color), "#%02x%02x%02x", gray, gray, gray);
      svg << "<rect x=\"" << label + static_cast<int>(j) * cell << "\" y=\""
          << label + static_cast<int>(i) * cell << "\" width=\"" << cell << "\" height=\"" << cell
          << "\" fill=\"" << color << "\"/>\n";
    }
  }
  for (size_t i = 0; i < n; ++i) {
    int mid = label + static_cast<int>(i) * cell + cell / 2 + font / 2;
    svg << "<text x=\"" << label - 4 << "\" y=\"" << mid << "\" font-size=\"" << font
        << "\" text-anchor=\"end\" font-family=\"monospace\">" << xml_escape(sa.tokens[i])
        << "</text>\n";
    svg << "<text x=\"" << label + static_cast<int>(i) * cell + cell / 2 << "\" y=\"" << label - 4
        << "\" font-size=\"" << font
        << "\" text-anchor=\"start\" font-family=\"monospace\" transform=\"rotate(-60 "
        << label + static_cast<int>(i) * cell + cell / 2 << " " << label - 4 << ")\">"
        << xml_escape(sa.tokens[i]) << "</text>\n";
  }
  svg << "</svg>\n";
  std::ofstream out(svg_path);
  if (!out) throw std::runtime_error("cannot write " + svg_path.string());
  out << svg.str();

  std::filesystem::path csv_path = svg_path;
  csv_path.replace_extension(".csv");
  std::ofstream csv(csv_path);
  csv << "token,stmt";
  for (size_t j = 0; j < n; ++j) csv << "," << csv_escape(sa.tokens[j]);
  csv << "\n";
  char buf[64];
  for (size_t i = 0; i < n; ++i) {
    csv << csv_escape(sa.tokens[i]) << "," << sa.stmt_of_token[i];
    for (size_t j = 0; j < n; ++j) {
      auto res = std::to_chars(buf, buf + sizeof(buf), sa.weights.at(i, j));
      csv << "," << std::string_view(buf, static_cast<size_t>(res.ptr - buf));
    }
    csv << "\n";
  }
}

AttentionMatrix load_heatmap_csv(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot open " + csv_path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty csv " + csv_path.string());
  size_t n = csv_split(line).size() - 2;
  AttentionMatrix out;
  out.weights = nn::Tensor(n, n);
  size_t row = 0;
  while (std::getline(in, line) && row < n) {
    auto cells = csv_split(line);
    out.tokens.push_back(cells[0]);
    out.stmt_of_token.push_back(std::stoi(cells[1]));
    for (size_t j = 0; j < n; ++j) {
      double v = 0.0;
      std::from_chars(cells[2 + j].data(), cells[2 + j].data() + cells[2 + j].size(), v);
      out.weights.at(row, j) = v;
    }
    ++row;
  }
  return out;
}

}  // namespace orf::interpret
