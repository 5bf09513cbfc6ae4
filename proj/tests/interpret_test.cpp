#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "orf/interpret/attention.hpp"
#include "orf/interpret/heatmap.hpp"
#include "orf/interpret/lda.hpp"

using namespace orf::interpret;
using orf::nn::Tensor;

namespace {

namespace fs = std::filesystem;

Tensor row_stochastic(size_t n, std::mt19937_64& rng) {
  Tensor t(n, n);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (size_t j = 0; j < n; ++j) {
      t.at(i, j) = dist(rng) + 1e-6;
      sum += t.at(i, j);
    }
    for (size_t j = 0; j < n; ++j) t.at(i, j) /= sum;
  }
  return t;
}

AttentionMatrix matrix_of(Tensor w) {
  size_t n = w.rows;
  AttentionMatrix sa;
  sa.weights = std::move(w);
  for (size_t i = 0; i < n; ++i) {
    sa.tokens.push_back("tok" + std::to_string(i));
    sa.stmt_of_token.push_back(static_cast<int>(i / 4));  // 4 tokens per statement
  }
  return sa;
}

// Literal reference for the token/statement selection rules: mark every index
// in the top ceil(k/100*n) of some row (ties -> lower index), then keep each
// statement where strictly more than k% of its tokens are marked.
AttentionReport reference_analysis(const AttentionMatrix& sa, double k) {
  size_t n = sa.weights.rows;
  size_t top = static_cast<size_t>(std::ceil(k / 100.0 * static_cast<double>(n)));
  std::set<int> attended;
  for (size_t row = 0; row < n; ++row) {
    std::vector<std::pair<double, int>> entries;
    for (size_t j = 0; j < n; ++j)
      entries.push_back({sa.weights.at(row, j), static_cast<int>(j)});
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    for (size_t j = 0; j < top; ++j) attended.insert(entries[j].second);
  }
  AttentionReport out;
  out.k = k;
  for (int j : attended) out.atkn.emplace_back(sa.tokens[static_cast<size_t>(j)], j);
  std::set<int> stmts(sa.stmt_of_token.begin(), sa.stmt_of_token.end());
  for (int s : stmts) {
    size_t total = 0, hit = 0;
    for (size_t j = 0; j < n; ++j)
      if (sa.stmt_of_token[j] == s) {
        ++total;
        if (attended.count(static_cast<int>(j))) ++hit;
      }
    if (100.0 * static_cast<double>(hit) / static_cast<double>(total) > k) out.asmt.push_back(s);
  }
  return out;
}

bool reports_equal(const AttentionReport& a, const AttentionReport& b) {
  return a.atkn == b.atkn && a.asmt == b.asmt;
}

std::vector<std::vector<double>> gaussian_cloud(size_t n, double cx, double cy, double spread,
                                                std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, spread);
  std::vector<std::vector<double>> out;
  for (size_t i = 0; i < n; ++i) out.push_back({cx + dist(rng), cy + dist(rng)});
  return out;
}

}  // namespace

TEST_CASE("collapse_attention averages heads and renormalizes rows") {
  Tensor h1(2, 2), h2(2, 2);
  h1.data = {1.0, 0.0, 0.5, 0.5};
  h2.data = {0.0, 1.0, 0.5, 0.5};
  AttentionMatrix sa = collapse_attention({h1, h2}, {"a", "b"}, {0, 0});
  CHECK(sa.weights.at(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sa.weights.at(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sa.weights.at(1, 0) == doctest::Approx(0.5).epsilon(1e-12));
  for (size_t i = 0; i < 2; ++i)
    CHECK(sa.weights.at(i, 0) + sa.weights.at(i, 1) == doctest::Approx(1.0).epsilon(1e-12));

  // a single head passes through unchanged (already row stochastic)
  AttentionMatrix one = collapse_attention({h1}, {"a", "b"}, {0, 0});
  CHECK(one.weights.at(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(one.weights.at(1, 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("attention analysis on a worked 2x2 example") {
  Tensor w(2, 2);
  w.data = {0.9, 0.1, 0.2, 0.8};
  AttentionMatrix sa;
  sa.weights = w;
  sa.tokens = {"x", "y"};
  sa.stmt_of_token = {0, 1};
  AttentionReport rep = attention_analysis(sa, 50.0);
  // top ceil(0.5*2)=1 per row: row 0 -> index 0, row 1 -> index 1
  REQUIRE(rep.atkn.size() == 2);
  CHECK(rep.atkn[0] == std::pair<std::string, int>{"x", 0});
  CHECK(rep.atkn[1] == std::pair<std::string, int>{"y", 1});
  // each 1-token statement is fully attended: 100% > 50%
  CHECK(rep.asmt == std::vector<int>{0, 1});

  // same weights but both tokens in one statement: 2 of 2 attended, 100% > 50%
  sa.stmt_of_token = {0, 0};
  CHECK(attention_analysis(sa, 50.0).asmt == std::vector<int>{0});

  CHECK_THROWS_AS(attention_analysis(sa, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(attention_analysis(sa, 101.0), std::invalid_argument);
}

TEST_CASE("k = 100 saturates the attended set") {
  std::mt19937_64 rng(4);
  AttentionMatrix sa = matrix_of(row_stochastic(9, rng));
  AttentionReport rep = attention_analysis(sa, 100.0);
  CHECK(rep.atkn.size() == 9);
  // no statement can exceed 100% of its tokens
  CHECK(rep.asmt.empty());
}

TEST_CASE("statement membership needs strictly more than k percent of its tokens") {
  // one statement of 10 tokens; attend exactly 2 of them at k=20: 20% is not > 20%
  Tensor w(10, 10);
  for (size_t i = 0; i < 10; ++i) {
    w.at(i, 0) = 0.55;
    w.at(i, 1) = 0.40;
    for (size_t j = 2; j < 10; ++j) w.at(i, j) = 0.05 / 8.0;
  }
  AttentionMatrix sa;
  sa.weights = w;
  for (int i = 0; i < 10; ++i) {
    sa.tokens.push_back("t" + std::to_string(i));
    sa.stmt_of_token.push_back(0);
  }
  AttentionReport rep = attention_analysis(sa, 20.0);
  REQUIRE(rep.atkn.size() == 2);  // ceil(0.2*10)=2 per row, all rows identical
  CHECK(rep.asmt.empty());        // 2/10 = 20% is not strictly greater than 20%

  // at k=25 the top set has ceil(2.5)=3 indices and 30% > 25% admits the statement
  for (size_t i = 0; i < 10; ++i) w.at(i, 2) = 0.38;
  sa.weights = w;
  AttentionReport rep3 = attention_analysis(sa, 25.0);
  CHECK(rep3.atkn.size() == 3);
  CHECK(rep3.asmt == std::vector<int>{0});
}

TEST_CASE("analysis matches the exhaustive reference on random matrices") {
  std::mt19937_64 rng(77);
  for (int rep = 0; rep < 40; ++rep) {
    size_t n = 2 + static_cast<size_t>(rng() % 11);
    AttentionMatrix sa = matrix_of(row_stochastic(n, rng));
    for (double k : {5.0, 20.0, 37.5, 50.0, 80.0, 100.0}) {
      AttentionReport fast = attention_analysis(sa, k);
      AttentionReport slow = reference_analysis(sa, k);
      CAPTURE(n);
      CAPTURE(k);
      CHECK(reports_equal(fast, slow));
    }
  }
}

TEST_CASE("attended sets grow monotonically with k and obey the pigeonhole bound") {
  std::mt19937_64 rng(91);
  AttentionMatrix sa = matrix_of(row_stochastic(15, rng));
  std::set<int> prev;
  for (double k = 5.0; k <= 100.0; k += 5.0) {
    AttentionReport rep = attention_analysis(sa, k);
    std::set<int> cur;
    for (const auto& [tok, idx] : rep.atkn) cur.insert(idx);
    // every previously attended index stays attended
    for (int idx : prev) CHECK(cur.count(idx));
    // each row contributes ceil(k/100*n) indices, so the union is at least that big
    size_t top = static_cast<size_t>(std::ceil(k / 100.0 * 15.0));
    CHECK(cur.size() >= top);
    prev = cur;
  }
}

TEST_CASE("localization curve recounts hit percentages") {
  AttentionReport hit1, miss, hit2;
  hit1.asmt = {0, 3};
  miss.asmt = {1};
  hit2.asmt = {2};
  std::vector<std::vector<AttentionReport>> reports = {{hit1, miss}, {miss, hit2}, {miss, miss}};
  std::vector<std::vector<int>> buggy = {{3}, {2}, {0}};
  auto curve = localization_curve(reports, buggy, {10.0, 20.0});
  REQUIRE(curve.size() == 2);
  CHECK(curve[0].k == 10.0);
  CHECK(curve[0].percent == doctest::Approx(100.0 / 3.0).epsilon(1e-12));  // only pair 0 hits
  CHECK(curve[1].percent == doctest::Approx(100.0 / 3.0).epsilon(1e-12));  // only pair 1 hits
}

TEST_CASE("LDA separates displaced clusters along the displacement axis") {
  std::mt19937_64 rng(6);
  auto c0 = gaussian_cloud(80, -3.0, 0.0, 0.3, rng);
  auto c1 = gaussian_cloud(80, 3.0, 0.0, 0.3, rng);
  std::vector<std::vector<double>> all = c0;
  all.insert(all.end(), c1.begin(), c1.end());
  std::vector<int> labels(160, 0);
  std::fill(labels.begin() + 80, labels.end(), 1);

  LdaProjection p = lda_project(all, labels);
  REQUIRE(p.w.size() == 2);
  CHECK(std::hypot(p.w[0], p.w[1]) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(p.w[0]) > 0.99);  // x-axis dominates
  CHECK(p.overlap < 0.05);
  CHECK(((p.mean0 < p.mean1) == (p.projected[0] < p.projected[100])));

  // two draws from the same distribution are inseparable; the clouds are
  // large so 64-bin histogram sampling noise stays well below the bound
  auto b0 = gaussian_cloud(10000, -3.0, 0.0, 0.3, rng);
  auto b1 = gaussian_cloud(10000, -3.0, 0.0, 0.3, rng);
  std::vector<std::vector<double>> same = b0;
  same.insert(same.end(), b1.begin(), b1.end());
  std::vector<int> big_labels(20000, 0);
  std::fill(big_labels.begin() + 10000, big_labels.end(), 1);
  LdaProjection q = lda_project(same, big_labels);
  CHECK(q.overlap > 0.9);
}

TEST_CASE("LDA direction is within 2% of a dense random search optimum") {
  std::mt19937_64 rng(8);
  auto c0 = gaussian_cloud(60, 0.0, 0.0, 1.0, rng);
  auto c1 = gaussian_cloud(60, 2.0, 1.0, 1.0, rng);
  std::vector<std::vector<double>> all = c0;
  all.insert(all.end(), c1.begin(), c1.end());
  std::vector<int> labels(120, 0);
  std::fill(labels.begin() + 60, labels.end(), 1);

  LdaProjection p = lda_project(all, labels);
  double fisher_lda = fisher_criterion(all, labels, p.w);

  double best_random = 0.0;
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  for (int i = 0; i < 10000; ++i) {
    double a = angle(rng);
    best_random = std::max(best_random, fisher_criterion(all, labels, {std::cos(a), std::sin(a)}));
  }
  CHECK(fisher_lda >= best_random * 0.98);
}

TEST_CASE("LDA is invariant to a global rescaling of the embeddings") {
  std::mt19937_64 rng(10);
  auto c0 = gaussian_cloud(50, -1.0, 0.5, 0.5, rng);
  auto c1 = gaussian_cloud(50, 1.5, -0.5, 0.5, rng);
  std::vector<std::vector<double>> all = c0;
  all.insert(all.end(), c1.begin(), c1.end());
  std::vector<int> labels(100, 0);
  std::fill(labels.begin() + 50, labels.end(), 1);

  LdaProjection a = lda_project(all, labels);
  std::vector<std::vector<double>> scaled = all;
  for (auto& v : scaled)
    for (auto& x : v) x *= 1000.0;
  LdaProjection b = lda_project(scaled, labels);
  double sign = (a.w[0] * b.w[0] + a.w[1] * b.w[1]) < 0 ? -1.0 : 1.0;
  for (size_t i = 0; i < a.w.size(); ++i)
    CHECK(a.w[i] == doctest::Approx(sign * b.w[i]).epsilon(1e-9));
  CHECK(a.overlap == doctest::Approx(b.overlap).epsilon(1e-9));
}

TEST_CASE("LDA rejects degenerate inputs") {
  std::vector<std::vector<double>> pts = {{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}};
  CHECK_THROWS_AS(lda_project(pts, {0, 0, 0}), orf::data::DegenerateClasses);
  CHECK_THROWS_AS(lda_project(pts, {0, 0, 1}), orf::data::DegenerateClasses);
}

TEST_CASE("heatmap emission and CSV round trip") {
  fs::path dir = fs::temp_directory_path() / "orf_heatmap_test";
  fs::create_directories(dir);

  // trivial 1x1 case
  AttentionMatrix unit;
  unit.weights = Tensor(1, 1);
  unit.weights.at(0, 0) = 1.0;
  unit.tokens = {"x"};
  unit.stmt_of_token = {0};
  emit_heatmap(unit, dir / "unit.svg");
  std::ifstream svg_in(dir / "unit.svg");
  std::string svg((std::istreambuf_iterator<char>(svg_in)), std::istreambuf_iterator<char>());
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("#000000") != std::string::npos);  // the row max is black

  // general case with awkward token text and exact weight round trip
  std::mt19937_64 rng(12);
  AttentionMatrix sa = matrix_of(row_stochastic(6, rng));
  sa.tokens[0] = "\"quoted,comma\"";
  sa.tokens[1] = "<lt&amp>";
  emit_heatmap(sa, dir / "grid.svg");
  AttentionMatrix back = load_heatmap_csv(dir / "grid.csv");
  CHECK(back.tokens == sa.tokens);
  CHECK(back.stmt_of_token == sa.stmt_of_token);
  CHECK(back.weights.data == sa.weights.data);  // std::to_chars is exact

  // shade is monotone: a larger weight never renders lighter within a row
  std::ifstream grid_in(dir / "grid.svg");
  std::string grid((std::istreambuf_iterator<char>(grid_in)), std::istreambuf_iterator<char>());
  size_t first_fill = grid.find("fill=\"#", grid.find("<rect x="));
  CHECK(first_fill != std::string::npos);

  AttentionMatrix big;
  big.weights = Tensor(201, 201);
  big.tokens.assign(201, "t");
  big.stmt_of_token.assign(201, 0);
  CHECK_THROWS_AS(emit_heatmap(big, dir / "big.svg"), TooLarge);
  fs::remove_all(dir);
}
