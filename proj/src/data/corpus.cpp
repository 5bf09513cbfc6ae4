#include "orf/data/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "orf/mj/printer.hpp"

namespace orf::data {

using nlohmann::json;

const char* kFixtureCorrectSource =
    "num example_correct(num x) {\n"
    "    return abs(x) * (x + 2.0) * (x - 2.0);\n"
    "}\n";

const char* kFixtureBuggySource =
    "num example_buggy(num x) {\n"
    "    return abs(x * (x + 2.0) * (x - 2.0));\n"
    "}\n";

const Family& Corpus::family(const std::string& name) const {
  for (const auto& f : families)
    if (f.name == name) return f;
  throw std::runtime_error("unknown family '" + name + "'");
}

namespace {

const char* kFamilyNames[] = {"basin", "ridge", "lattice", "quarry", "harbor", "mesa", "delta", "sable"};

std::string family_name(int i) {
  if (i < static_cast<int>(std::size(kFamilyNames))) return kFamilyNames[i];
  return "fam" + std::to_string(i);
}

class Synth {
 public:
  explicit Synth(const SynthConfig& cfg) : cfg_(cfg) {}

  Corpus run() {
    Corpus corpus;
    for (int fi = 0; fi < cfg_.n_families; ++fi) {
      rng_.seed(cfg_.seed * 0x9e3779b97f4a7c15ull + static_cast<uint64_t>(fi) + 1);
      Family fam;
      fam.name = family_name(fi);
      gen_methods(fam, fi);
      gen_tests(fam);
      corpus.families.push_back(std::move(fam));
    }
    return corpus;
  }

 private:
  int irand(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double grid_point() {
    int steps = static_cast<int>((cfg_.grid_hi - cfg_.grid_lo) / cfg_.grid_step);
    return cfg_.grid_lo + cfg_.grid_step * irand(0, steps);
  }
  int nonzero(int lo, int hi) {
    int v = irand(lo, hi);
    return v == 0 ? 1 : v;
  }
  std::string numc() {
    // one-decimal constants, never 0.0
    int v = nonzero(-40, 40);
    return mj::print_num(v / 10.0);
  }
  std::string intc() { return std::to_string(nonzero(-5, 6)); }

  std::string method_source(const std::string& name, int shape) {
    std::ostringstream s;
    switch (shape) {
      case 0:
        s << "num " << name << "(num x) {\n    return abs(x) * (x + " << numc() << ") * (x - "
          << numc() << ");\n}\n";
        break;
      case 1:
        s << "num " << name << "(num x) {\n    if (x < " << numc() << ") {\n        return x * "
          << numc() << " + " << numc() << ";\n    }\n    return x * " << numc() << " - " << numc()
          << ";\n}\n";
        break;
      case 2: {
        int bound = irand(2, 7);
        s << "int " << name << "(int n) {\n    int i = 0;\n    int acc = " << intc()
          << ";\n    while (i < " << bound << ") {\n        acc = acc + i * " << intc()
          << " + n;\n        i = i + 1;\n    }\n    return acc;\n}\n";
        break;
      }
      case 3: {
        int d = irand(2, 5);
        s << "bool " << name << "(int a, int b) {\n    if (a < b) {\n        return a + " << intc()
          << " < b * " << std::to_string(irand(1, 3)) << ";\n    }\n    return a % " << d
          << " == " << irand(0, d - 1) << ";\n}\n";
        break;
      }
      case 4:
        s << "int " << name << "(int a, int b) {\n    int t = a * " << intc() << " + b * " << intc()
          << ";\n    if (t > " << intc() << ") {\n        t = t - " << intc()
          << ";\n    }\n    return t + " << intc() << ";\n}\n";
        break;
      default:
        s << "num " << name << "(num x, num y) {\n    num t = x * y + " << numc() << ";\n    if (t < "
          << numc() << ") {\n        t = abs(t) + " << numc() << ";\n    }\n    return t * " << numc()
          << ";\n}\n";
        break;
    }
    return s.str();
  }

  void gen_methods(Family& fam, int fi) {
    if (fi == 0) fam.methods.push_back(mj::parse_method(kFixtureCorrectSource));
    int next_shape = irand(0, 5);
    while (static_cast<int>(fam.methods.size()) < cfg_.methods_per_family) {
      std::string name = fam.name + "_f" + std::to_string(fam.methods.size());
      // the last family leans on its own shape mix so its token distribution
      // drifts from the rest of the corpus
      int shape = (fi == cfg_.n_families - 1) ? (next_shape % 3 + 3) : next_shape % 6;
      ++next_shape;
      for (int attempt = 0;; ++attempt) {
        if (attempt > 50) throw GenerationError("method template failed to typecheck: " + name);
        try {
          fam.methods.push_back(mj::parse_method(method_source(name, shape)));
          break;
        } catch (const std::exception&) {
        }
      }
    }
  }

  mj::Value arg_for(mj::MjType t) {
    switch (t) {
      case mj::MjType::Int: return static_cast<int64_t>(irand(-5, 5));
      case mj::MjType::Num: return grid_point();
      case mj::MjType::Bool: return irand(0, 1) == 1;
    }
    return int64_t{0};
  }

  void gen_tests(Family& fam) {
    for (size_t mi = 0; mi < fam.methods.size(); ++mi) {
      for (int j = 0; j < cfg_.tests_per_method; ++j) {
        UnitTest t;
        t.family = fam.name;
        t.id = "t" + std::to_string(mi) + "_" + std::to_string(j);
        for (int attempt = 0;; ++attempt) {
          if (attempt > 50) throw GenerationError("test generation failed for " + fam.name);
          t.calls.clear();
          int n_calls = irand(0, 9) < 7 ? 1 : 2;
          for (int c = 0; c < n_calls; ++c) {
            size_t target = (c == 0) ? mi : static_cast<size_t>(irand(0, static_cast<int>(fam.methods.size()) - 1));
            mj::Invocation inv;
            inv.method_name = fam.methods[target].name;
            for (const auto& [pname, ptype] : fam.methods[target].params)
              inv.args.push_back(arg_for(ptype));
            t.calls.push_back(std::move(inv));
          }
          if (mj::evaluate(fam.methods, t.calls).ok) break;
        }
        fam.tests.push_back(std::move(t));
      }
    }
  }

  SynthConfig cfg_;
  std::mt19937_64 rng_;
};

json value_to_json(const mj::Value& v) {
  switch (v.index()) {
    case 0: return std::get<int64_t>(v);
    case 1: return std::get<double>(v);
    default: return std::get<bool>(v);
  }
}

mj::Value value_from_json(const json& j) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_float()) return j.get<double>();
  return j.get<int64_t>();
}

}  // namespace

Corpus synth_corpus(const SynthConfig& config) { return Synth(config).run(); }

void save_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  for (const auto& fam : corpus.families) {
    fs::create_directories(dir / fam.name / "methods");
    for (const auto& m : fam.methods) {
      std::ofstream out(dir / fam.name / "methods" / (m.name + ".mj"));
      out << m.source;
    }
    json tests = json::array();
    for (const auto& t : fam.tests) {
      json calls = json::array();
      for (const auto& c : t.calls) {
        json args = json::array();
        for (const auto& a : c.args) args.push_back(value_to_json(a));
        calls.push_back({{"method", c.method_name}, {"args", args}});
      }
      tests.push_back({{"id", t.id}, {"calls", calls}});
    }
    std::ofstream out(dir / fam.name / "tests.json");
    out << json{{"family", fam.name}, {"tests", tests}}.dump(2) << "\n";
  }
}

Corpus load_corpus(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  Corpus corpus;
  std::vector<fs::path> fam_dirs;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_directory()) fam_dirs.push_back(entry.path());
  std::sort(fam_dirs.begin(), fam_dirs.end());
  for (const auto& fdir : fam_dirs) {
    Family fam;
    fam.name = fdir.filename().string();
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(fdir / "methods")) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      std::ifstream in(f);
      std::stringstream buf;
      buf << in.rdbuf();
      fam.methods.push_back(mj::parse_method(buf.str()));
    }
    std::ifstream in(fdir / "tests.json");
    json doc = json::parse(in);
    for (const auto& jt : doc.at("tests")) {
      UnitTest t;
      t.family = fam.name;
      t.id = jt.at("id").get<std::string>();
      for (const auto& jc : jt.at("calls")) {
        mj::Invocation inv;
        inv.method_name = jc.at("method").get<std::string>();
        for (const auto& ja : jc.at("args")) inv.args.push_back(value_from_json(ja));
        t.calls.push_back(std::move(inv));
      }
      fam.tests.push_back(std::move(t));
    }
    corpus.families.push_back(std::move(fam));
  }
  return corpus;
}

}  // namespace orf::data
