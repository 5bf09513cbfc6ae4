#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "orf/data/corpus.hpp"
#include "orf/mj/method.hpp"

using namespace orf;

int main(int argc, char** argv) {
  CLI::App app{"MJ mini-language front end"};
  app.require_subcommand(1);

  auto* c_check = app.add_subcommand("check", "Parse and typecheck one method file");
  std::string check_file;
  c_check->add_option("file", check_file, "*.mj file")->required();

  auto* c_run = app.add_subcommand("run", "Execute one corpus test");
  std::string run_corpus, run_family, run_test;
  c_run->add_option("--corpus", run_corpus, "Corpus directory")->required();
  c_run->add_option("family", run_family, "Family name")->required();
  c_run->add_option("test-id", run_test, "Test id")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*c_check) {
      std::ifstream in(check_file);
      if (!in) throw std::runtime_error("cannot open " + check_file);
      std::stringstream buf;
      buf << in.rdbuf();
      mj::SourceMethod m = mj::parse_method(buf.str());
      std::cout << "ok: " << m.name << " (" << m.stmt_count << " statements)\n";
    } else if (*c_run) {
      data::Corpus corpus = data::load_corpus(run_corpus);
      const data::Family& fam = corpus.family(run_family);
      const UnitTest* test = nullptr;
      for (const auto& t : fam.tests)
        if (t.id == run_test) test = &t;
      if (!test) throw std::runtime_error("test '" + run_test + "' not found in " + run_family);
      mj::EvalOutcome outcome = mj::evaluate(fam.methods, test->calls);
      if (outcome.ok) {
        std::cout << "ok:";
        for (const auto& v : outcome.values) std::cout << " " << mj::print_value(v);
        std::cout << "\n";
      } else {
        std::cout << "error: " << mj::runtime_error_name(outcome.error) << "\n";
        return 1;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
