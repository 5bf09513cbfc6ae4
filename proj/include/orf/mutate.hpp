#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "orf/mj/method.hpp"

namespace orf {

enum class MutationOperator { AOR, ROR, LOR, NegCond, ConstRep, ParenShift };

const char* operator_name(MutationOperator op);
MutationOperator operator_from_name(const std::string& name);

// A mutation site. `node` is the pre-order index of the expression node
// within its statement, except for ParenShift where it is the offset of the
// shifted ')' token within the statement's token span. ConstRep on int
// literals has two rewrites (c -> c+1 and c -> 0) distinguished by `variant`;
// all other sites use variant 0.
struct Mutable {
  MutationOperator op;
  int stmt = 0;
  int node = 0;
  int variant = 0;

  bool operator==(const Mutable&) const = default;
};

struct Mutant {
  std::string source;
  std::vector<Mutable> applied;
  int order = 0;
  std::string parent;
};

struct NotApplicable : std::runtime_error {
  NotApplicable() : std::runtime_error("mutable no longer matches its site") {}
};

struct NoMutant : std::runtime_error {
  NoMutant() : std::runtime_error("no mutation could be applied") {}
};

// All individually applicable sites, in deterministic source order
// (statement id, node index, operator, variant). Every returned site yields
// a parseable, typechecking first-order mutant.
std::vector<Mutable> enumerate_mutables(const mj::SourceMethod& method);

// Rewritten full-method source for one site. Throws NotApplicable when the
// node at the location does not match the operator's pattern.
std::string apply_mutable(const mj::SourceMethod& method, const Mutable& m);

// Algorithm: walk the unique sites (enumeration order of the original
// method, optionally shuffled), applying each to the accumulated mutant.
// Sites whose shape changed under earlier rewrites are skipped; the first
// non-compilable result is reverted and terminates the walk. Throws NoMutant
// when nothing could be applied.
Mutant generate_hom(const mj::SourceMethod& method, int order, std::mt19937_64& rng,
                    bool shuffle = false);

}  // namespace orf
