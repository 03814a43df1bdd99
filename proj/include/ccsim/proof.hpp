#pragma once
// Derivations in an axiom system.  A proof is a DAG of inference steps —
// reflexivity, instantiated axioms, transitivity chains, symmetry, and
// congruence under prefixing and summation — concluding one equation or
// inequation between closed terms.  The checker re-derives every node's
// statement from scratch and rejects anything the system does not license:
// unknown or open axiom instances, inadmissible substitutions, backward
// uses of inequational axioms, symmetry applied to an inequation, chains
// that do not connect, and terms that mention undeclared actions.
//
// Equational steps may appear inside an inequational proof (an equation
// entails both inequations); the reverse is checked away.  Shared
// subderivations are verified once per cache.

#include <cstddef>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ccsim/action.hpp"
#include "ccsim/axioms.hpp"
#include "ccsim/term.hpp"

namespace ccsim {

class ProofError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProofNode;
using ProofNodePtr = std::shared_ptr<const ProofNode>;

struct ProofNode {
  enum class Rule { refl, axiom, trans, sym, cong_prefix, cong_sum };

  Rule rule = Rule::refl;
  Term term;           // refl: the related term
  std::string schema;  // axiom: name within the proof's system
  Substitution subst;  // axiom: closed instantiation
  RewriteDirection direction = RewriteDirection::forward;  // axiom
  std::vector<ProofNodePtr> children;  // trans: the chain; sym/cong: one child
  ActionId action = 0;                 // cong_prefix
  Term remainder;                      // cong_sum: the summands added on both sides

  static ProofNodePtr refl(Term t);
  static ProofNodePtr axiom(std::string schema, Substitution subst,
                            RewriteDirection direction = RewriteDirection::forward);
  static ProofNodePtr trans(std::vector<ProofNodePtr> chain);
  static ProofNodePtr sym(ProofNodePtr child);
  static ProofNodePtr cong_prefix(ActionId action, ProofNodePtr child);
  static ProofNodePtr cong_sum(Term remainder, ProofNodePtr child);
};

/// What a node (or a whole proof) establishes.  Equations are symmetric;
/// inequations read left to right.
struct Statement {
  SchemaKind kind = SchemaKind::equation;
  Term lhs, rhs;
};

struct Proof {
  SchemaKind kind = SchemaKind::equation;  // the claim being made
  Term lhs, rhs;
  std::shared_ptr<const AxiomSet> axioms;
  Alphabet alphabet;
  ProofNodePtr root;
};

/// Statement memo for checking many proofs that share subderivations.
/// Entries are keyed by node address: keep the proofs alive while the cache
/// is in use.  One cache serves one axiom system and alphabet; mixing is
/// rejected with std::logic_error.
struct VerifyCache {
  std::unordered_map<const ProofNode*, Statement> statements;
  const AxiomSet* axioms = nullptr;
  std::string alphabet_text;
};

/// Checks every step and the claim, returning the root statement.
/// Throws ProofError when any step is ill-formed, when the root statement
/// differs from the claimed lhs/rhs, or when an equation is claimed but
/// only an inequation was derived.
Statement verify_proof(const Proof& proof);
Statement verify_proof(const Proof& proof, VerifyCache& cache);

/// Number of axiom instances in the derivation, counting each shared node
/// once; the sum laws' trivial instances count like any other.
std::size_t count_axiom_steps(const Proof& proof);

/// Axiom instances per schema name, shared nodes counted once.
std::map<std::string, std::size_t> axiom_step_counts(const Proof& proof);

/// Human-readable numbered listing of the derivation.  Verifies the proof
/// first (the statements shown are the re-derived ones) and so throws on
/// an invalid proof.
std::string to_text(const Proof& proof);

/// Self-contained JSON serialization: the claim, the alphabet, the axiom
/// system (by name when built in, in full text otherwise), and the nodes in
/// topological order.  proof_from_json reconstructs the proof but does not
/// verify it; it throws std::invalid_argument (or a JSON parse error) on
/// malformed input.
std::string proof_to_json(const Proof& proof);
Proof proof_from_json(std::string_view text);

}  // namespace ccsim
