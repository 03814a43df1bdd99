#pragma once
// Behavioural preorders and equivalences on canonical terms.
//
// Two families are covered, plus the classical relations they degenerate to:
//
//  * Polarity-directed simulation (`cc_sim`): the left term's covariant and
//    bivariant moves must be simulated by the right term, while the right
//    term's contravariant and bivariant moves must be simulated by the left
//    term, with all successor pairs again related.  `cc_equiv` is the
//    induced equivalence (both directions).
//
//  * Conformance simulation (`conf_sim`): the left term's initial actions
//    must be offered by the right term, and for each action the left term
//    can do, every right move on it must be matched by some left move, with
//    successors again related.  `conf_precong` additionally requires the
//    right term's initials to be contained in the left term's (this is the
//    coarsest precongruence for choice contained in conf_sim);  `conf_equiv`
//    is conf_sim in both directions.
//
//  * `plain_sim`, `inverse_sim`, `bisim`, `ready_sim`, `ready_conf_sim`:
//    standard (inverse) simulation, bisimilarity, ready simulation, and the
//    ready variant of conformance simulation (conformance transfer, but only
//    between terms with equal ready sets).
//
// All checkers are exact decision procedures on finite terms (recursion with
// pair memoization; terms are well-founded, so no fixpoint iteration is
// needed).

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ccsim/action.hpp"
#include "ccsim/term.hpp"

namespace ccsim {

enum class RelationKind {
  cc_sim,
  cc_equiv,
  conf_sim,
  conf_precong,
  conf_equiv,
  plain_sim,
  inverse_sim,
  bisim,
  ready_sim,
  ready_conf_sim,
};

const char* to_string(RelationKind k);
std::optional<RelationKind> relation_from_string(std::string_view name);
const std::vector<RelationKind>& all_relations();

/// The pair and clause at which a failed check first breaks, phrased for
/// people.  For the two-directional relations the requirement text says
/// which direction broke, and lhs/rhs are that direction's pair.
struct FailingObligation {
  Term lhs, rhs;
  std::string requirement;
};

/// Result of one relation check.  When the verdict is true, `witness` is a
/// transfer-closed relation containing (lhs, rhs) — restricted to the pairs
/// the check actually visited — so it certifies the verdict by itself.  When
/// the verdict is false, `failure` explains the broken root obligation and
/// `witness` still lists the sub-pairs that were established.
struct Judgement {
  RelationKind kind;
  Term lhs, rhs;
  bool verdict = false;
  std::vector<std::pair<Term, Term>> witness;
  std::optional<FailingObligation> failure;
};

/// Full check with witness collection and failure explanation.
/// Throws std::invalid_argument when a term mentions an action the alphabet
/// does not declare.
Judgement check_relation(RelationKind kind, Term lhs, Term rhs, const Alphabet& alphabet);

/// Verdict only; no bookkeeping beyond the memo.  Same validation rules as
/// check_relation for the polarity-directed relations (they must look
/// polarities up); the uniform relations ignore polarity entirely and do not
/// validate.
bool relation_holds(RelationKind kind, Term lhs, Term rhs, const Alphabet& alphabet);

/// Reusable verdict engine: one alphabet, memo tables shared across calls.
/// Use this when checking many pairs; relation_holds() pays the memo warm-up
/// on every call.
class RelationChecker {
 public:
  explicit RelationChecker(Alphabet alphabet);
  ~RelationChecker();
  RelationChecker(RelationChecker&&) noexcept;
  RelationChecker& operator=(RelationChecker&&) noexcept;

  bool holds(RelationKind kind, Term lhs, Term rhs);
  const Alphabet& alphabet() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// A term's summands bucketed by the polarity of their action (fresh pool
/// actions count as covariant).  Throws std::invalid_argument on actions the
/// alphabet does not declare.
struct PolaritySplit {
  std::vector<Summand> covariant, contravariant, bivariant;
};
PolaritySplit split_by_polarity(Term t, const Alphabet& alphabet);

}  // namespace ccsim
