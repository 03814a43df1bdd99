#pragma once
// Proof construction for the axiomatized behavioural relations.
//
// Each prover decides its relation first and, on a positive verdict, builds
// a derivation in the matching builtin axiom system.  The constructions
// replay the systems' completeness arguments rather than searching for
// short proofs: terms are transformed summand by summand through absorption
// chains (p = p + q style), with congruence steps wrapping recursively
// proved sub-statements.  Every returned proof has been checked by
// verify_proof, so the result is valid by construction; when the relation
// does not hold the prover returns std::nullopt instead.
//
// The relation/system pairing is the builtin one:
//
//   cc_sim        -> cc_preorder       (inequational claim)
//   conf_precong  -> cs_precongruence  (inequational claim)
//   cc_equiv      -> cc_equivalence    (equational claim; needs A^bi = {})
//   conf_equiv    -> cs_equivalence    (equational claim)

#include <memory>
#include <optional>
#include <string_view>

#include "ccsim/action.hpp"
#include "ccsim/axioms.hpp"
#include "ccsim/proof.hpp"
#include "ccsim/semantics.hpp"
#include "ccsim/term.hpp"

namespace ccsim {

// ── Reusable factory ────────────────────────────────────────────────────────

/// Proof builder for one axiomatized relation over one alphabet.  The
/// factory keeps the relation checker's memo tables, already-built
/// subderivations, and the verification cache alive across calls, so
/// checking many pairs stays cheap and structurally shared.  The flip side
/// is that memory grows with every distinct pair proved; callers covering
/// very large pair sets should retire the factory periodically and start a
/// fresh one (completeness_sweep does this internally).
/// Not safe for concurrent use; build one factory per thread (the free
/// functions below are pure and do exactly that).
///
/// The constructor throws std::invalid_argument when the relation has no
/// bundled axiom system, and — for cc_equiv — when the alphabet declares
/// bivariant actions, since the equivalence system only covers alphabets
/// without them.
class ProofFactory {
 public:
  ProofFactory(RelationKind kind, Alphabet alphabet);
  ~ProofFactory();
  ProofFactory(ProofFactory&&) noexcept;
  ProofFactory& operator=(ProofFactory&&) noexcept;

  RelationKind kind() const;
  const Alphabet& alphabet() const;
  const std::shared_ptr<const AxiomSet>& axioms() const;

  /// A verified proof of lhs R rhs, or std::nullopt when the relation does
  /// not hold.  Throws std::invalid_argument when a term mentions an action
  /// the alphabet does not declare.
  std::optional<Proof> prove(Term lhs, Term rhs);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// ── One-shot provers ────────────────────────────────────────────────────────

/// Inequational proof of p <= q over the cc_preorder system iff the
/// polarity-directed simulation holds.  Missing covariant capabilities of q
/// are grown from 0 stubs (or added outright when their subterm cannot be
/// grown), contravariant and bivariant summands are transferred through the
/// simulation's matching moves, and leftover summands of p are removed.
std::optional<Proof> prove_cc_preorder(Term p, Term q, const Alphabet& alphabet);

/// Inequational proof of p <= q over the cs_precongruence system iff the
/// conformance precongruence holds.  Each summand of q is reached from the
/// summand of p that simulates it, splitting the target's fresh capabilities
/// off so the growth axiom can introduce them; unpaired summands of p are
/// absorbed into a sibling with the same action.
std::optional<Proof> prove_conf_precong(Term p, Term q, const Alphabet& alphabet);

/// Equational proof of p = q over the cc_equivalence system iff the
/// polarity-directed equivalence holds.  Throws std::invalid_argument when
/// the alphabet declares bivariant actions (the system does not cover that
/// case).  Summands are matched through the two simulation directions until
/// the partner chains close into cycles of equivalent subterms; cycle
/// members are rewritten by recursion and the remaining summands absorbed
/// via the derived equalities' primitive expansions.
std::optional<Proof> prove_cc_equiv(Term p, Term q, const Alphabet& alphabet);

/// Equational proof of p = q over the cs_equivalence system iff the
/// conformance equivalence holds.  Built from two absorption lemmas
/// p = p + q and q = q + p, each derived summand by summand.
std::optional<Proof> prove_conf_equiv(Term p, Term q, const Alphabet& alphabet);

// ── Derived equalities ──────────────────────────────────────────────────────

/// The statements of the two derived absorption equalities over the
/// cc_equivalence system ("DS1" and "DS2"):
///
///   DS1:  a.(x + pr) = a.(x + pr) + a.(x + pl)   [a covariant]
///   DS2:  a.(x + pl) = a.(x + pl) + a.(x + pr)   [a contravariant]
///
/// where pr sums covariant-prefixed summands and pl contravariant-prefixed
/// ones.  These are not members of any axiom set — they are provable from
/// the primitive axioms, and expand_derived_axiom builds that derivation.
/// Throws std::invalid_argument for any other name.
const AxiomSchema& derived_axiom_schema(std::string_view name);

/// A verified proof of the derived equality's closed instance under
/// `subst`, using only the primitive cc_equivalence axioms.  The
/// substitution must bind x, pr, pl and the action slot a, and satisfy the
/// schema's polarity constraints (slot polarity, pr covariant-prefixed,
/// pl contravariant-prefixed); otherwise std::invalid_argument is thrown.
Proof expand_derived_axiom(std::string_view name, const Substitution& subst,
                           const Alphabet& alphabet);

}  // namespace ccsim
