#pragma once
// Exhaustive desk-scale validation.  This module enumerates every term inside
// a depth/width bound, computes bulk relation matrices over such a universe,
// and runs the sweeps that cross-check the axiom systems against the
// behavioural relations: soundness (every rewrite instance is semantically
// valid), completeness (proof existence coincides with the semantic verdict),
// the coarsest-precongruence property of the conformance preorder, the
// readiness hierarchy, the single-polarity degenerations, and the bounded
// witness family behind the negative axiomatizability result.
//
// Everything here is deterministic: enumeration order is fixed by the
// alphabet's name order, sweeps walk the universe in enumeration order, and
// reports serialize to byte-identical JSON across runs.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ccsim/action.hpp"
#include "ccsim/axioms.hpp"
#include "ccsim/provers.hpp"
#include "ccsim/semantics.hpp"
#include "ccsim/term.hpp"

namespace ccsim {

// ── Bounded enumeration ─────────────────────────────────────────────────────

/// A finite slice of the term universe: every term whose action chains are at
/// most `max_depth` long and whose sums have at most `max_width` summands at
/// any one node, over the alphabet's non-fresh actions.
struct EnumerationBounds {
  int max_depth = 2;
  int max_width = 2;
  Alphabet alphabet;
};

/// Hard cap on how many terms one enumeration may produce, read from the
/// CCSIM_MAX_TERMS environment variable on every call (default 200000).
/// Throws std::invalid_argument when the variable is set but not a positive
/// integer.
std::size_t enumeration_cap();

/// All terms inside the bounds, duplicate-free, in a deterministic order
/// (layered by depth target, summand menus in action-name order).  The result
/// is closed under subterms: every summand target of an enumerated term is
/// itself in the list.  Throws std::invalid_argument on a negative depth or a
/// zero width, and std::length_error when the slice would exceed
/// enumeration_cap().
std::vector<Term> enumerate_terms(const EnumerationBounds& bounds);

/// An enumerated slice with index lookup, so matrices and sweeps can map
/// between terms and dense indices.
class Universe {
 public:
  explicit Universe(EnumerationBounds bounds);

  const EnumerationBounds& bounds() const { return bounds_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  /// Index of `t` in terms(), or nullopt when the slice does not contain it.
  std::optional<std::size_t> find(Term t) const;

  /// Like find, but throws std::out_of_range for absent terms.
  std::size_t index_of(Term t) const;

 private:
  EnumerationBounds bounds_;
  std::vector<Term> terms_;
  std::unordered_map<TermId, std::size_t> index_;
};

// ── Relation matrices ───────────────────────────────────────────────────────

/// A dense square bit matrix; row i column j answers "does the relation hold
/// from terms()[i] to terms()[j]?".
class BitMatrix {
 public:
  explicit BitMatrix(std::size_t size)
      : size_(size), bits_((size * size + 63) / 64, 0) {}

  std::size_t size() const { return size_; }
  bool get(std::size_t i, std::size_t j) const {
    const std::size_t bit = i * size_ + j;
    return (bits_[bit / 64] >> (bit % 64)) & 1u;
  }
  void set(std::size_t i, std::size_t j, bool value = true) {
    const std::size_t bit = i * size_ + j;
    const std::uint64_t mask = std::uint64_t{1} << (bit % 64);
    if (value)
      bits_[bit / 64] |= mask;
    else
      bits_[bit / 64] &= ~mask;
  }

 private:
  std::size_t size_;
  std::vector<std::uint64_t> bits_;
};

/// The relation decided on every ordered pair of the universe.  Runs one
/// checker over all pairs, so the memo tables amortize across the square.
/// Universes are subterm-closed, which keeps the recursion inside the slice.
/// Throws std::invalid_argument when the universe is too large for a dense
/// square (over 20000 terms).
BitMatrix relation_matrix(RelationKind kind, const Universe& universe);

// ── Sweep reports ───────────────────────────────────────────────────────────

/// One counterexample found by a sweep.  `lhs`/`rhs` are canonical term text,
/// `expected`/`got` summarize the disagreement, and `evidence` pins the
/// instance (schema and position, context, or error text).
struct SweepViolation {
  std::string lhs, rhs;
  std::string expected, got;
  std::string evidence;
};

/// Outcome of one exhaustive sweep.  `pairs_examined` counts the individual
/// instances checked (term pairs, rewrite instances, or context queries,
/// depending on the sweep).  An empty violation list means the property holds
/// everywhere inside the bounds.
struct SweepReport {
  std::string sweep;
  std::string alphabet;
  int max_depth = 0;
  int max_width = 0;
  std::size_t terms = 0;
  std::size_t pairs_examined = 0;
  std::vector<SweepViolation> violations;

  bool passed() const { return violations.empty(); }
};

/// Deterministic JSON rendering of a report (stable key order, no
/// timestamps), so repeated runs are byte-identical.
std::string report_to_json(const SweepReport& report);

// ── Sweeps ──────────────────────────────────────────────────────────────────

/// Checks every schema of the set against every term and position in the
/// bounds: each matching instance is completed (names the matched side leaves
/// free range over terms one depth smaller and over the declared actions),
/// rewritten, and the set's target relation is checked on the instance —
/// forward for inequations, both directions for equations.
SweepReport soundness_sweep(const AxiomSet& axioms,
                            const EnumerationBounds& bounds);

/// Checks that the factory produces a verified proof exactly for the
/// semantically related pairs of the universe.  Prover exceptions are
/// recorded as violations.  Throws std::invalid_argument when the factory's
/// alphabet differs from the bounds'.  The one factory serves the whole
/// square and so retains every derivation; for large universes prefer the
/// RelationKind overload, which bounds that retention.
SweepReport completeness_sweep(ProofFactory& factory,
                               const EnumerationBounds& bounds);

/// Overload that manages factories itself: it starts a fresh one per lhs
/// row, keeping memory bounded by a single row's derivations on large
/// universes.  Throws like the ProofFactory constructor for relations
/// without a bundled axiom system.
SweepReport completeness_sweep(RelationKind relation,
                               const EnumerationBounds& bounds);

/// Validates that the conformance precongruence is the coarsest precongruence
/// inside conformance similarity: (i) pairs in conf_precong stay related
/// under every one-action prefix context and every one-summand sum context
/// from the universe; (ii) pairs in conf_sim whose initials fail I(q) ⊆ I(p)
/// are distinguished by the sum context a.f.0 + [·], where a is the least
/// initial witnessing the failure and f is drawn from the alphabet's fresh
/// pool.  Throws std::invalid_argument when the fresh pool is empty.
SweepReport coarsest_precong_sweep(const EnumerationBounds& bounds);

/// Validates the readiness hierarchy on every ordered pair: ready_conf_sim
/// must be the converse of ready_sim, and ready_sim equivalence must imply
/// conf_sim equivalence.  On alphabets with at least three actions the sweep
/// also pins the strictness witnesses: widening a branch below a shared
/// prefix is conformance-neutral but refused by ready and plain simulation.
SweepReport hierarchy_sweep(const EnumerationBounds& bounds);

/// On a single-polarity alphabet, checks that cc_sim coincides pairwise with
/// its classical degeneration: plain_sim when everything is covariant,
/// inverse_sim when contravariant, bisim when bivariant.  Throws
/// std::invalid_argument on mixed (or empty) alphabets.
SweepReport degeneration_sweep(const EnumerationBounds& bounds);

// ── Witness family ──────────────────────────────────────────────────────────

/// One member of the duplication family that keeps equational completeness
/// out of reach of finite inequational systems over bivariant alphabets.
/// With a = the first covariant and b = the first bivariant action:
///
///   p_n = a.b^n.a.0        q_n = p_n + a.b^n.0
///
/// and the a-reduced pair p⁻_n = b^n.a.0, q⁻_n = p⁻_n + b^n.0.  The report
/// records that (i) p_n and q_n are cc-equivalent, (ii) the reduced pair is
/// not cc-similar (skipped at n = 0, where q⁻_0 collapses onto p⁻_0), and
/// (iii) depth-(n+2) pruning is the identity on the pair yet leaves them
/// bisimulation-distinct, so the equivalence is not a syntactic collapse.
struct WitnessReport {
  int n = 0;
  std::string alphabet;
  std::string p, q;
  std::string p_reduced, q_reduced;
  bool equivalence_holds = false;
  std::optional<bool> reduced_pair_fails;  // nullopt at n = 0
  bool pruning_separates = false;

  bool passed() const {
    return equivalence_holds && pruning_separates &&
           reduced_pair_fails.value_or(true);
  }
};

/// Builds and checks the n-th family member.  Throws std::invalid_argument
/// when n is negative or the alphabet lacks a covariant or a bivariant
/// action.
WitnessReport nonaxiomatizability_witness(int n, const Alphabet& alphabet);

/// Deterministic JSON rendering of a witness report.
std::string report_to_json(const WitnessReport& report);

}  // namespace ccsim
