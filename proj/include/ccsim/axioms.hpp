#pragma once
// Axiom schemas over open terms: instantiation, admissibility, and matching
// modulo the sum laws.
//
// A schema relates two patterns, either as an equation (both rewrite
// directions preserve the axiomatized relation) or an inequation (only
// left-to-right does).  Patterns are formal sums of term metavariables and
// prefixed sub-patterns; prefix slots carry a polarity constraint, so one
// schema line like  "x <= x + a.y with a covariant"  stands for one axiom
// per admissible action.  Schemas may also carry side conditions on the
// instantiated terms (disjoint initials, contained initials, or initials
// drawn from one polarity class).
//
// Matching works modulo commutativity, associativity, idempotence, and unit
// of + (the canonical-form laws): prefixed items map onto summands of the
// matched term, variables map onto arbitrary sub-sums, several items may
// share a summand, and together they must cover the whole term.  This is
// deliberately a complete enumeration — callers get every substitution, in
// a deterministic order.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ccsim/action.hpp"
#include "ccsim/semantics.hpp"
#include "ccsim/term.hpp"

namespace ccsim {

enum class SchemaKind { equation, inequation };

// ── Patterns ────────────────────────────────────────────────────────────────

/// A prefix position in a pattern: a fixed action or a constrained
/// action metavariable.
struct ActionSlot {
  enum class Binding { concrete, meta };
  enum class Constraint { any, covariant, contravariant, bivariant };

  Binding binding = Binding::meta;
  ActionId action = 0;  // concrete
  std::string name;     // meta
  Constraint constraint = Constraint::any;

  static ActionSlot lit(ActionId a);
  static ActionSlot meta(std::string name, Constraint c = Constraint::any);
};

struct Pattern;
using PatternPtr = std::shared_ptr<const Pattern>;

struct PatternItem {
  enum class Kind { variable, prefixed };
  Kind kind;
  std::string var;    // variable items
  ActionSlot slot;    // prefixed items
  PatternPtr target;  // prefixed items
};

/// A formal sum; no items means the literal inert process.
struct Pattern {
  std::vector<PatternItem> items;

  static PatternPtr zero();
  static PatternPtr var(std::string name);
  static PatternPtr pre(ActionSlot slot, PatternPtr target);
  /// Flattening sum of the given patterns.
  static PatternPtr sum(std::initializer_list<PatternPtr> parts);
};

std::string to_text(const Pattern& p);

// ── Schemas and sets ────────────────────────────────────────────────────────

struct SideCondition {
  enum class Kind {
    disjoint_initials,  // I(var_a) and I(var_b) share no action
    initials_subset,    // I(var_a) is contained in I(var_b)
    initials_in_class,  // every initial of var_a has polarity cls
  };
  Kind kind;
  std::string var_a, var_b;
  Polarity cls = Polarity::covariant;
};

struct Substitution {
  std::map<std::string, Term> vars;
  std::map<std::string, ActionId> slots;

  friend bool operator==(const Substitution&, const Substitution&) = default;
};

struct AxiomSchema {
  std::string name;
  SchemaKind kind = SchemaKind::equation;
  PatternPtr lhs, rhs;
  std::vector<SideCondition> side;

  /// Metavariable names on either side, sorted, duplicate-free.
  std::vector<std::string> term_vars() const;
  std::vector<std::string> slot_names() const;
};

std::string to_text(const AxiomSchema& s);

struct AxiomSet {
  std::string name;
  RelationKind target = RelationKind::bisim;  // relation the set axiomatizes
  std::vector<AxiomSchema> schemas;

  const AxiomSchema* find(std::string_view schema_name) const;
};

/// The built-in systems: "cc_preorder" and "cc_equivalence" for the
/// polarity-directed preorder/equivalence, "cs_precongruence" and
/// "cs_equivalence" for the conformance ones.
std::shared_ptr<const AxiomSet> builtin_axiom_set(std::string_view name);
const std::vector<std::string>& builtin_axiom_set_names();

/// Parses the plain-text axiom set format:
///
///   set my_axioms for conf_precong
///   vars p q
///   actions a:any b:r c:l
///   axiom grow: a.p <= a.(p + q) if disjoint(p, q)
///   axiom drop: a.p + a.q <= a.p
///   axiom both: a.p = a.p + a.q if subset(q, p), initials(q) in r
///
/// Slot constraints are r / l / bi / any; '=' declares an equation, '<='
/// an inequation.  Patterns use explicit dots and parentheses.  `vars` and
/// `actions` lines may be re-issued between axioms; later declarations
/// override earlier ones.
std::shared_ptr<const AxiomSet> parse_axiom_set(std::string_view text);

/// Renders a set in the same plain-text format, so that
/// parse_axiom_set(to_text(set)) reproduces it.  Throws std::invalid_argument
/// when a schema uses one slot name under conflicting polarity constraints
/// (the format declares one constraint per name per axiom).
std::string to_text(const AxiomSet& set);

// ── Instantiation, matching, rewriting ──────────────────────────────────────

/// Closed instantiation (throws std::invalid_argument on unbound names).
/// The result is canonical.
Term instantiate(const Pattern& pattern, const Substitution& subst);

/// Checks the bound part of `subst` against the schema's slot constraints
/// and side conditions; names the substitution does not bind are not
/// checked.  A closed admissible substitution therefore satisfies the whole
/// schema.
bool substitution_admissible(const AxiomSchema& schema, const Substitution& subst,
                             const Alphabet& alphabet);

enum class RewriteDirection { forward, backward };

struct MatchOptions {
  std::size_t max_width = 6;  // widest sum the matcher will enumerate over
};

/// A path of summand indices from the root; [] is the whole term.
using Position = std::vector<std::size_t>;

/// All positions of `t`, in preorder; deterministic.
std::vector<Position> positions(Term t);

/// Throws std::out_of_range on a bad path.
Term subterm_at(Term t, const Position& pos);

/// Replaces the subterm at `pos` and re-canonicalizes along the path.
Term replace_at(Term t, const Position& pos, Term replacement);

/// Every substitution that matches the schema's source side (lhs when
/// forward, rhs when backward) against the subterm at `pos`, modulo the sum
/// laws.  Results bind all names of the matched side only, are admissible
/// (on their bound part), duplicate-free, and deterministically ordered.
/// Throws std::length_error when any sum inspected during matching is wider
/// than options.max_width.
std::vector<Substitution> match_at(const AxiomSchema& schema, Term t, const Position& pos,
                                   const Alphabet& alphabet,
                                   RewriteDirection direction = RewriteDirection::forward,
                                   const MatchOptions& options = {});

/// Rewrites at `pos` with a closed admissible substitution: the source-side
/// instance must equal the subterm there; the target-side instance replaces
/// it.  Throws std::invalid_argument when the substitution is open, not
/// admissible, or does not match.
Term apply_at(const AxiomSchema& schema, Term t, const Position& pos,
              const Substitution& subst, const Alphabet& alphabet,
              RewriteDirection direction = RewriteDirection::forward);

}  // namespace ccsim
