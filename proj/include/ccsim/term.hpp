#pragma once
// Canonical BCCSP terms.
//
// A term is a finite sum of action-prefixed subterms; the empty sum is the
// inert process 0.  Terms are kept in normal form with respect to the usual
// sum laws (commutativity, associativity, idempotence, unit): the summand
// list is sorted, duplicate-free, and never contains explicit 0 entries.
// Normal forms are interned in a process-global table, so Term is a cheap
// value handle and equality is id equality — which on these normal forms
// coincides with bisimilarity of finite trees.
//
// Summand order: by action name first, then by recursive term order.  This
// is the one total order used everywhere (printing, enumeration, choice
// tie-breaking), so every artifact the library produces is deterministic.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ccsim/action.hpp"

namespace ccsim {

using TermId = std::uint32_t;

struct Summand;

/// Value handle for an interned canonical term.
class Term {
 public:
  Term();  // the inert process 0
  static Term nil() { return Term(); }
  explicit Term(TermId id) : id_(id) {}

  TermId id() const { return id_; }
  bool is_nil() const;

  /// The canonical summand list; also the outgoing transitions (each summand
  /// (a, t) is exactly the step  this -a-> t).
  const std::vector<Summand>& summands() const;

  /// Longest transition sequence length; 0 for the inert process.
  int depth() const;

  friend bool operator==(Term a, Term b) { return a.id_ == b.id_; }
  friend bool operator!=(Term a, Term b) { return a.id_ != b.id_; }

 private:
  TermId id_;
};

struct Summand {
  ActionId action;
  Term target;

  friend bool operator==(const Summand& a, const Summand& b) {
    return a.action == b.action && a.target == b.target;
  }
};

// ── Construction ────────────────────────────────────────────────────────────

/// Canonicalizing constructor: sorts, deduplicates, interns.
Term make_term(std::vector<Summand> summands);

/// The prefixed term a.t .
Term prefix(ActionId a, Term t);

/// Canonical sum of two terms (their summand multiset union, normalized).
Term add(Term p, Term q);

/// a.a. ... .a.t with n prefixes.
Term iterated_prefix(ActionId a, int n, Term t);

// ── Observations ────────────────────────────────────────────────────────────

/// Actions the term can perform right now, sorted by name, duplicate-free.
std::vector<ActionId> initials(Term t);

/// I(p) ⊆ I(q).
bool initials_subset(Term p, Term q);

/// I(p) ∩ I(q) = ∅.
bool initials_disjoint(Term p, Term q);

/// Cuts every behaviour below `depth` transitions: prune(t, 0) = 0,
/// prune(t, d) keeps each summand with its target pruned to d-1.
/// prune(t, d) == t whenever depth(t) <= d.
Term prune(Term t, int depth);

/// Total deterministic order (see header comment); returns <0, 0, >0.
int compare(Term a, Term b);
inline bool term_less(Term a, Term b) { return compare(a, b) < 0; }

/// Canonical text form, e.g. "a.b.0 + c.(a.0 + b.0)".  Parses back to the
/// same term (round-trip stable).
std::string to_text(Term t);

// ── Raw syntax trees ────────────────────────────────────────────────────────

/// Un-normalized term tree, as written in source text or built by hand; the
/// shape (association, order, duplicates, explicit 0 summands) is preserved
/// until canonicalize() is called.
class RawTerm {
 public:
  enum class Kind { nil, prefix, sum };

  static RawTerm nil();
  static RawTerm prefix(ActionId a, RawTerm target);
  static RawTerm sum(RawTerm left, RawTerm right);

  Kind kind() const { return node_->kind; }
  ActionId action() const;  // prefix nodes
  RawTerm target() const;   // prefix nodes
  RawTerm left() const;     // sum nodes
  RawTerm right() const;    // sum nodes

 private:
  struct Node {
    Kind kind;
    ActionId action = 0;
    std::shared_ptr<const Node> a, b;  // prefix: target in a; sum: both
  };
  explicit RawTerm(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
  friend Term canonicalize(const RawTerm&);
  friend Term canonicalize_node(const RawTerm::Node*);
};

/// Normal form of a raw tree.  Idempotent; the result is bisimilar to the
/// input read as a transition system.
Term canonicalize(const RawTerm& raw);

}  // namespace ccsim
