// Proof construction for the axiomatized relations.  The provers here never
// search: each one walks the structure that made the semantic check succeed
// and emits the corresponding absorption chain, so construction is linear in
// the amount of matching the checker did.  All intermediate steps are plain
// (statement, node) pairs; ChainBuilder glues them together and silently
// drops steps whose two sides coincide, which is exactly what happens when
// canonicalization already performed the rewrite an axiom would make.

#include "ccsim/provers.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace ccsim {
namespace {

// ── Step algebra ────────────────────────────────────────────────────────────

/// One proved statement plus the node deriving it.
struct Step {
  ProofNodePtr node;
  Term lhs = Term::nil();
  Term rhs = Term::nil();
  SchemaKind kind = SchemaKind::equation;
};

Step refl_step(Term t) { return {ProofNode::refl(t), t, t, SchemaKind::equation}; }

Step sym_step(const Step& s) {
  if (s.kind != SchemaKind::equation)
    throw std::logic_error("cannot mirror an inequational step");
  if (s.lhs == s.rhs) return s;
  return {ProofNode::sym(s.node), s.rhs, s.lhs, SchemaKind::equation};
}

Step prefix_step(ActionId a, const Step& s) {
  if (s.lhs == s.rhs) return refl_step(prefix(a, s.lhs));
  return {ProofNode::cong_prefix(a, s.node), prefix(a, s.lhs), prefix(a, s.rhs), s.kind};
}

/// The step in a `remainder` sum context.  Remainders may overlap the child
/// statement's own summands: duplicated summands fold away canonically, which
/// is how a chain copies a summand (overlapping remainder) or consumes one
/// (remainder missing it).
Step sum_step(Term remainder, const Step& s) {
  if (remainder.is_nil()) return s;
  if (s.lhs == s.rhs) return refl_step(add(s.lhs, remainder));
  return {ProofNode::cong_sum(remainder, s.node), add(s.lhs, remainder), add(s.rhs, remainder),
          s.kind};
}

/// Left-to-right transitivity chain.  Appending checks connectivity and
/// skips steps that do not change the current term.
class ChainBuilder {
 public:
  explicit ChainBuilder(Term start) : start_(start), cur_(start) {}

  Term current() const { return cur_; }

  void append(const Step& s) {
    if (s.lhs != cur_) throw std::logic_error("proof chain does not connect");
    if (s.lhs == s.rhs) return;
    if (s.kind == SchemaKind::inequation) kind_ = SchemaKind::inequation;
    steps_.push_back(s);
    cur_ = s.rhs;
  }

  Step finish() {
    if (steps_.empty()) return refl_step(start_);
    if (steps_.size() == 1) return steps_.front();
    std::vector<ProofNodePtr> nodes;
    nodes.reserve(steps_.size());
    for (const Step& s : steps_) nodes.push_back(s.node);
    return {ProofNode::trans(std::move(nodes)), start_, cur_, kind_};
  }

 private:
  Term start_, cur_;
  SchemaKind kind_ = SchemaKind::equation;
  std::vector<Step> steps_;
};

// ── Term utilities ──────────────────────────────────────────────────────────

Substitution sub(std::initializer_list<std::pair<const char*, Term>> vars,
                 std::initializer_list<std::pair<const char*, ActionId>> slots) {
  Substitution s;
  for (const auto& [name, term] : vars) s.vars.emplace(name, term);
  for (const auto& [name, action] : slots) s.slots.emplace(name, action);
  return s;
}

bool has_summand(Term t, const Summand& s) {
  const auto& ss = t.summands();
  return std::find(ss.begin(), ss.end(), s) != ss.end();
}

Term remove_summand(Term t, const Summand& drop) {
  std::vector<Summand> kept;
  for (const Summand& s : t.summands())
    if (!(s == drop)) kept.push_back(s);
  return make_term(std::move(kept));
}

/// Targets of t's `action` summands, in canonical (ascending) order.
std::vector<Term> targets(Term t, ActionId action) {
  std::vector<Term> out;
  for (const Summand& s : t.summands())
    if (s.action == action) out.push_back(s.target);
  return out;
}

/// First (least) `action` target of `side` passing the predicate.
template <typename Pred>
std::optional<Term> first_target(Term side, ActionId action, Pred&& pred) {
  for (const Summand& s : side.summands())
    if (s.action == action && pred(s.target)) return s.target;
  return std::nullopt;
}

void validate_actions(Term t, const Alphabet& alphabet, std::set<TermId>& seen) {
  if (!seen.insert(t.id()).second) return;
  for (const Summand& s : t.summands()) {
    if (!alphabet.contains(s.action))
      throw std::invalid_argument("term mentions an action the alphabet does not declare: " +
                                  ActionRegistry::instance().name(s.action));
    validate_actions(s.target, alphabet, seen);
  }
}

// ── Prover scaffolding ──────────────────────────────────────────────────────

/// Shared state of one prover: its axiom system, alphabet, and a warmed-up
/// relation checker for the semantic queries the construction follows.
struct Ctx {
  std::shared_ptr<const AxiomSet> axioms;
  Alphabet alphabet;
  RelationChecker checker;

  Ctx(std::string_view set_name, const Alphabet& alph)
      : axioms(builtin_axiom_set(set_name)), alphabet(alph), checker(alph) {}

  bool holds(RelationKind kind, Term lhs, Term rhs) { return checker.holds(kind, lhs, rhs); }

  /// Forward instance of a schema from this prover's system.
  Step axiom(std::string_view schema_name, Substitution subst) const {
    const AxiomSchema* schema = axioms->find(schema_name);
    if (schema == nullptr) throw std::logic_error("prover referenced a schema outside its system");
    Term lhs = instantiate(*schema->lhs, subst);
    Term rhs = instantiate(*schema->rhs, subst);
    return {ProofNode::axiom(std::string(schema_name), std::move(subst)), lhs, rhs, schema->kind};
  }
};

struct ProverBase {
  Ctx cx;

  ProverBase(std::string_view set_name, const Alphabet& alphabet) : cx(set_name, alphabet) {}
  virtual ~ProverBase() = default;

  /// Derivation of lhs R rhs; the caller has already established that the
  /// relation holds semantically.
  virtual Step entry(Term lhs, Term rhs) = 0;
};

// ── Polarity-directed preorder ──────────────────────────────────────────────

class CCPreorderProver final : public ProverBase {
 public:
  explicit CCPreorderProver(const Alphabet& alphabet) : ProverBase("cc_preorder", alphabet) {}

  Step entry(Term p, Term q) override { return derive(p, q); }

 private:
  Step derive(Term p, Term q) {
    auto key = std::pair(p.id(), q.id());
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    Step out = build(p, q);
    memo_.emplace(key, out);
    return out;
  }

  Step build(Term p, Term q) {
    if (p == q) return refl_step(p);
    ChainBuilder chain(p);
    // Growth: introduce every summand of q that p lacks.
    for (const Summand& sq : q.summands()) {
      if (has_summand(p, sq)) continue;
      if (*cx.alphabet.polarity(sq.action) == Polarity::covariant) {
        grow_covariant(chain, sq);
      } else {
        // Contravariant and bivariant capabilities cannot be claimed from
        // nothing; copy the summand of p whose move matches this one and
        // rewrite the copy underneath the prefix.
        Term partner = backward_partner(p, sq);
        chain.append(
            sum_step(chain.current(), prefix_step(sq.action, derive(partner, sq.target))));
      }
    }
    // Shrinkage: remove every summand of p with no counterpart in q.
    for (const Summand& sp : p.summands()) {
      if (has_summand(q, sp)) continue;
      Term rest = remove_summand(chain.current(), sp);
      if (*cx.alphabet.polarity(sp.action) == Polarity::contravariant) {
        chain.append(cx.axiom("Sl_p", sub({{"x", rest}, {"y", sp.target}}, {{"a", sp.action}})));
      } else {
        // Fold the summand onto the q-summand its move maps to — already in
        // `rest`, so rewriting underneath the prefix merges the two.
        Term partner = forward_partner(q, sp);
        chain.append(sum_step(rest, prefix_step(sp.action, derive(sp.target, partner))));
      }
    }
    if (chain.current() != q) throw std::logic_error("preorder chain missed its target");
    return chain.finish();
  }

  void grow_covariant(ChainBuilder& chain, const Summand& sq) {
    if (cx.holds(RelationKind::cc_sim, Term::nil(), sq.target)) {
      // The subterm is reachable from the inert process, so the proof can
      // stay structural: raise a 0 stub and grow it below the prefix.
      Term before = chain.current();
      bool stub_added = !has_summand(before, Summand{sq.action, Term::nil()});
      if (stub_added)
        chain.append(
            cx.axiom("Sr_p", sub({{"x", before}, {"y", Term::nil()}}, {{"a", sq.action}})));
      if (!sq.target.is_nil()) {
        // Dropping back to `before` consumes the stub; when the stub was
        // already a genuine summand it must survive, so keep the full term.
        Term rem = stub_added ? before : chain.current();
        chain.append(sum_step(rem, prefix_step(sq.action, derive(Term::nil(), sq.target))));
      }
    } else {
      chain.append(
          cx.axiom("Sr_p", sub({{"x", chain.current()}, {"y", sq.target}}, {{"a", sq.action}})));
    }
  }

  Term backward_partner(Term p, const Summand& sq) {
    auto partner = first_target(
        p, sq.action, [&](Term t) { return cx.holds(RelationKind::cc_sim, t, sq.target); });
    if (!partner) throw std::logic_error("simulation lost a backward match");
    return *partner;
  }

  Term forward_partner(Term q, const Summand& sp) {
    auto partner = first_target(
        q, sp.action, [&](Term t) { return cx.holds(RelationKind::cc_sim, sp.target, t); });
    if (!partner) throw std::logic_error("simulation lost a forward match");
    return *partner;
  }

  std::map<std::pair<TermId, TermId>, Step> memo_;
};

// ── Conformance precongruence ───────────────────────────────────────────────

class ConfPrecongProver final : public ProverBase {
 public:
  explicit ConfPrecongProver(const Alphabet& alphabet) : ProverBase("cs_precongruence", alphabet) {}

  Step entry(Term p, Term q) override { return derive_sum(p, q); }

 private:
  // p <= q for conformance-related terms with equal initial sets.
  Step derive_sum(Term p, Term q) {
    auto key = std::pair(p.id(), q.id());
    if (auto it = sum_memo_.find(key); it != sum_memo_.end()) return it->second;
    Step out = build_sum(p, q);
    sum_memo_.emplace(key, out);
    return out;
  }

  Step build_sum(Term p, Term q) {
    if (p == q) return refl_step(p);
    // Group the summands q adds under the summand of p that simulates them.
    // Each group's anchor is rewritten into every member; an anchor that q
    // does not keep is consumed by its last rewrite, and anchors with no
    // group and no counterpart are absorbed into a sibling at the end.
    struct Group {
      Summand anchor;
      bool kept = false;
      std::vector<Summand> grown;
    };
    std::vector<Group> groups;
    std::map<std::pair<ActionId, TermId>, std::size_t> slot_of;
    for (const Summand& sp : p.summands()) {
      slot_of.emplace(std::pair(sp.action, sp.target.id()), groups.size());
      groups.push_back({sp, has_summand(q, sp), {}});
    }
    for (const Summand& sq : q.summands()) {
      if (has_summand(p, sq)) continue;
      auto anchor = first_target(
          p, sq.action, [&](Term t) { return cx.holds(RelationKind::conf_sim, t, sq.target); });
      if (!anchor) throw std::logic_error("conformance lost a simulating summand");
      groups[slot_of.at(std::pair(sq.action, anchor->id()))].grown.push_back(sq);
    }
    ChainBuilder chain(p);
    for (const Group& g : groups) {
      for (std::size_t k = 0; k < g.grown.size(); ++k) {
        bool last_use = !g.kept && k + 1 == g.grown.size();
        Term rem = last_use ? remove_summand(chain.current(), g.anchor) : chain.current();
        chain.append(
            sum_step(rem, derive_prefix(g.anchor.action, g.anchor.target, g.grown[k].target)));
      }
    }
    for (const Group& g : groups) {
      if (g.kept || !g.grown.empty()) continue;
      auto partner = first_target(q, g.anchor.action, [](Term) { return true; });
      if (!partner) throw std::logic_error("equal initial sets lost an action");
      Term rem = remove_summand(remove_summand(chain.current(), g.anchor),
                                Summand{g.anchor.action, *partner});
      chain.append(sum_step(rem, cx.axiom("SCSinv_p", sub({{"p", *partner}, {"q", g.anchor.target}},
                                                          {{"a", g.anchor.action}}))));
    }
    if (chain.current() != q) throw std::logic_error("conformance chain missed its target");
    return chain.finish();
  }

  // a.p1 <= a.q1 for conformance-simulated subterms (initials may grow).
  Step derive_prefix(ActionId a, Term p1, Term q1) {
    auto key = std::tuple(a, p1.id(), q1.id());
    if (auto it = prefix_memo_.find(key); it != prefix_memo_.end()) return it->second;
    // Split q1 into the part over p1's own initials — reachable by the sum
    // derivation — and the genuinely new capabilities, which only the growth
    // axiom can introduce.
    std::set<ActionId> known;
    for (ActionId act : initials(p1)) known.insert(act);
    std::vector<Summand> shared, fresh;
    for (const Summand& s : q1.summands()) (known.count(s.action) ? shared : fresh).push_back(s);
    Term core = make_term(std::move(shared));
    Term rest = make_term(std::move(fresh));
    ChainBuilder chain(prefix(a, p1));
    chain.append(prefix_step(a, derive_sum(p1, core)));
    if (!rest.is_nil()) chain.append(cx.axiom("SCS_g", sub({{"p", core}, {"q", rest}}, {{"a", a}})));
    Step out = chain.finish();
    prefix_memo_.emplace(key, out);
    return out;
  }

  std::map<std::pair<TermId, TermId>, Step> sum_memo_;
  std::map<std::tuple<ActionId, TermId, TermId>, Step> prefix_memo_;
};

// ── Conformance equivalence ─────────────────────────────────────────────────

class ConfEquivProver final : public ProverBase {
 public:
  explicit ConfEquivProver(const Alphabet& alphabet) : ProverBase("cs_equivalence", alphabet) {}

  Step entry(Term p, Term q) override {
    if (p == q) return refl_step(p);
    Step forward = absorb(p, q);   // p = p + q
    Step backward = absorb(q, p);  // q = q + p
    ChainBuilder chain(p);
    chain.append(forward);
    chain.append(sym_step(backward));  // p + q and q + p are the same term
    return chain.finish();
  }

 private:
  // p = p + q whenever the conformance precongruence p <= q holds.
  Step absorb(Term p, Term q) {
    auto key = std::pair(p.id(), q.id());
    if (auto it = absorb_memo_.find(key); it != absorb_memo_.end()) return it->second;
    Step out = build_absorb(p, q);
    absorb_memo_.emplace(key, out);
    return out;
  }

  Step build_absorb(Term p, Term q) {
    Term target = add(p, q);
    if (target == p) return refl_step(p);
    ChainBuilder chain(p);
    for (const Summand& sq : q.summands()) {
      if (has_summand(p, sq)) continue;
      auto partner = first_target(
          p, sq.action, [&](Term t) { return cx.holds(RelationKind::conf_sim, t, sq.target); });
      if (!partner) throw std::logic_error("conformance lost a simulating summand");
      chain.append(sum_step(chain.current(), absorb_prefix(sq.action, *partner, sq.target)));
    }
    if (chain.current() != target) throw std::logic_error("absorption chain missed its target");
    return chain.finish();
  }

  // a.p1 = a.p1 + a.q1 whenever conf_sim(p1, q1).
  Step absorb_prefix(ActionId a, Term p1, Term q1) {
    auto key = std::tuple(a, p1.id(), q1.id());
    if (auto it = prefix_memo_.find(key); it != prefix_memo_.end()) return it->second;
    std::set<ActionId> known;
    for (ActionId act : initials(p1)) known.insert(act);
    std::vector<Summand> shared, fresh;
    for (const Summand& s : q1.summands()) (known.count(s.action) ? shared : fresh).push_back(s);
    Term core = make_term(std::move(shared));
    Term rest = make_term(std::move(fresh));
    // First a.p1 = a.p1 + a.core: rewrite the copy into a.(p1 + core), split
    // off a.core, and rewrite back.
    Step ih = absorb(p1, core);  // p1 = p1 + core
    ChainBuilder head(prefix(a, p1));
    head.append(prefix_step(a, ih));
    head.append(cx.axiom("SCSinv_eq", sub({{"p", core}, {"q", p1}}, {{"a", a}})));
    head.append(sum_step(prefix(a, core), prefix_step(a, sym_step(ih))));
    Step grown = head.finish();  // a.p1 = a.p1 + a.core
    if (rest.is_nil()) {
      prefix_memo_.emplace(key, grown);
      return grown;
    }
    // Then grow the fresh capabilities onto the copy and drop the stepping
    // stone again.
    ChainBuilder chain(prefix(a, p1));
    chain.append(grown);
    chain.append(
        sum_step(prefix(a, p1), cx.axiom("SCS_eq", sub({{"p", core}, {"q", rest}}, {{"a", a}}))));
    chain.append(sum_step(prefix(a, q1), sym_step(grown)));
    Step out = chain.finish();
    prefix_memo_.emplace(key, out);
    return out;
  }

  std::map<std::pair<TermId, TermId>, Step> absorb_memo_;
  std::map<std::tuple<ActionId, TermId, TermId>, Step> prefix_memo_;
};

// ── Polarity-directed equivalence ───────────────────────────────────────────

class CCEquivProver final : public ProverBase {
 public:
  explicit CCEquivProver(const Alphabet& alphabet) : ProverBase("cc_equivalence", alphabet) {}

  Step entry(Term p, Term q) override { return derive_eq(p, q); }

  /// Expansion of a derived equality instance into primitive steps; also the
  /// engine behind expand_derived_axiom.
  Step expand(bool first_form, Term x, Term pr, Term pl, ActionId a) {
    return ds(first_form, x, pr, pl, a);
  }

 private:
  bool covariant(ActionId a) const { return *cx.alphabet.polarity(a) == Polarity::covariant; }

  // p = q for equivalent terms over an alphabet without bivariant actions.
  Step derive_eq(Term p, Term q) {
    if (p == q) return refl_step(p);
    auto key = std::pair(p.id(), q.id());
    if (auto it = eq_memo_.find(key); it != eq_memo_.end()) return it->second;
    Step out = build_eq(p, q);
    eq_memo_.emplace(key, out);
    return out;
  }

  Step build_eq(Term p, Term q) {
    // Chase each summand back and forth through the two simulation
    // directions (upward for covariant actions, downward for contravariant
    // ones).  Summands on a round-trip loop are pairwise equivalent with
    // their counterparts and get rewritten in place; everything else is
    // absorbed into — or grown out of — a loop member.
    struct Rewrite {
      ActionId action;
      Term from, to;
    };
    struct Absorption {
      ActionId action;
      Term extra, keeper;
    };
    std::vector<Rewrite> rewrites;
    std::vector<Absorption> drops, raises;
    std::vector<ActionId> acts = initials(p);
    if (acts != initials(q)) throw std::logic_error("equivalent terms disagree on initials");
    for (ActionId act : acts) {
      std::vector<Term> ps = targets(p, act), qs = targets(q, act);
      bool cov = covariant(act);
      auto matches = [&](Term t, Term candidate) {
        return cov ? cx.holds(RelationKind::cc_sim, t, candidate)
                   : cx.holds(RelationKind::cc_sim, candidate, t);
      };
      auto pick = [&](const std::vector<Term>& pool, Term t) {
        for (std::size_t i = 0; i < pool.size(); ++i)
          if (matches(t, pool[i])) return i;
        throw std::logic_error("equivalence lost a matching move");
      };
      std::vector<std::size_t> to_q(ps.size()), to_p(qs.size());
      for (std::size_t i = 0; i < ps.size(); ++i) to_q[i] = pick(qs, ps[i]);
      for (std::size_t j = 0; j < qs.size(); ++j) to_p[j] = pick(ps, qs[j]);
      std::vector<bool> on_loop(ps.size(), false), q_core(qs.size(), false);
      for (std::size_t i = 0; i < ps.size(); ++i) {
        std::size_t j = i;
        for (std::size_t step = 0; step < ps.size(); ++step) {
          j = to_p[to_q[j]];
          if (j == i) {
            on_loop[i] = true;
            break;
          }
        }
      }
      for (std::size_t i = 0; i < ps.size(); ++i)
        if (on_loop[i]) q_core[to_q[i]] = true;
      auto keeper_in = [&](const std::vector<Term>& pool, const std::vector<bool>& core, Term t) {
        for (std::size_t i = 0; i < pool.size(); ++i)
          if (core[i] && matches(t, pool[i])) return pool[i];
        throw std::logic_error("equivalence lost an absorbing loop member");
      };
      for (std::size_t i = 0; i < ps.size(); ++i) {
        if (on_loop[i])
          rewrites.push_back({act, ps[i], qs[to_q[i]]});
        else
          drops.push_back({act, ps[i], keeper_in(ps, on_loop, ps[i])});
      }
      for (std::size_t j = 0; j < qs.size(); ++j)
        if (!q_core[j]) raises.push_back({act, qs[j], keeper_in(qs, q_core, qs[j])});
    }
    // keeper = keeper + extra, from the derived-equality expansions.
    auto absorption = [&](const Absorption& ab) {
      return covariant(ab.action) ? absorb_r(ab.extra, ab.keeper, Term::nil(), ab.action)
                                  : absorb_l(ab.keeper, ab.extra, Term::nil(), ab.action);
    };
    ChainBuilder chain(p);
    for (const Absorption& ab : drops) {
      Term rem = remove_summand(remove_summand(chain.current(), Summand{ab.action, ab.extra}),
                                Summand{ab.action, ab.keeper});
      chain.append(sum_step(rem, sym_step(absorption(ab))));
    }
    for (const Rewrite& rw : rewrites) {
      if (rw.from == rw.to) continue;
      chain.append(sum_step(remove_summand(chain.current(), Summand{rw.action, rw.from}),
                            prefix_step(rw.action, derive_eq(rw.from, rw.to))));
    }
    for (const Absorption& ab : raises) {
      Term rem = remove_summand(chain.current(), Summand{ab.action, ab.keeper});
      chain.append(sum_step(rem, absorption(ab)));
    }
    if (chain.current() != q) throw std::logic_error("equivalence chain missed its target");
    return chain.finish();
  }

  // a.(q + r) = a.(q + r) + a.(p + r) for covariant a, whenever every move of
  // p is simulation-below a move of q (classwise) — in particular whenever
  // p <= q in the polarity-directed preorder.
  Step absorb_r(Term p, Term q, Term r, ActionId a) {
    Term head = prefix(a, add(q, r));
    Term tail = prefix(a, add(p, r));
    if (add(head, tail) == head) return refl_step(head);
    auto key = std::tuple(p.id(), q.id(), r.id(), a);
    if (auto it = absr_memo_.find(key); it != absr_memo_.end()) return it->second;
    PolaritySplit psplit = split_by_polarity(p, cx.alphabet);
    PolaritySplit qsplit = split_by_polarity(q, cx.alphabet);
    Term p_cov = make_term(std::move(psplit.covariant));
    Term p_con = make_term(std::move(psplit.contravariant));
    Term q_cov = make_term(std::move(qsplit.covariant));
    Term q_con = make_term(std::move(qsplit.contravariant));
    Step out;
    if (p_con.is_nil() && q_con.is_nil()) {
      Step gather = gather_cov(p, q);       // q = q + p
      Step widened = sum_step(r, gather);   // q + r = q + p + r
      ChainBuilder chain(head);
      chain.append(prefix_step(a, widened));
      chain.append(ds(true, add(p, r), q, Term::nil(), a));  // split a.(p + r) off
      chain.append(sum_step(tail, prefix_step(a, sym_step(widened))));
      out = chain.finish();
    } else if (p_cov.is_nil() && q_cov.is_nil()) {
      Step gather = gather_con(p, q);      // p = p + q
      Step widened = sum_step(r, gather);  // p + r = p + q + r
      ChainBuilder chain(head);
      chain.append(ds(true, add(q, r), Term::nil(), p, a));  // grow a.(q + p + r)
      chain.append(sum_step(head, prefix_step(a, sym_step(widened))));
      out = chain.finish();
    } else {
      // Mixed: absorb the covariant halves with the contravariant part of q
      // riding along in the context, then the contravariant halves with the
      // covariant part of p riding along.
      Step first = absorb_r(p_cov, q_cov, add(q_con, r), a);
      Step second = absorb_r(p_con, q_con, add(p_cov, r), a);
      ChainBuilder chain(head);
      chain.append(first);
      chain.append(sum_step(head, second));
      chain.append(sum_step(tail, sym_step(first)));
      out = chain.finish();
    }
    absr_memo_.emplace(key, out);
    return out;
  }

  // a.(p + r) = a.(p + r) + a.(q + r) for contravariant a, under the same
  // classwise matching premises as absorb_r.
  Step absorb_l(Term p, Term q, Term r, ActionId a) {
    Term head = prefix(a, add(p, r));
    Term tail = prefix(a, add(q, r));
    if (add(head, tail) == head) return refl_step(head);
    auto key = std::tuple(p.id(), q.id(), r.id(), a);
    if (auto it = absl_memo_.find(key); it != absl_memo_.end()) return it->second;
    PolaritySplit psplit = split_by_polarity(p, cx.alphabet);
    PolaritySplit qsplit = split_by_polarity(q, cx.alphabet);
    Term p_cov = make_term(std::move(psplit.covariant));
    Term p_con = make_term(std::move(psplit.contravariant));
    Term q_cov = make_term(std::move(qsplit.covariant));
    Term q_con = make_term(std::move(qsplit.contravariant));
    Step out;
    if (p_con.is_nil() && q_con.is_nil()) {
      Step gather = gather_cov(p, q);      // q = q + p
      Step widened = sum_step(r, gather);  // q + r = q + p + r
      ChainBuilder chain(head);
      chain.append(ds(false, add(p, r), q, Term::nil(), a));  // grow a.(p + q + r)
      chain.append(sum_step(head, prefix_step(a, sym_step(widened))));
      out = chain.finish();
    } else if (p_cov.is_nil() && q_cov.is_nil()) {
      Step gather = gather_con(p, q);      // p = p + q
      Step widened = sum_step(r, gather);  // p + r = p + q + r
      ChainBuilder chain(head);
      chain.append(prefix_step(a, widened));
      chain.append(ds(false, add(q, r), Term::nil(), p, a));  // split a.(q + r) off
      chain.append(sum_step(tail, prefix_step(a, sym_step(widened))));
      out = chain.finish();
    } else {
      Step first = absorb_l(p_con, q_con, add(p_cov, r), a);
      Step second = absorb_l(p_cov, q_cov, add(q_con, r), a);
      ChainBuilder chain(head);
      chain.append(first);
      chain.append(sum_step(head, second));
      chain.append(sum_step(tail, sym_step(first)));
      out = chain.finish();
    }
    absl_memo_.emplace(key, out);
    return out;
  }

  // q = q + p for purely covariant p and q where every summand of p is
  // simulation-below a summand of q with the same action.
  Step gather_cov(Term p, Term q) {
    Term target = add(q, p);
    if (target == q) return refl_step(q);
    auto key = std::pair(p.id(), q.id());
    if (auto it = gcov_memo_.find(key); it != gcov_memo_.end()) return it->second;
    std::vector<Summand> support;
    std::vector<std::pair<Summand, Term>> jobs;
    for (const Summand& sp : p.summands()) {
      auto partner = first_target(
          q, sp.action, [&](Term t) { return cx.holds(RelationKind::cc_sim, sp.target, t); });
      if (!partner) throw std::logic_error("equivalence lost a covariant match");
      support.push_back({sp.action, *partner});
      jobs.emplace_back(sp, *partner);
    }
    Term base = make_term(std::move(support));
    ChainBuilder chain(base);
    for (const auto& [sp, partner] : jobs)
      chain.append(sum_step(chain.current(), absorb_r(sp.target, partner, Term::nil(), sp.action)));
    if (chain.current() != add(base, p)) throw std::logic_error("gathered chain missed its target");
    Step out = sum_step(q, chain.finish());  // the support summands live in q
    gcov_memo_.emplace(key, out);
    return out;
  }

  // p = p + q for purely contravariant p and q where every summand of q is
  // simulation-above a summand of p with the same action.
  Step gather_con(Term p, Term q) {
    Term target = add(p, q);
    if (target == p) return refl_step(p);
    auto key = std::pair(p.id(), q.id());
    if (auto it = gcon_memo_.find(key); it != gcon_memo_.end()) return it->second;
    std::vector<Summand> support;
    std::vector<std::pair<Summand, Term>> jobs;
    for (const Summand& sq : q.summands()) {
      auto partner = first_target(
          p, sq.action, [&](Term t) { return cx.holds(RelationKind::cc_sim, t, sq.target); });
      if (!partner) throw std::logic_error("equivalence lost a contravariant match");
      support.push_back({sq.action, *partner});
      jobs.emplace_back(sq, *partner);
    }
    Term base = make_term(std::move(support));
    ChainBuilder chain(base);
    for (const auto& [sq, partner] : jobs)
      chain.append(sum_step(chain.current(), absorb_l(partner, sq.target, Term::nil(), sq.action)));
    if (chain.current() != add(base, q)) throw std::logic_error("gathered chain missed its target");
    Step out = sum_step(p, chain.finish());  // the support summands live in p
    gcon_memo_.emplace(key, out);
    return out;
  }

  // The derived equalities:  a.(x + pr) = a.(x + pr) + a.(x + pl)  for
  // covariant a (first form), and the same statement with pr and pl swapping
  // roles for contravariant a (second form).  pr sums covariant-prefixed
  // summands, pl contravariant-prefixed ones.
  Step ds(bool first_form, Term x, Term pr, Term pl, ActionId a) {
    Term lead = first_form ? pr : pl;
    Term tail_part = first_form ? pl : pr;
    Term a_lead = prefix(a, add(x, lead));
    Term a_x = prefix(a, x);
    Term a_tail = prefix(a, add(x, tail_part));
    if (add(a_lead, a_tail) == a_lead) return refl_step(a_lead);
    auto key = std::tuple(first_form, x.id(), pr.id(), pl.id(), a);
    if (auto it = ds_memo_.find(key); it != ds_memo_.end()) return it->second;
    // First strip the lead part down to a.x, then widen a.x by the tail
    // part; both are inductions over one summand at a time.
    Step part1 = grow_chain(first_form ? "S1" : "S4", a, x, lead);  // a_lead = a_lead + a_x
    Step out;
    if (a_x == a_tail) {
      out = part1;
    } else {
      Step part2 = add_chain(first_form ? "S2" : "S3", a, x, tail_part);  // a_x = a_x + a_tail
      ChainBuilder chain(a_lead);
      chain.append(part1);
      chain.append(sum_step(a_lead, part2));
      chain.append(sum_step(a_tail, sym_step(part1)));
      out = chain.finish();
    }
    ds_memo_.emplace(key, out);
    return out;
  }

  // a.(x + parts) = a.(x + parts) + a.x by induction on the summands of
  // `parts`, one schema instance each.
  Step grow_chain(const char* schema, ActionId a, Term x, Term parts) {
    Term whole = add(x, parts);
    Term a_whole = prefix(a, whole);
    if (parts.is_nil()) return refl_step(a_whole);
    auto key = std::tuple(schema[1], a, x.id(), parts.id());
    if (auto it = chain_memo_.find(key); it != chain_memo_.end()) return it->second;
    const std::vector<Summand>& ss = parts.summands();
    Step out;
    if (ss.size() == 1) {
      out = cx.axiom(schema,
                     sub({{"x", x}, {"y", ss[0].target}}, {{"a", a}, {"b", ss[0].action}}));
    } else {
      Summand last = ss.back();
      Term rest = make_term(std::vector<Summand>(ss.begin(), ss.end() - 1));
      Term partial = add(x, rest);
      Step widest =
          cx.axiom(schema, sub({{"x", partial}, {"y", last.target}}, {{"a", a}, {"b", last.action}}));
      Step ih = grow_chain(schema, a, x, rest);  // a.partial = a.partial + a.x
      ChainBuilder chain(a_whole);
      chain.append(widest);                             // + a.partial
      chain.append(sum_step(a_whole, ih));              // + a.x
      chain.append(sum_step(prefix(a, x), sym_step(widest)));  // − a.partial
      out = chain.finish();
    }
    chain_memo_.emplace(key, out);
    return out;
  }

  // a.x = a.x + a.(x + parts) by induction on the summands of `parts`.
  Step add_chain(const char* schema, ActionId a, Term x, Term parts) {
    Term a_x = prefix(a, x);
    if (parts.is_nil()) return refl_step(a_x);
    Term whole = add(x, parts);
    auto key = std::tuple(schema[1], a, x.id(), parts.id());
    if (auto it = chain_memo_.find(key); it != chain_memo_.end()) return it->second;
    const std::vector<Summand>& ss = parts.summands();
    Step out;
    if (ss.size() == 1) {
      out = cx.axiom(schema,
                     sub({{"x", x}, {"y", ss[0].target}}, {{"a", a}, {"b", ss[0].action}}));
    } else {
      Summand last = ss.back();
      Term rest = make_term(std::vector<Summand>(ss.begin(), ss.end() - 1));
      Term partial = add(x, rest);
      Step ih = add_chain(schema, a, x, rest);  // a.x = a.x + a.partial
      Step widen =
          cx.axiom(schema, sub({{"x", partial}, {"y", last.target}}, {{"a", a}, {"b", last.action}}));
      ChainBuilder chain(a_x);
      chain.append(ih);                                      // + a.partial
      chain.append(sum_step(a_x, widen));                    // + a.whole
      chain.append(sum_step(prefix(a, whole), sym_step(ih)));  // − a.partial
      out = chain.finish();
    }
    chain_memo_.emplace(key, out);
    return out;
  }

  std::map<std::pair<TermId, TermId>, Step> eq_memo_, gcov_memo_, gcon_memo_;
  std::map<std::tuple<TermId, TermId, TermId, ActionId>, Step> absr_memo_, absl_memo_;
  std::map<std::tuple<bool, TermId, TermId, TermId, ActionId>, Step> ds_memo_;
  std::map<std::tuple<char, ActionId, TermId, TermId>, Step> chain_memo_;
};

// ── Relation dispatch ───────────────────────────────────────────────────────

std::unique_ptr<ProverBase> make_prover(RelationKind kind, const Alphabet& alphabet) {
  switch (kind) {
    case RelationKind::cc_sim:
      return std::make_unique<CCPreorderProver>(alphabet);
    case RelationKind::conf_precong:
      return std::make_unique<ConfPrecongProver>(alphabet);
    case RelationKind::cc_equiv:
      if (alphabet.has_bivariant())
        throw std::invalid_argument(
            "cc_equivalence proofs require an alphabet without bivariant actions");
      return std::make_unique<CCEquivProver>(alphabet);
    case RelationKind::conf_equiv:
      return std::make_unique<ConfEquivProver>(alphabet);
    default:
      throw std::invalid_argument(std::string("no bundled axiom system targets ") +
                                  to_string(kind));
  }
}

AxiomSchema make_derived(bool first_form) {
  auto slot = [&] {
    return ActionSlot::meta("a", first_form ? ActionSlot::Constraint::covariant
                                            : ActionSlot::Constraint::contravariant);
  };
  PatternPtr lead = Pattern::sum({Pattern::var("x"), Pattern::var(first_form ? "pr" : "pl")});
  PatternPtr tail = Pattern::sum({Pattern::var("x"), Pattern::var(first_form ? "pl" : "pr")});
  AxiomSchema s;
  s.name = first_form ? "DS1" : "DS2";
  s.kind = SchemaKind::equation;
  s.lhs = Pattern::pre(slot(), lead);
  s.rhs = Pattern::sum({Pattern::pre(slot(), lead), Pattern::pre(slot(), tail)});
  s.side = {{SideCondition::Kind::initials_in_class, "pr", "", Polarity::covariant},
            {SideCondition::Kind::initials_in_class, "pl", "", Polarity::contravariant}};
  return s;
}

}  // namespace

// ── Derived equalities ──────────────────────────────────────────────────────

const AxiomSchema& derived_axiom_schema(std::string_view name) {
  static const AxiomSchema first = make_derived(true);
  static const AxiomSchema second = make_derived(false);
  if (name == "DS1") return first;
  if (name == "DS2") return second;
  throw std::invalid_argument("unknown derived axiom '" + std::string(name) +
                              "' (expected DS1 or DS2)");
}

Proof expand_derived_axiom(std::string_view name, const Substitution& subst,
                           const Alphabet& alphabet) {
  const AxiomSchema& schema = derived_axiom_schema(name);
  for (const char* var : {"x", "pr", "pl"})
    if (subst.vars.find(var) == subst.vars.end())
      throw std::invalid_argument(std::string("derived axiom substitution must bind ") + var);
  if (subst.slots.find("a") == subst.slots.end())
    throw std::invalid_argument("derived axiom substitution must bind the action slot a");
  std::set<TermId> seen;
  for (const auto& [var, term] : subst.vars) validate_actions(term, alphabet, seen);
  if (!substitution_admissible(schema, subst, alphabet))
    throw std::invalid_argument("substitution violates the derived axiom's polarity constraints");
  Term lhs = instantiate(*schema.lhs, subst);
  Term rhs = instantiate(*schema.rhs, subst);
  CCEquivProver prover(alphabet);
  Step step = prover.expand(name == "DS1", subst.vars.at("x"), subst.vars.at("pr"),
                            subst.vars.at("pl"), subst.slots.at("a"));
  if (step.lhs != lhs || step.rhs != rhs)
    throw std::logic_error("derived expansion missed its statement");
  Proof proof{SchemaKind::equation, lhs, rhs, prover.cx.axioms, alphabet, step.node};
  verify_proof(proof);
  return proof;
}

// ── ProofFactory ────────────────────────────────────────────────────────────

struct ProofFactory::Impl {
  RelationKind relation;
  SchemaKind claim;
  std::unique_ptr<ProverBase> prover;
  // The verification cache is keyed by node address, so it is sound only
  // while every node it has seen stays alive.  Pinning each returned root
  // here guarantees that: subderivations are reachable from some pinned
  // root (or from the prover's memo tables), so no address is ever
  // recycled during the factory's lifetime.  The payoff is incremental
  // verification — shared subderivations are checked once, not once per
  // prove() call.
  VerifyCache cache;
  std::vector<ProofNodePtr> pinned_roots;
};

ProofFactory::ProofFactory(RelationKind kind, Alphabet alphabet) : impl_(std::make_unique<Impl>()) {
  impl_->relation = kind;
  impl_->claim = (kind == RelationKind::cc_equiv || kind == RelationKind::conf_equiv)
                     ? SchemaKind::equation
                     : SchemaKind::inequation;
  impl_->prover = make_prover(kind, alphabet);
}

ProofFactory::~ProofFactory() = default;
ProofFactory::ProofFactory(ProofFactory&&) noexcept = default;
ProofFactory& ProofFactory::operator=(ProofFactory&&) noexcept = default;

RelationKind ProofFactory::kind() const { return impl_->relation; }

const Alphabet& ProofFactory::alphabet() const { return impl_->prover->cx.alphabet; }

const std::shared_ptr<const AxiomSet>& ProofFactory::axioms() const {
  return impl_->prover->cx.axioms;
}

std::optional<Proof> ProofFactory::prove(Term lhs, Term rhs) {
  std::set<TermId> seen;
  validate_actions(lhs, impl_->prover->cx.alphabet, seen);
  validate_actions(rhs, impl_->prover->cx.alphabet, seen);
  if (!impl_->prover->cx.holds(impl_->relation, lhs, rhs)) return std::nullopt;
  Step step = impl_->prover->entry(lhs, rhs);
  Proof proof{impl_->claim, lhs,
              rhs,          impl_->prover->cx.axioms,
              impl_->prover->cx.alphabet, step.node};
  impl_->pinned_roots.push_back(proof.root);
  verify_proof(proof, impl_->cache);
  return proof;
}

// ── One-shot provers ────────────────────────────────────────────────────────

std::optional<Proof> prove_cc_preorder(Term p, Term q, const Alphabet& alphabet) {
  return ProofFactory(RelationKind::cc_sim, alphabet).prove(p, q);
}

std::optional<Proof> prove_conf_precong(Term p, Term q, const Alphabet& alphabet) {
  return ProofFactory(RelationKind::conf_precong, alphabet).prove(p, q);
}

std::optional<Proof> prove_cc_equiv(Term p, Term q, const Alphabet& alphabet) {
  return ProofFactory(RelationKind::cc_equiv, alphabet).prove(p, q);
}

std::optional<Proof> prove_conf_equiv(Term p, Term q, const Alphabet& alphabet) {
  return ProofFactory(RelationKind::conf_equiv, alphabet).prove(p, q);
}

}  // namespace ccsim
