#include "ccsim/enumeration.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <utility>

#include "json.hpp"

namespace ccsim {

namespace {

using nlohmann::ordered_json;

std::string position_text(const Position& pos) {
  if (pos.empty()) return "the root";
  std::string out = "position ";
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (i != 0) out += '.';
    out += std::to_string(pos[i]);
  }
  return out;
}

SweepReport make_report(std::string sweep, const EnumerationBounds& bounds) {
  SweepReport report;
  report.sweep = std::move(sweep);
  report.alphabet = bounds.alphabet.to_text();
  report.max_depth = bounds.max_depth;
  report.max_width = bounds.max_width;
  return report;
}

}  // namespace

// ── Bounded enumeration ─────────────────────────────────────────────────────

std::size_t enumeration_cap() {
  const char* env = std::getenv("CCSIM_MAX_TERMS");
  if (env == nullptr || *env == '\0') return 200000;
  char* end = nullptr;
  const unsigned long long value = std::strtoull(env, &end, 10);
  if (*env == '-' || end == env || *end != '\0' || value == 0)
    throw std::invalid_argument("CCSIM_MAX_TERMS must be a positive integer");
  return static_cast<std::size_t>(value);
}

std::vector<Term> enumerate_terms(const EnumerationBounds& bounds) {
  if (bounds.max_depth < 0)
    throw std::invalid_argument("enumeration depth must be nonnegative");
  if (bounds.max_width < 1)
    throw std::invalid_argument("enumeration width must be positive");
  const std::size_t cap = enumeration_cap();
  const std::vector<ActionId> actions = bounds.alphabet.actions();
  const std::size_t width = static_cast<std::size_t>(bounds.max_width);

  // Layered fixpoint: layer d holds every term of depth at most d.  Each
  // round offers one summand per (action, previous-layer term) pair and emits
  // every duplicate-free choice of at most `width` of them; distinct choices
  // canonicalize to distinct terms, and the empty choice re-emits 0, so the
  // layers grow monotonically and stay subterm-closed.
  std::vector<Term> layer{Term::nil()};
  for (int depth = 0; depth < bounds.max_depth; ++depth) {
    std::vector<Summand> menu;
    menu.reserve(actions.size() * layer.size());
    for (ActionId a : actions)
      for (const Term& target : layer) menu.push_back({a, target});

    std::vector<Term> next;
    std::vector<Summand> chosen;
    auto extend = [&](auto&& self, std::size_t from) -> void {
      next.push_back(make_term(chosen));
      if (next.size() > cap)
        throw std::length_error(
            "enumeration exceeds the cap of " + std::to_string(cap) +
            " terms; raise CCSIM_MAX_TERMS or shrink the bounds");
      if (chosen.size() == width) return;
      for (std::size_t i = from; i < menu.size(); ++i) {
        chosen.push_back(menu[i]);
        self(self, i + 1);
        chosen.pop_back();
      }
    };
    extend(extend, 0);
    layer = std::move(next);
  }
  return layer;
}

Universe::Universe(EnumerationBounds bounds)
    : bounds_(std::move(bounds)), terms_(enumerate_terms(bounds_)) {
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) index_.emplace(terms_[i].id(), i);
}

std::optional<std::size_t> Universe::find(Term t) const {
  const auto it = index_.find(t.id());
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Universe::index_of(Term t) const {
  const std::optional<std::size_t> i = find(t);
  if (!i) throw std::out_of_range("term '" + to_text(t) + "' is outside this universe");
  return *i;
}

// ── Relation matrices ───────────────────────────────────────────────────────

BitMatrix relation_matrix(RelationKind kind, const Universe& universe) {
  constexpr std::size_t kMatrixLimit = 20000;
  if (universe.size() > kMatrixLimit)
    throw std::invalid_argument(
        "relation matrices are desk-scale: the universe holds " +
        std::to_string(universe.size()) + " terms, over the " +
        std::to_string(kMatrixLimit) + " limit");
  RelationChecker checker(universe.bounds().alphabet);
  const std::vector<Term>& terms = universe.terms();
  BitMatrix matrix(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i)
    for (std::size_t j = 0; j < terms.size(); ++j)
      matrix.set(i, j, checker.holds(kind, terms[i], terms[j]));
  return matrix;
}

// ── Sweep reports ───────────────────────────────────────────────────────────

std::string report_to_json(const SweepReport& report) {
  ordered_json j;
  j["sweep"] = report.sweep;
  j["bounds"] = ordered_json{{"alphabet", report.alphabet},
                             {"max_depth", report.max_depth},
                             {"max_width", report.max_width}};
  j["terms"] = report.terms;
  j["pairs_examined"] = report.pairs_examined;
  j["passed"] = report.passed();
  ordered_json violations = ordered_json::array();
  for (const SweepViolation& v : report.violations)
    violations.push_back(ordered_json{{"lhs", v.lhs},
                                      {"rhs", v.rhs},
                                      {"expected", v.expected},
                                      {"got", v.got},
                                      {"evidence", v.evidence}});
  j["violations"] = std::move(violations);
  return j.dump(2);
}

// ── Soundness ───────────────────────────────────────────────────────────────

namespace {

/// Completes a match: names the matched side leaves free range over
/// `term_range` (for term variables) and the declared actions (for slots),
/// filtered by admissibility.  Fully bound matches pass through unchanged —
/// match_at already vouched for them.
std::vector<Substitution> complete_substitutions(
    const AxiomSchema& schema, const Substitution& matched,
    const std::vector<Term>& term_range, const Alphabet& alphabet) {
  std::vector<std::string> free_vars;
  for (const std::string& v : schema.term_vars())
    if (matched.vars.find(v) == matched.vars.end()) free_vars.push_back(v);
  std::vector<std::string> free_slots;
  for (const std::string& s : schema.slot_names())
    if (matched.slots.find(s) == matched.slots.end()) free_slots.push_back(s);

  std::vector<Substitution> out;
  if (free_vars.empty() && free_slots.empty()) {
    out.push_back(matched);
    return out;
  }
  const std::vector<ActionId> actions = alphabet.actions();
  Substitution current = matched;
  auto fill_slots = [&](auto&& self, std::size_t si) -> void {
    if (si == free_slots.size()) {
      if (substitution_admissible(schema, current, alphabet))
        out.push_back(current);
      return;
    }
    for (ActionId a : actions) {
      current.slots[free_slots[si]] = a;
      self(self, si + 1);
    }
    current.slots.erase(free_slots[si]);
  };
  auto fill_vars = [&](auto&& self, std::size_t vi) -> void {
    if (vi == free_vars.size()) {
      fill_slots(fill_slots, 0);
      return;
    }
    for (const Term& t : term_range) {
      current.vars[free_vars[vi]] = t;
      self(self, vi + 1);
    }
    current.vars.erase(free_vars[vi]);
  };
  fill_vars(fill_vars, 0);
  return out;
}

}  // namespace

SweepReport soundness_sweep(const AxiomSet& axioms,
                            const EnumerationBounds& bounds) {
  const std::vector<Term> universe = enumerate_terms(bounds);
  EnumerationBounds inner = bounds;
  inner.max_depth = std::max(0, bounds.max_depth - 1);
  const std::vector<Term> range = enumerate_terms(inner);

  SweepReport report = make_report("soundness/" + axioms.name, bounds);
  report.terms = universe.size();
  MatchOptions options;
  options.max_width =
      std::max(options.max_width, static_cast<std::size_t>(bounds.max_width));

  for (const Term& t : universe) {
    // A checker per term keeps the memo tables bounded by one term's
    // instances instead of the whole sweep.
    RelationChecker checker(bounds.alphabet);
    for (const Position& pos : positions(t)) {
      for (const AxiomSchema& schema : axioms.schemas) {
        for (const Substitution& matched :
             match_at(schema, t, pos, bounds.alphabet,
                      RewriteDirection::forward, options)) {
          for (const Substitution& full : complete_substitutions(
                   schema, matched, range, bounds.alphabet)) {
            const Term rewritten = apply_at(schema, t, pos, full,
                                            bounds.alphabet,
                                            RewriteDirection::forward);
            ++report.pairs_examined;
            const bool forward = checker.holds(axioms.target, t, rewritten);
            const bool backward =
                schema.kind == SchemaKind::equation
                    ? checker.holds(axioms.target, rewritten, t)
                    : true;
            if (forward && backward) continue;
            std::string direction =
                !forward && !backward ? "both directions violated"
                : !forward            ? "forward instance violated"
                                      : "backward instance violated";
            report.violations.push_back(
                {to_text(t), to_text(rewritten), to_string(axioms.target),
                 std::move(direction),
                 "schema " + schema.name + " at " + position_text(pos)});
          }
        }
      }
    }
  }
  return report;
}

// ── Completeness ────────────────────────────────────────────────────────────

namespace {

// Scores one lhs row of the completeness square, appending any violations.
void score_completeness_row(ProofFactory& factory, const Universe& universe,
                            const BitMatrix& semantic, std::size_t row,
                            SweepReport& report) {
  const std::vector<Term>& terms = universe.terms();
  const char* relation = to_string(factory.kind());
  for (std::size_t j = 0; j < terms.size(); ++j) {
    ++report.pairs_examined;
    const bool expected = semantic.get(row, j);
    const std::string expectation =
        expected ? "a verified proof (" + std::string(relation) + " holds)"
                 : "no proof (" + std::string(relation) + " fails)";
    std::optional<Proof> proof;
    std::string failure;
    try {
      proof = factory.prove(terms[row], terms[j]);
    } catch (const std::exception& error) {
      failure = error.what();
    }
    if (!failure.empty()) {
      report.violations.push_back({to_text(terms[row]), to_text(terms[j]),
                                   expectation, "a prover exception",
                                   failure});
    } else if (proof.has_value() != expected) {
      report.violations.push_back(
          {to_text(terms[row]), to_text(terms[j]), expectation,
           proof ? "a verified proof" : "no proof",
           "proof existence disagrees with the semantic verdict"});
    } else if (proof && !(proof->lhs == terms[row] && proof->rhs == terms[j])) {
      report.violations.push_back(
          {to_text(terms[row]), to_text(terms[j]), expectation,
           "a proof of different endpoints",
           "the proof concludes '" + to_text(proof->lhs) + "' vs '" +
               to_text(proof->rhs) + "'"});
    }
  }
}

}  // namespace

SweepReport completeness_sweep(ProofFactory& factory,
                               const EnumerationBounds& bounds) {
  if (factory.alphabet().to_text() != bounds.alphabet.to_text())
    throw std::invalid_argument(
        "the factory's alphabet does not match the sweep bounds");
  Universe universe(bounds);
  const BitMatrix semantic = relation_matrix(factory.kind(), universe);

  SweepReport report = make_report(
      "completeness/" + std::string(to_string(factory.kind())) + "/" +
          factory.axioms()->name,
      bounds);
  report.terms = universe.size();
  for (std::size_t i = 0; i < universe.size(); ++i)
    score_completeness_row(factory, universe, semantic, i, report);
  return report;
}

SweepReport completeness_sweep(RelationKind relation,
                               const EnumerationBounds& bounds) {
  // A factory accumulates every derivation it has built, so one factory
  // spanning the whole square can outgrow memory on large universes.  A
  // fresh factory per lhs row bounds retention by a single row's
  // derivations while keeping full sharing within the row.
  ProofFactory factory(relation, bounds.alphabet);
  Universe universe(bounds);
  const BitMatrix semantic = relation_matrix(relation, universe);

  SweepReport report =
      make_report("completeness/" + std::string(to_string(relation)) + "/" +
                      factory.axioms()->name,
                  bounds);
  report.terms = universe.size();
  for (std::size_t i = 0; i < universe.size(); ++i) {
    if (i != 0) factory = ProofFactory(relation, bounds.alphabet);
    score_completeness_row(factory, universe, semantic, i, report);
  }
  return report;
}

// ── Coarsest precongruence ──────────────────────────────────────────────────

SweepReport coarsest_precong_sweep(const EnumerationBounds& bounds) {
  if (bounds.alphabet.fresh_pool().empty())
    throw std::invalid_argument(
        "the coarsest-precongruence sweep needs a fresh action the "
        "enumerated terms cannot mention");
  Universe universe(bounds);
  const BitMatrix sim = relation_matrix(RelationKind::conf_sim, universe);
  const BitMatrix pre = relation_matrix(RelationKind::conf_precong, universe);
  RelationChecker checker(bounds.alphabet);

  SweepReport report = make_report("coarsest_precongruence", bounds);
  report.terms = universe.size();
  const std::vector<Term>& terms = universe.terms();
  const std::vector<ActionId> actions = bounds.alphabet.actions();
  const ActionId fresh = bounds.alphabet.fresh_pool().front();

  for (std::size_t i = 0; i < terms.size(); ++i) {
    for (std::size_t j = 0; j < terms.size(); ++j) {
      const Term p = terms[i];
      const Term q = terms[j];
      if (pre.get(i, j)) {
        // Closure: a precongruence must survive prefix and sum contexts.
        for (ActionId a : actions) {
          ++report.pairs_examined;
          if (!checker.holds(RelationKind::conf_precong, prefix(a, p),
                             prefix(a, q)))
            report.violations.push_back(
                {to_text(prefix(a, p)), to_text(prefix(a, q)),
                 "conf_precong preserved", "broken by a prefix context",
                 "'" + to_text(p) + "' below '" + to_text(q) +
                     "' stops being related under the prefix"});
        }
        for (const Term& r : terms) {
          ++report.pairs_examined;
          if (!checker.holds(RelationKind::conf_precong, add(p, r), add(q, r)))
            report.violations.push_back(
                {to_text(add(p, r)), to_text(add(q, r)),
                 "conf_precong preserved", "broken by a sum context",
                 "'" + to_text(p) + "' below '" + to_text(q) +
                     "' stops being related beside '" + to_text(r) + "'"});
        }
      }
      if (sim.get(i, j) && !initials_subset(q, p)) {
        // Coarseness: conf_sim pairs outside the precongruence must be
        // separable by one fresh-guarded summand.
        ++report.pairs_examined;
        const std::vector<ActionId> ip = initials(p);
        ActionId witness = 0;
        for (ActionId a : initials(q)) {
          if (std::find(ip.begin(), ip.end(), a) == ip.end()) {
            witness = a;
            break;
          }
        }
        const Term context = prefix(witness, prefix(fresh, Term::nil()));
        if (checker.holds(RelationKind::conf_sim, add(context, p),
                          add(context, q)))
          report.violations.push_back(
              {to_text(add(context, p)), to_text(add(context, q)),
               "the context distinguishes the pair",
               "still conformance-simulated",
               "I(q) is not contained in I(p), so '" + to_text(context) +
                   " + [.]' must break conf_sim"});
      }
    }
  }
  return report;
}

// ── Hierarchy ───────────────────────────────────────────────────────────────

SweepReport hierarchy_sweep(const EnumerationBounds& bounds) {
  Universe universe(bounds);
  const BitMatrix rcs = relation_matrix(RelationKind::ready_conf_sim, universe);
  const BitMatrix rs = relation_matrix(RelationKind::ready_sim, universe);
  const BitMatrix cs = relation_matrix(RelationKind::conf_sim, universe);

  SweepReport report = make_report("hierarchy", bounds);
  report.terms = universe.size();
  const std::vector<Term>& terms = universe.terms();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    for (std::size_t j = 0; j < terms.size(); ++j) {
      ++report.pairs_examined;
      if (rcs.get(i, j) != rs.get(j, i))
        report.violations.push_back(
            {to_text(terms[i]), to_text(terms[j]),
             "ready_conf_sim(p, q) iff ready_sim(q, p)",
             rcs.get(i, j) ? "ready_conf_sim holds but the converse does not"
                           : "ready_sim(q, p) holds but ready_conf_sim does not",
             "the readiness preorders must be converses"});
      if (rs.get(i, j) && rs.get(j, i) && !(cs.get(i, j) && cs.get(j, i)))
        report.violations.push_back(
            {to_text(terms[i]), to_text(terms[j]), "conf_sim equivalence",
             "a ready_sim-equivalent pair split by conf_sim",
             "ready simulation equivalence must refine conformance "
             "equivalence"});
    }
  }

  // Strictness witnesses: widening one branch below a shared prefix is
  // conformance-neutral yet refused by ready and plain simulation.
  const std::vector<ActionId> actions = bounds.alphabet.actions();
  if (actions.size() >= 3) {
    RelationChecker checker(bounds.alphabet);
    const Term narrow = prefix(actions[0], prefix(actions[1], Term::nil()));
    const Term widened = prefix(
        actions[0], add(prefix(actions[1], Term::nil()),
                        prefix(actions[2], Term::nil())));
    ++report.pairs_examined;
    if (!checker.holds(RelationKind::conf_equiv, narrow, add(narrow, widened)))
      report.violations.push_back(
          {to_text(narrow), to_text(add(narrow, widened)),
           "conf_equiv holds", "refused",
           "adding a widened copy of a branch must be conformance-neutral"});
    ++report.pairs_examined;
    if (checker.holds(RelationKind::ready_sim, widened, narrow))
      report.violations.push_back(
          {to_text(widened), to_text(narrow), "ready_sim refuses", "holds",
           "the widened branch must not ready-simulate below the narrow "
           "one"});
    ++report.pairs_examined;
    if (checker.holds(RelationKind::plain_sim, widened, narrow))
      report.violations.push_back(
          {to_text(widened), to_text(narrow), "plain_sim refuses", "holds",
           "the widened branch must not plain-simulate below the narrow "
           "one"});
  }
  return report;
}

// ── Degeneration ────────────────────────────────────────────────────────────

SweepReport degeneration_sweep(const EnumerationBounds& bounds) {
  const Alphabet& alphabet = bounds.alphabet;
  const int classes = (alphabet.covariant().empty() ? 0 : 1) +
                      (alphabet.contravariant().empty() ? 0 : 1) +
                      (alphabet.bivariant().empty() ? 0 : 1);
  if (classes != 1)
    throw std::invalid_argument(
        "the degeneration sweep needs a single-polarity alphabet");
  const RelationKind counterpart =
      !alphabet.covariant().empty()      ? RelationKind::plain_sim
      : !alphabet.contravariant().empty() ? RelationKind::inverse_sim
                                          : RelationKind::bisim;

  Universe universe(bounds);
  const BitMatrix cc = relation_matrix(RelationKind::cc_sim, universe);
  const BitMatrix classical = relation_matrix(counterpart, universe);

  SweepReport report = make_report(
      "degeneration/" + std::string(to_string(counterpart)), bounds);
  report.terms = universe.size();
  const std::vector<Term>& terms = universe.terms();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    for (std::size_t j = 0; j < terms.size(); ++j) {
      ++report.pairs_examined;
      if (cc.get(i, j) != classical.get(i, j))
        report.violations.push_back(
            {to_text(terms[i]), to_text(terms[j]),
             "cc_sim agrees with " + std::string(to_string(counterpart)),
             cc.get(i, j) ? "cc_sim holds but the degeneration does not"
                          : "the degeneration holds but cc_sim does not",
             "on a single-polarity alphabet the two relations coincide"});
    }
  }
  return report;
}

// ── Witness family ──────────────────────────────────────────────────────────

WitnessReport nonaxiomatizability_witness(int n, const Alphabet& alphabet) {
  if (n < 0)
    throw std::invalid_argument("the witness index must be nonnegative");
  if (alphabet.covariant().empty() || alphabet.bivariant().empty())
    throw std::invalid_argument(
        "the witness family needs one covariant and one bivariant action");
  const ActionId a = alphabet.covariant().front();
  const ActionId b = alphabet.bivariant().front();

  Term reduced_p = prefix(a, Term::nil());  // b^n.a.0 once wrapped
  Term tail = Term::nil();                  // b^n.0 once wrapped
  for (int k = 0; k < n; ++k) {
    reduced_p = prefix(b, reduced_p);
    tail = prefix(b, tail);
  }
  const Term reduced_q = add(reduced_p, tail);
  const Term p = prefix(a, reduced_p);
  const Term q = add(p, prefix(a, tail));

  RelationChecker checker(alphabet);
  WitnessReport report;
  report.n = n;
  report.alphabet = alphabet.to_text();
  report.p = to_text(p);
  report.q = to_text(q);
  report.p_reduced = to_text(reduced_p);
  report.q_reduced = to_text(reduced_q);
  report.equivalence_holds = checker.holds(RelationKind::cc_equiv, p, q);
  if (n >= 1)
    report.reduced_pair_fails =
        !checker.holds(RelationKind::cc_sim, reduced_p, reduced_q);
  const Term pruned_p = prune(p, n + 2);
  const Term pruned_q = prune(q, n + 2);
  report.pruning_separates =
      checker.holds(RelationKind::bisim, pruned_p, p) &&
      !checker.holds(RelationKind::bisim, pruned_q, pruned_p);
  return report;
}

std::string report_to_json(const WitnessReport& report) {
  ordered_json j;
  j["witness"] = "duplication_family";
  j["n"] = report.n;
  j["alphabet"] = report.alphabet;
  j["p"] = report.p;
  j["q"] = report.q;
  j["p_reduced"] = report.p_reduced;
  j["q_reduced"] = report.q_reduced;
  j["equivalence_holds"] = report.equivalence_holds;
  if (report.reduced_pair_fails.has_value())
    j["reduced_pair_fails"] = *report.reduced_pair_fails;
  else
    j["reduced_pair_fails"] = nullptr;
  j["pruning_separates"] = report.pruning_separates;
  j["passed"] = report.passed();
  return j.dump(2);
}

}  // namespace ccsim
