#include "doctest.h"

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccsim/action.hpp"
#include "ccsim/axioms.hpp"
#include "ccsim/parser.hpp"
#include "ccsim/proof.hpp"
#include "ccsim/provers.hpp"
#include "ccsim/semantics.hpp"
#include "ccsim/term.hpp"

using namespace ccsim;

namespace {

Term t(const std::string& text, const Alphabet& alphabet) {
  return parse_term(text, alphabet);
}

ActionId act(const std::string& name) {
  return ActionRegistry::instance().id_of(name);
}

// Every canonical term over `alphabet` with nesting depth at most `depth` and
// at most `width` summands under each node, built layer by layer.
std::vector<Term> terms_upto(const Alphabet& alphabet, int depth, std::size_t width) {
  std::vector<Term> layer = {Term::nil()};
  for (int d = 0; d < depth; ++d) {
    std::vector<Summand> menu;
    for (ActionId a : alphabet.actions())
      for (Term target : layer) menu.push_back({a, target});
    std::vector<Term> next;
    std::vector<Summand> chosen;
    std::function<void(std::size_t)> extend = [&](std::size_t from) {
      next.push_back(make_term(chosen));
      if (chosen.size() == width) return;
      for (std::size_t i = from; i < menu.size(); ++i) {
        chosen.push_back(menu[i]);
        extend(i + 1);
        chosen.pop_back();
      }
    };
    extend(0);
    layer = std::move(next);
  }
  return layer;
}

// The prover must find a proof exactly when the checker says the relation
// holds; every returned proof has already been verified by the factory.
void check_sweep(RelationKind kind, const Alphabet& alphabet, int depth) {
  std::vector<Term> terms = terms_upto(alphabet, depth, 2);
  ProofFactory factory(kind, alphabet);
  RelationChecker checker(alphabet);
  std::size_t proved = 0;
  std::size_t refused = 0;
  for (Term lhs : terms) {
    for (Term rhs : terms) {
      bool expected = checker.holds(kind, lhs, rhs);
      std::optional<Proof> proof;
      try {
        proof = factory.prove(lhs, rhs);
      } catch (const std::exception& e) {
        FAIL(std::string(to_string(kind))
             << ": prover threw on " << to_text(lhs) << "  vs  " << to_text(rhs)
             << ": " << std::string(e.what()));
      }
      if (proof.has_value() != expected)
        FAIL(std::string(to_string(kind)) << ": prover and checker disagree on "
                                          << to_text(lhs) << "  vs  " << to_text(rhs));
      (expected ? proved : refused) += 1;
    }
  }
  CHECK(proved > 0);
  CHECK(refused > 0);
}

Term sum_of(const std::vector<Term>& menu, std::size_t count) {
  Term out = Term::nil();
  for (std::size_t i = 0; i < count; ++i) out = add(out, menu[i]);
  return out;
}

}  // namespace

// ── Pinned shapes ────────────────────────────────────────────────────────────

TEST_CASE("preorder proofs grow covariant prefixes from nothing") {
  Alphabet alphabet = Alphabet::make({"a", "b"});
  std::optional<Proof> proof =
      prove_cc_preorder(Term::nil(), t("a.b.0", alphabet), alphabet);
  REQUIRE(proof.has_value());
  CHECK(proof->kind == SchemaKind::inequation);
  CHECK(proof->lhs == Term::nil());
  CHECK(proof->rhs == t("a.b.0", alphabet));
  CHECK(axiom_step_counts(*proof) ==
        std::map<std::string, std::size_t>{{"Sr_p", 2}});

  // Serialization keeps the derivation checkable.
  Proof back = proof_from_json(proof_to_json(*proof));
  CHECK(back.axioms->name == proof->axioms->name);
  CHECK(back.lhs == proof->lhs);
  CHECK(back.rhs == proof->rhs);
  CHECK_NOTHROW(verify_proof(back));
}

TEST_CASE("conformance widening is a single growth axiom at the root") {
  Alphabet alphabet = Alphabet::make({"a", "b", "c"});
  std::optional<Proof> proof = prove_conf_precong(
      t("a.b.0", alphabet), t("a.(b.0 + c.0)", alphabet), alphabet);
  REQUIRE(proof.has_value());
  CHECK(axiom_step_counts(*proof) ==
        std::map<std::string, std::size_t>{{"SCS_g", 1}});
  CHECK(proof->root->rule == ProofNode::Rule::axiom);
  CHECK(proof->root->schema == "SCS_g");
}

TEST_CASE("conformance merge deletion is a single inverse axiom") {
  Alphabet alphabet = Alphabet::make({"a", "b", "c"});
  std::optional<Proof> proof = prove_conf_precong(
      t("a.b.0 + a.c.0", alphabet), t("a.b.0", alphabet), alphabet);
  REQUIRE(proof.has_value());
  CHECK(axiom_step_counts(*proof) ==
        std::map<std::string, std::size_t>{{"SCSinv_p", 1}});
  CHECK(proof->root->rule == ProofNode::Rule::axiom);
  CHECK(proof->root->schema == "SCSinv_p");
}

TEST_CASE("covariant absorption instantiates the first sum law once") {
  Alphabet alphabet = Alphabet::make({"a", "b"});
  std::optional<Proof> proof = prove_cc_equiv(
      t("a.b.0", alphabet), t("a.b.0 + a.0", alphabet), alphabet);
  REQUIRE(proof.has_value());
  CHECK(proof->kind == SchemaKind::equation);
  CHECK(axiom_step_counts(*proof) ==
        std::map<std::string, std::size_t>{{"S1", 1}});
}

TEST_CASE("conformance equivalence absorbs a widened branch with one axiom") {
  Alphabet alphabet = Alphabet::make({"a", "b", "c"});
  std::optional<Proof> proof = prove_conf_equiv(
      t("a.b.0", alphabet), t("a.b.0 + a.(b.0 + c.0)", alphabet), alphabet);
  REQUIRE(proof.has_value());
  CHECK(proof->kind == SchemaKind::equation);
  CHECK(axiom_step_counts(*proof) ==
        std::map<std::string, std::size_t>{{"SCS_eq", 1}});
}

TEST_CASE("identical terms get axiom-free proofs from every prover") {
  Alphabet alphabet = Alphabet::make({"a"}, {"b"});
  Term p = t("a.b.0 + b.0", alphabet);
  for (auto prover : {prove_cc_preorder, prove_conf_precong, prove_cc_equiv,
                      prove_conf_equiv}) {
    std::optional<Proof> proof = prover(p, p, alphabet);
    REQUIRE(proof.has_value());
    CHECK(count_axiom_steps(*proof) == 0);
  }
}

TEST_CASE("provers return nothing when the relation fails") {
  Alphabet alphabet = Alphabet::make({"a"}, {"b"});
  CHECK(!prove_cc_preorder(t("a.0", alphabet), Term::nil(), alphabet).has_value());
  CHECK(!prove_conf_precong(t("a.0", alphabet), t("b.0", alphabet), alphabet).has_value());
  CHECK(!prove_cc_equiv(Term::nil(), t("a.0", alphabet), alphabet).has_value());
  CHECK(!prove_conf_equiv(t("a.0 + b.0", alphabet), t("a.0", alphabet), alphabet).has_value());
}

// ── Factory contract ─────────────────────────────────────────────────────────

TEST_CASE("factories exist only for axiomatized relations") {
  Alphabet alphabet = Alphabet::make({"a"});
  CHECK_THROWS_AS(ProofFactory(RelationKind::bisim, alphabet), std::invalid_argument);
  CHECK_THROWS_AS(ProofFactory(RelationKind::plain_sim, alphabet), std::invalid_argument);
  CHECK_THROWS_AS(ProofFactory(RelationKind::conf_sim, alphabet), std::invalid_argument);
}

TEST_CASE("equivalence proofs demand polarized alphabets") {
  Alphabet mixed = Alphabet::make({"b"}, {}, {"a"});
  CHECK_THROWS_AS(ProofFactory(RelationKind::cc_equiv, mixed), std::invalid_argument);
  CHECK_THROWS_AS(prove_cc_equiv(Term::nil(), Term::nil(), mixed), std::invalid_argument);
  // The preorder system is fine with bivariant actions.
  CHECK_NOTHROW(ProofFactory(RelationKind::cc_sim, mixed));
}

TEST_CASE("factories validate terms against their alphabet") {
  Alphabet alphabet = Alphabet::make({"a"}, {"b"});
  Term stray = prefix(act("quux"), Term::nil());
  ProofFactory factory(RelationKind::conf_precong, alphabet);
  CHECK_THROWS_AS(factory.prove(stray, stray), std::invalid_argument);
  CHECK_THROWS_AS(factory.prove(Term::nil(), stray), std::invalid_argument);

  CHECK(factory.kind() == RelationKind::conf_precong);
  CHECK(factory.axioms()->name == "cs_precongruence");
  CHECK(factory.alphabet().to_text() == alphabet.to_text());
}

// ── Derived duplication equalities ───────────────────────────────────────────

TEST_CASE("derived duplication schemas expand to primitive sum laws") {
  Alphabet alphabet = Alphabet::make({"a", "b"}, {"c", "d"});

  Substitution subst;
  subst.vars = {{"x", t("b.0", alphabet)},
                {"pr", Term::nil()},
                {"pl", t("c.0 + d.0", alphabet)}};
  subst.slots = {{"a", act("a")}};
  Proof two_adds = expand_derived_axiom("DS1", subst, alphabet);
  CHECK(axiom_step_counts(two_adds) ==
        std::map<std::string, std::size_t>{{"S2", 2}});

  subst.vars["pr"] = t("a.0", alphabet);
  subst.vars["pl"] = Term::nil();
  Proof one_grow = expand_derived_axiom("DS1", subst, alphabet);
  CHECK(axiom_step_counts(one_grow) ==
        std::map<std::string, std::size_t>{{"S1", 1}});
  CHECK(one_grow.root->rule == ProofNode::Rule::axiom);
  CHECK(one_grow.root->schema == "S1");

  subst.vars["pl"] = t("c.0", alphabet);
  Proof mixed = expand_derived_axiom("DS1", subst, alphabet);
  CHECK(axiom_step_counts(mixed) ==
        std::map<std::string, std::size_t>{{"S1", 1}, {"S2", 1}});

  // The second form leans on the contravariant laws instead.
  subst.slots["a"] = act("c");
  subst.vars["pr"] = Term::nil();
  subst.vars["pl"] = t("c.0", alphabet);
  Proof one_grow_con = expand_derived_axiom("DS2", subst, alphabet);
  CHECK(axiom_step_counts(one_grow_con) ==
        std::map<std::string, std::size_t>{{"S4", 1}});

  subst.vars["pr"] = t("a.0", alphabet);
  subst.vars["pl"] = Term::nil();
  Proof one_add_con = expand_derived_axiom("DS2", subst, alphabet);
  CHECK(axiom_step_counts(one_add_con) ==
        std::map<std::string, std::size_t>{{"S3", 1}});
}

TEST_CASE("derived expansions land on their schema instances") {
  Alphabet alphabet = Alphabet::make({"a", "b"}, {"c", "d"});
  std::vector<Term> covariant_menu = {t("a.0", alphabet), t("b.0", alphabet),
                                      t("a.a.0", alphabet)};
  std::vector<Term> contravariant_menu = {t("c.0", alphabet), t("d.0", alphabet),
                                          t("c.c.0", alphabet)};
  Term x = t("a.0 + c.0", alphabet);
  for (std::size_t i = 0; i <= 3; ++i) {
    for (std::size_t j = 0; j <= 3; ++j) {
      for (const std::string name : {"DS1", "DS2"}) {
        Substitution subst;
        subst.vars = {{"x", x},
                      {"pr", sum_of(covariant_menu, i)},
                      {"pl", sum_of(contravariant_menu, j)}};
        subst.slots = {{"a", act(name == "DS1" ? "a" : "c")}};
        const AxiomSchema& schema = derived_axiom_schema(name);
        Proof proof = expand_derived_axiom(name, subst, alphabet);
        CHECK(proof.kind == SchemaKind::equation);
        CHECK(proof.lhs == instantiate(*schema.lhs, subst));
        CHECK(proof.rhs == instantiate(*schema.rhs, subst));
        CHECK_NOTHROW(verify_proof(proof));
      }
    }
  }
}

TEST_CASE("derived expansion rejects malformed requests") {
  Alphabet alphabet = Alphabet::make({"a"}, {"c"});
  CHECK_THROWS_AS(derived_axiom_schema("DS3"), std::invalid_argument);

  Substitution good;
  good.vars = {{"x", Term::nil()},
               {"pr", t("a.0", alphabet)},
               {"pl", Term::nil()}};
  good.slots = {{"a", act("a")}};
  CHECK_NOTHROW(expand_derived_axiom("DS1", good, alphabet));

  Substitution missing = good;
  missing.vars.erase("pl");
  CHECK_THROWS_AS(expand_derived_axiom("DS1", missing, alphabet),
                  std::invalid_argument);

  Substitution unbound_slot = good;
  unbound_slot.slots.clear();
  CHECK_THROWS_AS(expand_derived_axiom("DS1", unbound_slot, alphabet),
                  std::invalid_argument);

  // pr must start with covariant actions only.
  Substitution crossed = good;
  crossed.vars["pr"] = t("c.0", alphabet);
  CHECK_THROWS_AS(expand_derived_axiom("DS1", crossed, alphabet),
                  std::invalid_argument);

  // The first form requires a covariant prefix action.
  Substitution wrong_slot = good;
  wrong_slot.slots["a"] = act("c");
  CHECK_THROWS_AS(expand_derived_axiom("DS1", wrong_slot, alphabet),
                  std::invalid_argument);

  Substitution stray = good;
  stray.vars["x"] = prefix(act("quux"), Term::nil());
  CHECK_THROWS_AS(expand_derived_axiom("DS1", stray, alphabet),
                  std::invalid_argument);
}

// ── Prover/checker agreement sweeps ──────────────────────────────────────────

TEST_CASE("preorder prover agrees with the checker on polarized terms") {
  check_sweep(RelationKind::cc_sim, Alphabet::make({"a"}, {"b"}), 2);
}

TEST_CASE("preorder prover agrees with the checker on bivariant terms") {
  check_sweep(RelationKind::cc_sim, Alphabet::make({"b"}, {}, {"a"}), 2);
}

TEST_CASE("conformance prover agrees with the checker") {
  check_sweep(RelationKind::conf_precong, Alphabet::make({"a"}, {"b"}), 2);
}

TEST_CASE("equivalence provers agree with the checker") {
  check_sweep(RelationKind::cc_equiv, Alphabet::make({"a"}, {"b"}), 2);
  check_sweep(RelationKind::conf_equiv, Alphabet::make({"a"}, {"b"}), 2);
}

// ── Determinism ──────────────────────────────────────────────────────────────

TEST_CASE("proof construction is deterministic") {
  Alphabet polarized = Alphabet::make({"a"}, {"b"});
  Alphabet wide = Alphabet::make({"a", "b", "c"});

  struct Probe {
    RelationKind kind;
    Alphabet alphabet;
    Term lhs, rhs;
  };
  std::vector<Probe> probes = {
      {RelationKind::cc_sim, polarized, Term::nil(), t("a.a.0 + a.0", polarized)},
      {RelationKind::cc_equiv, polarized, t("a.a.0", polarized),
       t("a.a.0 + a.0", polarized)},
      {RelationKind::conf_precong, wide, t("a.b.0", wide),
       t("a.(b.0 + c.0)", wide)},
      {RelationKind::conf_equiv, wide, t("a.b.0", wide),
       t("a.b.0 + a.(b.0 + c.0)", wide)},
  };
  for (const Probe& probe : probes) {
    ProofFactory first(probe.kind, probe.alphabet);
    ProofFactory second(probe.kind, probe.alphabet);
    std::optional<Proof> one = first.prove(probe.lhs, probe.rhs);
    std::optional<Proof> two = second.prove(probe.lhs, probe.rhs);
    std::optional<Proof> again = first.prove(probe.lhs, probe.rhs);
    REQUIRE(one.has_value());
    REQUIRE(two.has_value());
    REQUIRE(again.has_value());
    CHECK(proof_to_json(*one) == proof_to_json(*two));
    CHECK(proof_to_json(*one) == proof_to_json(*again));
  }
}
