#include <doctest.h>

#include <algorithm>
#include <stdexcept>

#include "ccsim/axioms.hpp"
#include "ccsim/parser.hpp"
#include "ccsim/term.hpp"

using namespace ccsim;

namespace {

Alphabet mixed() {
  return Alphabet::make({"a", "b"}, {"c"}, {"d"}, {});
}

Term t(const std::string& text, const Alphabet& al) { return parse_term(text, al); }

}  // namespace

TEST_CASE("builtin axiom sets exist and carry the expected schemas") {
  const std::vector<std::string>& names = builtin_axiom_set_names();
  REQUIRE(names.size() == 4);
  CHECK(std::find(names.begin(), names.end(), "cc_preorder") != names.end());
  CHECK(std::find(names.begin(), names.end(), "cc_equivalence") != names.end());
  CHECK(std::find(names.begin(), names.end(), "cs_precongruence") != names.end());
  CHECK(std::find(names.begin(), names.end(), "cs_equivalence") != names.end());
  CHECK(builtin_axiom_set("no_such_set") == nullptr);

  auto pre = builtin_axiom_set("cc_preorder");
  REQUIRE(pre != nullptr);
  CHECK(pre->target == RelationKind::cc_sim);
  REQUIRE(pre->schemas.size() == 6);  // four sum laws + two growth laws
  for (const char* base : {"B1", "B2", "B3", "B4"}) CHECK(pre->find(base) != nullptr);
  REQUIRE(pre->find("Sr_p") != nullptr);
  REQUIRE(pre->find("Sl_p") != nullptr);
  CHECK(pre->find("Sr_p")->kind == SchemaKind::inequation);
  CHECK(to_text(*pre->find("B1")) == "B1: x + y = y + x");
  CHECK(to_text(*pre->find("Sr_p")) == "Sr_p: x <= x + a.y  [a:r]");
  CHECK(to_text(*pre->find("Sl_p")) == "Sl_p: x + a.y <= x  [a:l]");

  auto eq = builtin_axiom_set("cc_equivalence");
  REQUIRE(eq != nullptr);
  CHECK(eq->target == RelationKind::cc_equiv);
  CHECK(eq->schemas.size() == 8);
  CHECK(to_text(*eq->find("S1")) ==
        "S1: a.(x + b.y) = a.(x + b.y) + a.x  [a:r, b:r]");
  CHECK(to_text(*eq->find("S2")) ==
        "S2: a.x = a.x + a.(x + b.y)  [a:r, b:l]");
  CHECK(to_text(*eq->find("S3")) ==
        "S3: a.x = a.x + a.(x + b.y)  [a:l, b:r]");
  CHECK(to_text(*eq->find("S4")) ==
        "S4: a.(x + b.y) = a.(x + b.y) + a.x  [a:l, b:l]");

  auto cs = builtin_axiom_set("cs_precongruence");
  REQUIRE(cs != nullptr);
  CHECK(cs->target == RelationKind::conf_precong);
  CHECK(to_text(*cs->find("SCS_g")) == "SCS_g: a.p <= a.(p + q) if disjoint(p, q)");
  CHECK(to_text(*cs->find("SCSinv_p")) == "SCSinv_p: a.p + a.q <= a.p");

  auto cse = builtin_axiom_set("cs_equivalence");
  REQUIRE(cse != nullptr);
  CHECK(cse->target == RelationKind::conf_equiv);
  CHECK(to_text(*cse->find("SCS_eq")) ==
        "SCS_eq: a.p = a.p + a.(p + q) if disjoint(p, q)");
  CHECK(to_text(*cse->find("SCSinv_eq")) ==
        "SCSinv_eq: a.(p + q) = a.(p + q) + a.p if subset(q, p)");

  // schema name helpers
  auto* s1 = eq->find("S1");
  CHECK(s1->term_vars() == std::vector<std::string>{"x", "y"});
  CHECK(s1->slot_names() == std::vector<std::string>{"a", "b"});
}

TEST_CASE("instantiation is canonical and rejects unbound names") {
  const Alphabet al = mixed();
  auto pre = builtin_axiom_set("cc_preorder");
  const AxiomSchema& sr = *pre->find("Sr_p");

  Substitution s;
  s.vars.emplace("x", t("b.0", al));
  s.vars.emplace("y", t("0", al));
  s.slots.emplace("a", ActionRegistry::instance().id_of("a"));
  CHECK(instantiate(*sr.rhs, s) == t("b.0 + a.0", al));
  CHECK(instantiate(*sr.lhs, s) == t("b.0", al));

  Substitution open;
  open.vars.emplace("x", t("b.0", al));
  CHECK_THROWS_AS(instantiate(*sr.rhs, open), std::invalid_argument);

  // instantiation re-canonicalizes: x + a.y with x already containing a.0
  Substitution dup;
  dup.vars.emplace("x", t("a.0", al));
  dup.vars.emplace("y", t("0", al));
  dup.slots.emplace("a", ActionRegistry::instance().id_of("a"));
  CHECK(instantiate(*sr.rhs, dup) == t("a.0", al));
}

TEST_CASE("admissibility enforces slot polarities and side conditions") {
  const Alphabet al = mixed();
  const ActionId a = ActionRegistry::instance().id_of("a");
  const ActionId c = ActionRegistry::instance().id_of("c");

  auto pre = builtin_axiom_set("cc_preorder");
  const AxiomSchema& sr = *pre->find("Sr_p");
  Substitution s;
  s.slots.emplace("a", a);
  CHECK(substitution_admissible(sr, s, al));
  s.slots["a"] = c;  // contravariant action in a covariant slot
  CHECK_FALSE(substitution_admissible(sr, s, al));

  auto cs = builtin_axiom_set("cs_precongruence");
  const AxiomSchema& grow = *cs->find("SCS_g");
  Substitution g;
  g.vars.emplace("p", t("a.0", al));
  g.vars.emplace("q", t("b.0", al));
  CHECK(substitution_admissible(grow, g, al));
  g.vars["q"] = t("a.0 + b.0", al);  // shares the initial 'a' with p
  CHECK_FALSE(substitution_admissible(grow, g, al));
  // with q unbound the condition cannot fire yet
  Substitution partial;
  partial.vars.emplace("p", t("a.0", al));
  CHECK(substitution_admissible(grow, partial, al));

  auto cse = builtin_axiom_set("cs_equivalence");
  const AxiomSchema& inv = *cse->find("SCSinv_eq");
  Substitution v;
  v.vars.emplace("p", t("a.0 + b.0", al));
  v.vars.emplace("q", t("a.c.0", al));  // I(q) = {a} is contained in I(p)
  CHECK(substitution_admissible(inv, v, al));
  v.vars["q"] = t("d.0", al);
  CHECK_FALSE(substitution_admissible(inv, v, al));

  // a class condition, via the text format
  auto custom = parse_axiom_set(
      "set demo for conf_precong\n"
      "vars p q\n"
      "actions a:any\n"
      "axiom only_r: a.p <= a.p + a.q if initials(q) in r\n");
  const AxiomSchema& only_r = *custom->find("only_r");
  Substitution w;
  w.vars.emplace("q", t("a.0 + b.c.0", al));
  CHECK(substitution_admissible(only_r, w, al));
  w.vars["q"] = t("a.0 + c.0", al);  // 'c' is contravariant
  CHECK_FALSE(substitution_admissible(only_r, w, al));
  w.vars["q"] = t("d.0", al);  // bivariant is not covariant either
  CHECK_FALSE(substitution_admissible(only_r, w, al));
}

TEST_CASE("positions, subterms, and replacement") {
  const Alphabet al = mixed();
  const Term term = t("a.b.0 + c.0", al);

  const std::vector<Position> all = positions(term);
  REQUIRE(all.size() == 4);
  CHECK(all[0] == Position{});
  CHECK(all[1] == Position{0});
  CHECK(all[2] == Position{0, 0});
  CHECK(all[3] == Position{1});

  CHECK(subterm_at(term, {}) == term);
  CHECK(subterm_at(term, {0}) == t("b.0", al));
  CHECK(subterm_at(term, {0, 0}) == t("0", al));
  CHECK_THROWS_AS(subterm_at(term, {5}), std::out_of_range);
  CHECK_THROWS_AS(subterm_at(term, {0, 0, 0}), std::out_of_range);

  CHECK(replace_at(term, {}, t("0", al)) == t("0", al));
  CHECK(replace_at(term, {0}, t("0", al)) == t("a.0 + c.0", al));
  // replacement re-canonicalizes: making both summands equal collapses them
  // (canonical order puts a.0 before a.b.0, so the deep summand is index 1)
  const Term two = t("a.b.0 + a.0", al);
  CHECK(replace_at(two, {1}, t("0", al)) == t("a.0", al));
  CHECK_THROWS_AS(replace_at(term, {2}, t("0", al)), std::out_of_range);
}

TEST_CASE("matching enumerates exactly the substitutions modulo the sum laws") {
  const Alphabet al = mixed();
  auto pre = builtin_axiom_set("cc_preorder");
  const AxiomSchema& sr = *pre->find("Sr_p");
  const Term two = t("a.0 + b.0", al);

  SUBCASE("a bare variable only matches the whole term") {
    const std::vector<Substitution> ms = match_at(sr, two, {}, al);
    REQUIRE(ms.size() == 1);
    CHECK(ms[0].vars.at("x") == two);
    CHECK(ms[0].slots.empty());
  }

  SUBCASE("backward matching binds the growth summand every possible way") {
    const std::vector<Substitution> ms =
        match_at(sr, two, {}, al, RewriteDirection::backward);
    // a.y can be a.0 or b.0; x any sub-sum covering the rest
    REQUIRE(ms.size() == 4);
    Substitution expect;
    expect.vars.emplace("x", t("b.0", al));
    expect.vars.emplace("y", t("0", al));
    expect.slots.emplace("a", ActionRegistry::instance().id_of("a"));
    CHECK(std::find(ms.begin(), ms.end(), expect) != ms.end());
    // matching is deterministic
    CHECK(match_at(sr, two, {}, al, RewriteDirection::backward) == ms);
  }

  SUBCASE("contravariant slots refuse covariant actions") {
    const AxiomSchema& sl = *pre->find("Sl_p");
    // forward source x + a.y with 'a' contravariant: no 'c' summand here
    CHECK(match_at(sl, two, {}, al).empty());
    const Term with_c = t("a.0 + c.b.0", al);
    const std::vector<Substitution> ms = match_at(sl, with_c, {}, al);
    REQUIRE(ms.size() == 2);  // x = a.0 or the whole term (items may overlap)
    for (const Substitution& m : ms) {
      CHECK(m.slots.at("a") == ActionRegistry::instance().id_of("c"));
      CHECK(m.vars.at("y") == t("b.0", al));
    }
  }

  SUBCASE("two pattern items may share one summand") {
    auto cs = builtin_axiom_set("cs_precongruence");
    const AxiomSchema& inv = *cs->find("SCSinv_p");  // a.p + a.q <= a.p
    const Term one = t("a.b.0", al);
    const std::vector<Substitution> ms = match_at(inv, one, {}, al);
    REQUIRE(ms.size() == 1);
    CHECK(ms[0].vars.at("p") == t("b.0", al));
    CHECK(ms[0].vars.at("q") == t("b.0", al));

    const Term pair = t("a.b.0 + a.c.0", al);
    const std::vector<Substitution> both = match_at(inv, pair, {}, al);
    REQUIRE(both.size() == 2);  // (p, q) and (q, p); sharing cannot cover here
    CHECK(both[0].vars.at("p") != both[0].vars.at("q"));
  }

  SUBCASE("duplicated variables must agree") {
    const AxiomSchema& b3 = *pre->find("B3");
    const std::vector<Substitution> ms = match_at(b3, two, {}, al);
    REQUIRE(ms.size() == 1);  // x + x covers a.0 + b.0 only with x the whole sum
    CHECK(ms[0].vars.at("x") == two);
  }

  SUBCASE("matching below the root and nested slot agreement") {
    auto eq = builtin_axiom_set("cc_equivalence");
    const AxiomSchema& s1 = *eq->find("S1");
    const Term term = t("a.(a.0 + b.0)", al);
    const std::vector<Substitution> ms = match_at(s1, term, {}, al);
    // a.(x + b.y): the inner slot can take 'a' or 'b', x any cover of the rest
    REQUIRE(ms.size() == 4);
    Substitution pick;
    pick.vars.emplace("x", t("a.0", al));
    pick.vars.emplace("y", t("0", al));
    pick.slots.emplace("a", ActionRegistry::instance().id_of("a"));
    pick.slots.emplace("b", ActionRegistry::instance().id_of("b"));
    CHECK(std::find(ms.begin(), ms.end(), pick) != ms.end());

    // the same schema matched one level down, at the prefix target; x may
    // also absorb the b-summand itself (idempotence), so two matches
    const std::vector<Substitution> inner = match_at(s1, t("c.a.b.0", al), {0}, al);
    REQUIRE(inner.size() == 2);
    CHECK(inner[0].vars.at("x") == t("0", al));
    CHECK(inner[1].vars.at("x") == t("b.0", al));
  }

  SUBCASE("side conditions filter matches") {
    auto cs = builtin_axiom_set("cs_precongruence");
    const AxiomSchema& grow = *cs->find("SCS_g");
    // backward source a.(p + q) with disjoint(p, q)
    const Term term = t("a.(a.0 + b.0)", al);
    const std::vector<Substitution> ms =
        match_at(grow, term, {}, al, RewriteDirection::backward);
    // splits of {a.0, b.0} into p ⊎ q with disjoint initials; overlap p=q dies
    for (const Substitution& m : ms) {
      CHECK(initials_disjoint(m.vars.at("p"), m.vars.at("q")));
    }
    CHECK(ms.size() == 4);  // ({},both),(a,b),(b,a),(both,{})
  }
}

TEST_CASE("matching enforces the width cap at every level") {
  const Alphabet al = mixed();
  auto pre = builtin_axiom_set("cc_preorder");
  const AxiomSchema& sr = *pre->find("Sr_p");
  const Term wide =
      t("a.0 + b.0 + a.a.0 + a.b.0 + b.a.0 + b.b.0 + a.(a.0 + b.0)", al);
  REQUIRE(wide.summands().size() == 7);

  CHECK_THROWS_AS(match_at(sr, wide, {}, al), std::length_error);
  MatchOptions loose;
  loose.max_width = 8;
  CHECK(match_at(sr, wide, {}, al, RewriteDirection::forward, loose).size() == 1);

  // nested: the wide sum sits under a prefix, so the root passes but the
  // recursive match on the target blows the cap
  const Term nested = prefix(ActionRegistry::instance().id_of("a"), wide);
  CHECK_THROWS_AS(match_at(sr, nested, {}, al, RewriteDirection::backward),
                  std::length_error);

  MatchOptions huge;
  huge.max_width = 17;
  CHECK_THROWS_AS(match_at(sr, wide, {}, al, RewriteDirection::forward, huge),
                  std::invalid_argument);
}

TEST_CASE("rewriting applies a closed admissible substitution at a position") {
  const Alphabet al = mixed();
  auto pre = builtin_axiom_set("cc_preorder");
  const AxiomSchema& sr = *pre->find("Sr_p");
  const Term start = t("b.0", al);

  Substitution s;
  s.vars.emplace("x", start);
  s.vars.emplace("y", t("c.0", al));
  s.slots.emplace("a", ActionRegistry::instance().id_of("a"));
  CHECK(apply_at(sr, start, {}, s, al) == t("b.0 + a.c.0", al));

  // backward direction undoes it
  const Term grown = t("b.0 + a.c.0", al);
  CHECK(apply_at(sr, grown, {}, s, al, RewriteDirection::backward) == start);

  // open substitution
  Substitution open = s;
  open.vars.erase("y");
  CHECK_THROWS_AS(apply_at(sr, start, {}, open, al), std::invalid_argument);

  // inadmissible: covariant slot bound to a contravariant action
  Substitution bad = s;
  bad.slots["a"] = ActionRegistry::instance().id_of("c");
  CHECK_THROWS_AS(apply_at(sr, start, {}, bad, al), std::invalid_argument);

  // mismatched: lhs instance is b.0 but the subterm is a.b.0
  CHECK_THROWS_AS(apply_at(sr, t("a.b.0", al), {}, s, al), std::invalid_argument);

  // below the root, with re-canonicalization of the path
  auto cs = builtin_axiom_set("cs_precongruence");
  const AxiomSchema& inv = *cs->find("SCSinv_p");
  const Term term = t("c.(a.b.0 + a.c.0)", al);
  Substitution merge;
  merge.vars.emplace("p", t("b.0", al));
  merge.vars.emplace("q", t("c.0", al));
  merge.slots.emplace("a", ActionRegistry::instance().id_of("a"));
  CHECK(apply_at(inv, term, {0}, merge, al) == t("c.a.b.0", al));
}

TEST_CASE("the plain-text axiom format round-trips and reports errors") {
  auto set = parse_axiom_set(
      "# growth laws for the conformance preorder\n"
      "set my_axioms for conf_precong\n"
      "vars p q\n"
      "actions a:any b:r c:l\n"
      "axiom grow: a.p <= a.(p + q) if disjoint(p, q)\n"
      "axiom drop: a.p + a.q <= a.p\n"
      "axiom both: a.p = a.p + a.q if subset(q, p), initials(q) in r\n");
  CHECK(set->name == "my_axioms");
  CHECK(set->target == RelationKind::conf_precong);
  REQUIRE(set->schemas.size() == 3);
  CHECK(to_text(*set->find("grow")) == "grow: a.p <= a.(p + q) if disjoint(p, q)");
  CHECK(set->find("drop")->kind == SchemaKind::inequation);
  const AxiomSchema& both = *set->find("both");
  CHECK(both.kind == SchemaKind::equation);
  REQUIRE(both.side.size() == 2);
  CHECK(both.side[0].kind == SideCondition::Kind::initials_subset);
  CHECK(both.side[0].var_a == "q");
  CHECK(both.side[0].var_b == "p");
  CHECK(both.side[1].kind == SideCondition::Kind::initials_in_class);
  CHECK(both.side[1].cls == Polarity::covariant);

  // constrained slots survive the round trip
  auto constrained = parse_axiom_set(
      "set s for cc_sim\n"
      "vars x y\n"
      "actions a:r\n"
      "axiom up: x <= x + a.y\n");
  CHECK(to_text(*constrained->find("up")) == "up: x <= x + a.y  [a:r]");

  CHECK_THROWS_AS(parse_axiom_set("vars p\n"), ParseError);  // no set line
  CHECK_THROWS_AS(parse_axiom_set("set s for nothing\n"), ParseError);
  CHECK_THROWS_AS(parse_axiom_set("set s for cc_sim\n"
                                  "axiom a: p <= p\n"),
                  ParseError);  // p undeclared
  CHECK_THROWS_AS(parse_axiom_set("set s for cc_sim\n"
                                  "vars p\n"
                                  "axiom a: p.p <= p\n"),
                  ParseError);  // variables cannot prefix
  CHECK_THROWS_AS(parse_axiom_set("set s for cc_sim\n"
                                  "vars p\n"
                                  "actions a:r\n"
                                  "axiom a: a.p <= a\n"),
                  ParseError);  // action without a target
  CHECK_THROWS_AS(parse_axiom_set("set s for cc_sim\n"
                                  "vars p\n"
                                  "axiom a: p p\n"),
                  ParseError);  // no relation symbol
  CHECK_THROWS_AS(parse_axiom_set("set s for cc_sim\n"
                                  "vars p q\n"
                                  "actions a:any\n"
                                  "axiom a: a.p <= a.q if near(p, q)\n"),
                  ParseError);  // unknown condition
  CHECK_THROWS_AS(parse_axiom_set("set s for cc_sim\n"
                                  "actions a:zz\n"),
                  ParseError);  // bad class

  // errors carry the line number
  try {
    parse_axiom_set("set s for cc_sim\n\nwhatever p q\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}
