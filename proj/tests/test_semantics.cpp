#include "ccsim/semantics.hpp"

#include <map>
#include <set>

#include "ccsim/parser.hpp"
#include "doctest.h"

using namespace ccsim;

namespace {


Term rt(const char* s, const Alphabet& al) { return parse_term(s, al); }

// All canonical terms of depth <= 2 over the actions of `al` (exhaustive:
// every subset of action × target pairs, targets ranging over depth <= 1).
std::vector<Term> universe_depth2(const Alphabet& al) {
  const std::vector<ActionId> acts = al.actions();
  auto close_under_sums = [&](const std::vector<Term>& targets) {
    std::vector<Summand> pool;
    for (ActionId a : acts)
      for (Term t : targets) pool.push_back({a, t});
    std::vector<Term> out;
    for (std::size_t mask = 0; mask < (1u << pool.size()); ++mask) {
      std::vector<Summand> chosen;
      for (std::size_t i = 0; i < pool.size(); ++i)
        if (mask & (1u << i)) chosen.push_back(pool[i]);
      out.push_back(make_term(std::move(chosen)));
    }
    std::sort(out.begin(), out.end(), term_less);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };
  std::vector<Term> depth1 = close_under_sums({Term::nil()});
  return close_under_sums(depth1);
}

bool transfer_holds(RelationKind kind, const std::set<std::pair<TermId, TermId>>& rel,
                    Term p, Term q, const Alphabet& al) {
  auto in = [&rel](Term x, Term y) { return rel.count({x.id(), y.id()}) > 0; };
  auto match = [&](const Summand& m, Term other, bool left_moves) {
    for (const Summand& s : other.summands())
      if (s.action == m.action &&
          (left_moves ? in(m.target, s.target) : in(s.target, m.target)))
        return true;
    return false;
  };
  switch (kind) {
    case RelationKind::cc_sim:
    case RelationKind::cc_equiv: {
      for (const Summand& m : p.summands())
        if (al.polarity(m.action) != Polarity::contravariant && !match(m, q, true))
          return false;
      for (const Summand& m : q.summands())
        if (al.polarity(m.action) != Polarity::covariant && !match(m, p, false))
          return false;
      return true;
    }
    case RelationKind::conf_sim:
    case RelationKind::conf_precong:
    case RelationKind::conf_equiv: {
      if (!initials_subset(p, q)) return false;
      for (const Summand& m : q.summands()) {
        bool shared = false;
        for (const Summand& s : p.summands()) shared |= s.action == m.action;
        if (shared && !match(m, p, false)) return false;
      }
      return true;
    }
    case RelationKind::plain_sim: {
      for (const Summand& m : p.summands())
        if (!match(m, q, true)) return false;
      return true;
    }
    case RelationKind::inverse_sim: {
      for (const Summand& m : q.summands())
        if (!match(m, p, false)) return false;
      return true;
    }
    case RelationKind::bisim:
      return p == q;
    case RelationKind::ready_sim: {
      if (initials(p) != initials(q)) return false;
      for (const Summand& m : p.summands())
        if (!match(m, q, true)) return false;
      return true;
    }
    case RelationKind::ready_conf_sim: {
      if (initials(p) != initials(q)) return false;
      for (const Summand& m : q.summands())
        if (!match(m, p, false)) return false;
      return true;
    }
  }
  return false;
}

}  // namespace

TEST_CASE("conformance simulation on the canonical example pairs") {
  Alphabet al = Alphabet::make({"a", "b", "c"});
  Term abc = rt("a.b.0 + a.c.0", al);
  Term ab = rt("a.b.0", al);
  Term abig = rt("a.(b.0 + c.0)", al);

  // Dropping an alternative branch refines: a.b.0 + a.c.0 -> a.b.0.
  CHECK(relation_holds(RelationKind::conf_sim, abc, ab, al));
  CHECK(relation_holds(RelationKind::conf_precong, abc, ab, al));
  CHECK(!relation_holds(RelationKind::conf_sim, ab, abc, al));

  // Widening below a prefix refines: a.b.0 -> a.(b.0 + c.0).
  CHECK(relation_holds(RelationKind::conf_sim, ab, abig, al));
  CHECK(relation_holds(RelationKind::conf_precong, ab, abig, al));
  CHECK(!relation_holds(RelationKind::conf_sim, abig, ab, al));
  CHECK(!relation_holds(RelationKind::conf_equiv, ab, abig, al));

  // The inert process is below everything in conf_sim but the precongruence
  // also needs the right initials to be contained in the left ones.
  CHECK(relation_holds(RelationKind::conf_sim, Term::nil(), ab, al));
  CHECK(!relation_holds(RelationKind::conf_precong, Term::nil(), ab, al));
  CHECK(relation_holds(RelationKind::conf_precong, Term::nil(), Term::nil(), al));

  // Ready variants: equal ready sets are required at every pair.
  CHECK(relation_holds(RelationKind::ready_conf_sim, abc, ab, al));
  CHECK(relation_holds(RelationKind::ready_sim, ab, abc, al));
  CHECK(!relation_holds(RelationKind::ready_conf_sim, ab, abig, al));
  CHECK(!relation_holds(RelationKind::ready_sim, abig, ab, al));
}

TEST_CASE("polarity-directed simulation follows the declared classes") {
  Alphabet al = Alphabet::make({"a"}, {"c"}, {"d"});

  // Covariant summands may be added on the right ...
  CHECK(relation_holds(RelationKind::cc_sim, Term::nil(), rt("a.0", al), al));
  CHECK(relation_holds(RelationKind::cc_sim, rt("a.0", al), rt("a.0 + a.a.0", al), al));
  // ... but not dropped.
  CHECK(!relation_holds(RelationKind::cc_sim, rt("a.0", al), Term::nil(), al));

  // Contravariant summands may be dropped on the right ...
  CHECK(relation_holds(RelationKind::cc_sim, rt("a.0 + c.0", al), rt("a.0", al), al));
  CHECK(relation_holds(RelationKind::cc_sim, rt("c.0", al), Term::nil(), al));
  // ... but not added.
  CHECK(!relation_holds(RelationKind::cc_sim, Term::nil(), rt("c.0", al), al));

  // Bivariant moves must be matched in both directions.
  CHECK(relation_holds(RelationKind::cc_sim, rt("d.0", al), rt("d.0", al), al));
  CHECK(!relation_holds(RelationKind::cc_sim, Term::nil(), rt("d.0", al), al));
  CHECK(!relation_holds(RelationKind::cc_sim, rt("d.0", al), Term::nil(), al));
  CHECK(!relation_holds(RelationKind::cc_sim, rt("d.0", al), rt("d.d.0", al), al));

  // Nested example mixing the classes.
  CHECK(relation_holds(RelationKind::cc_sim, rt("a.(a.0 + c.0)", al), rt("a.a.0", al), al));
  CHECK(!relation_holds(RelationKind::cc_sim, rt("a.a.0", al), rt("a.(a.0 + c.a.0)", al), al));
  CHECK(relation_holds(RelationKind::cc_equiv, rt("a.0 + c.0 + d.0", al),
                       rt("a.0 + c.0 + d.0", al), al));
}

TEST_CASE("the reduced witness pair separates the preorder from the equivalence") {
  Alphabet al = Alphabet::make({"a"}, {}, {"d"});
  // p1 / q1 agree under the equivalence ...
  Term p1 = rt("a.d.a.0", al);
  Term q1 = rt("a.d.a.0 + a.d.0", al);
  CHECK(relation_holds(RelationKind::cc_equiv, p1, q1, al));
  CHECK(relation_holds(RelationKind::cc_sim, p1, q1, al));
  CHECK(relation_holds(RelationKind::cc_sim, q1, p1, al));
  // ... but stripping the leading covariant prefix breaks the preorder.
  Term p1r = rt("d.a.0", al);
  Term q1r = rt("d.a.0 + d.0", al);
  CHECK(!relation_holds(RelationKind::cc_sim, p1r, q1r, al));
  CHECK(relation_holds(RelationKind::cc_sim, q1r, p1r, al));
}

TEST_CASE("bisimilarity is equality of canonical forms") {
  Alphabet al = Alphabet::make({"a", "b"});
  CHECK(relation_holds(RelationKind::bisim, rt("a.0 + a.0", al), rt("a.0", al), al));
  CHECK(relation_holds(RelationKind::bisim, rt("a.(b.0 + b.0)", al), rt("a.b.0", al), al));
  CHECK(!relation_holds(RelationKind::bisim, rt("a.b.0 + a.0", al), rt("a.b.0", al), al));
}

TEST_CASE("uniform alphabets collapse the directed simulation to the classics") {
  Alphabet base = Alphabet::make({"a", "b"});
  Alphabet all_r = base.with_uniform_polarity(Polarity::covariant);
  Alphabet all_l = base.with_uniform_polarity(Polarity::contravariant);
  Alphabet all_bi = base.with_uniform_polarity(Polarity::bivariant);

  const std::vector<Term> terms = universe_depth2(base);
  RelationChecker cr(all_r), cl(all_l), cb(all_bi), plain(base);
  for (Term p : terms)
    for (Term q : terms) {
      CHECK(cr.holds(RelationKind::cc_sim, p, q) ==
            plain.holds(RelationKind::plain_sim, p, q));
      CHECK(cl.holds(RelationKind::cc_sim, p, q) ==
            plain.holds(RelationKind::inverse_sim, p, q));
      CHECK(cb.holds(RelationKind::cc_sim, p, q) ==
            plain.holds(RelationKind::bisim, p, q));
    }
}

TEST_CASE("ready variants swap sides, and sit inside conformance") {
  Alphabet al = Alphabet::make({"a", "b"});
  const std::vector<Term> terms = universe_depth2(al);
  RelationChecker ch(al);
  for (Term p : terms)
    for (Term q : terms) {
      const bool rcs = ch.holds(RelationKind::ready_conf_sim, p, q);
      CHECK(rcs == ch.holds(RelationKind::ready_sim, q, p));
      if (rcs) CHECK(ch.holds(RelationKind::conf_sim, p, q));
      if (ch.holds(RelationKind::conf_precong, p, q))
        CHECK(ch.holds(RelationKind::conf_sim, p, q));
    }
}

TEST_CASE("the preorders are reflexive and transitive") {
  Alphabet al = Alphabet::make({"a"}, {"b"});
  const std::vector<Term> terms = universe_depth2(al);
  RelationChecker ch(al);
  const std::vector<RelationKind> preorders = {
      RelationKind::cc_sim,     RelationKind::conf_sim,      RelationKind::conf_precong,
      RelationKind::plain_sim,  RelationKind::inverse_sim,   RelationKind::bisim,
      RelationKind::ready_sim,  RelationKind::ready_conf_sim};
  for (RelationKind k : preorders)
    for (Term t : terms) CHECK(ch.holds(k, t, t));

  // Transitivity over a thinned sample (every 7th term) to keep this quick.
  std::vector<Term> sample;
  for (std::size_t i = 0; i < terms.size(); i += 7) sample.push_back(terms[i]);
  for (RelationKind k : preorders)
    for (Term x : sample)
      for (Term y : sample) {
        if (!ch.holds(k, x, y)) continue;
        for (Term z : sample)
          if (ch.holds(k, y, z)) CHECK(ch.holds(k, x, z));
      }
}

TEST_CASE("judgements carry transfer-closed witnesses") {
  Alphabet al = Alphabet::make({"a"}, {"c"}, {"d"});
  struct Case {
    RelationKind kind;
    const char* lhs;
    const char* rhs;
  };
  const std::vector<Case> cases = {
      {RelationKind::cc_sim, "a.0 + c.0", "a.0 + a.a.0"},
      {RelationKind::cc_equiv, "a.(d.0 + d.0)", "a.d.0"},
      {RelationKind::conf_sim, "a.d.0 + a.c.0", "a.d.0"},
      {RelationKind::conf_precong, "a.d.0", "a.(d.0 + c.0)"},
      {RelationKind::conf_equiv, "a.0 + a.0", "a.0"},
      {RelationKind::plain_sim, "a.0", "a.(a.0 + d.0) + a.0"},
      {RelationKind::inverse_sim, "a.0 + a.a.0", "a.a.0"},
      {RelationKind::bisim, "a.(c.0 + c.0) + d.0", "a.c.0 + d.0"},
      {RelationKind::ready_sim, "a.d.0", "a.d.0 + a.d.d.0"},
      {RelationKind::ready_conf_sim, "a.d.0 + a.d.d.0", "a.d.0"},
  };
  for (const Case& c : cases) {
    Judgement j = check_relation(c.kind, rt(c.lhs, al), rt(c.rhs, al), al);
    CHECK_MESSAGE(j.verdict, to_string(c.kind), " ", c.lhs, " vs ", c.rhs);
    CHECK(!j.failure.has_value());
    std::set<std::pair<TermId, TermId>> rel;
    for (const auto& [x, y] : j.witness) rel.insert({x.id(), y.id()});
    CHECK(rel.count({j.lhs.id(), j.rhs.id()}) > 0);
    for (const auto& [x, y] : j.witness)
      CHECK_MESSAGE(transfer_holds(c.kind, rel, x, y, al),
                    to_string(c.kind), " witness not closed at (", to_text(x),
                    ", ", to_text(y), ")");
  }
}

TEST_CASE("failed judgements explain the broken obligation") {
  Alphabet al = Alphabet::make({"a"}, {"c"}, {"d"});
  Judgement j = check_relation(RelationKind::cc_sim, rt("a.0", al), Term::nil(), al);
  CHECK(!j.verdict);
  REQUIRE(j.failure.has_value());
  CHECK(j.failure->lhs == j.lhs);
  CHECK(j.failure->requirement.find("covariant move a.0") != std::string::npos);

  j = check_relation(RelationKind::cc_equiv, rt("a.0", al), rt("a.0 + c.0", al), al);
  REQUIRE(j.failure.has_value());
  CHECK(j.failure->requirement.find("left-to-right") != std::string::npos);
  CHECK(j.failure->requirement.find("contravariant move c.0") != std::string::npos);

  j = check_relation(RelationKind::conf_sim, rt("a.0", al), rt("d.0", al), al);
  REQUIRE(j.failure.has_value());
  CHECK(j.failure->requirement.find("offers 'a'") != std::string::npos);

  j = check_relation(RelationKind::conf_precong, Term::nil(), rt("a.0", al), al);
  REQUIRE(j.failure.has_value());
  CHECK(j.failure->requirement.find("right term offers 'a'") != std::string::npos);

  j = check_relation(RelationKind::bisim, rt("a.0", al), rt("a.a.0", al), al);
  REQUIRE(j.failure.has_value());
  CHECK(j.failure->requirement.find("canonical forms differ") != std::string::npos);
}

TEST_CASE("checks validate actions against the alphabet") {
  Alphabet al = Alphabet::make({"a"});
  Alphabet wide = Alphabet::make({"a", "zz"});
  Term bad = parse_term("a.zz.0", wide);
  CHECK_THROWS_AS(check_relation(RelationKind::conf_sim, bad, bad, al),
                  std::invalid_argument);
  CHECK_THROWS_AS(check_relation(RelationKind::cc_sim, bad, Term::nil(), al),
                  std::invalid_argument);
}

TEST_CASE("split_by_polarity buckets summands") {
  Alphabet al = Alphabet::make({"a"}, {"c"}, {"d"}, {"f1"});
  Alphabet user = Alphabet::make({"a", "f1"}, {"c"}, {"d"});
  Term t = parse_term("a.0 + a.a.0 + c.0 + d.c.0 + f1.0", user);
  PolaritySplit split = split_by_polarity(t, al);
  CHECK(split.covariant.size() == 3);  // a.0, a.a.0, and the fresh f1.0
  CHECK(split.contravariant.size() == 1);
  CHECK(split.bivariant.size() == 1);
  CHECK_THROWS_AS(split_by_polarity(parse_term("zz.0", Alphabet::make({"zz"})), al),
                  std::invalid_argument);
}

TEST_CASE("relation names round-trip") {
  for (RelationKind k : all_relations()) {
    auto back = relation_from_string(to_string(k));
    REQUIRE(back.has_value());
    CHECK(*back == k);
  }
  CHECK(!relation_from_string("no_such_relation").has_value());
}
