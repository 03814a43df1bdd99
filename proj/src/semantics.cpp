#include "ccsim/semantics.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace ccsim {

const char* to_string(RelationKind k) {
  switch (k) {
    case RelationKind::cc_sim: return "cc_sim";
    case RelationKind::cc_equiv: return "cc_equiv";
    case RelationKind::conf_sim: return "conf_sim";
    case RelationKind::conf_precong: return "conf_precong";
    case RelationKind::conf_equiv: return "conf_equiv";
    case RelationKind::plain_sim: return "plain_sim";
    case RelationKind::inverse_sim: return "inverse_sim";
    case RelationKind::bisim: return "bisim";
    case RelationKind::ready_sim: return "ready_sim";
    case RelationKind::ready_conf_sim: return "ready_conf_sim";
  }
  return "?";
}

const std::vector<RelationKind>& all_relations() {
  static const std::vector<RelationKind> all = {
      RelationKind::cc_sim,       RelationKind::cc_equiv,
      RelationKind::conf_sim,     RelationKind::conf_precong,
      RelationKind::conf_equiv,   RelationKind::plain_sim,
      RelationKind::inverse_sim,  RelationKind::bisim,
      RelationKind::ready_sim,    RelationKind::ready_conf_sim,
  };
  return all;
}

std::optional<RelationKind> relation_from_string(std::string_view name) {
  for (RelationKind k : all_relations())
    if (name == to_string(k)) return k;
  return std::nullopt;
}

namespace {

std::uint64_t pair_key(Term p, Term q) {
  return (static_cast<std::uint64_t>(p.id()) << 32) | q.id();
}

bool initials_equal(Term p, Term q) { return initials(p) == initials(q); }

std::string move_text(const Summand& m) { return to_text(prefix(m.action, m.target)); }

const char* polarity_word(Polarity p) {
  switch (p) {
    case Polarity::covariant: return "covariant";
    case Polarity::contravariant: return "contravariant";
    case Polarity::bivariant: return "bivariant";
  }
  return "?";
}

// One checker = one alphabet; memo tables are per-primitive since verdicts
// depend only on the pair (terms are interned globally).
class Checker {
 public:
  explicit Checker(const Alphabet& alphabet) : alphabet_(alphabet) {}

  bool holds(RelationKind kind, Term p, Term q) {
    switch (kind) {
      case RelationKind::cc_sim: return cc(p, q);
      case RelationKind::cc_equiv: return cc(p, q) && cc(q, p);
      case RelationKind::conf_sim: return cs(p, q);
      case RelationKind::conf_precong: return cs(p, q) && initials_subset(q, p);
      case RelationKind::conf_equiv: return cs(p, q) && cs(q, p);
      case RelationKind::plain_sim: return sim(p, q);
      case RelationKind::inverse_sim: return inv(p, q);
      case RelationKind::bisim: return p == q;
      case RelationKind::ready_sim: return rs(p, q);
      case RelationKind::ready_conf_sim: return rcs(p, q);
    }
    throw std::logic_error("unknown relation kind");
  }

  FailingObligation explain(RelationKind kind, Term p, Term q) {
    switch (kind) {
      case RelationKind::cc_sim:
        return explain_cc(p, q);
      case RelationKind::cc_equiv:
        if (!cc(p, q)) return direction("left-to-right", explain_cc(p, q));
        return direction("right-to-left", explain_cc(q, p));
      case RelationKind::conf_sim:
        return explain_cs(p, q);
      case RelationKind::conf_precong: {
        if (!cs(p, q)) return explain_cs(p, q);
        for (ActionId a : initials(q))
          if (!offers(p, a))
            return {p, q,
                    "the right term offers '" + ActionRegistry::instance().name(a) +
                        "' but the left term does not, so adding a summand can tell "
                        "them apart"};
        break;
      }
      case RelationKind::conf_equiv:
        if (!cs(p, q)) return direction("left-to-right", explain_cs(p, q));
        return direction("right-to-left", explain_cs(q, p));
      case RelationKind::plain_sim:
        return explain_sim(p, q);
      case RelationKind::inverse_sim:
        return explain_inv(p, q);
      case RelationKind::bisim:
        return {p, q, "the canonical forms differ: " + to_text(p) + " vs " + to_text(q)};
      case RelationKind::ready_sim:
        return explain_rs(p, q);
      case RelationKind::ready_conf_sim:
        return explain_rcs(p, q);
    }
    return {p, q, "the check unexpectedly holds"};
  }

  std::vector<std::pair<Term, Term>> collect_witness(RelationKind kind, Term p, Term q) {
    std::vector<std::pair<Term, Term>> out;
    auto from = [&out](const std::unordered_map<std::uint64_t, bool>& memo) {
      for (const auto& [key, value] : memo)
        if (value)
          out.emplace_back(Term(static_cast<TermId>(key >> 32)),
                           Term(static_cast<TermId>(key & 0xffffffffu)));
    };
    switch (kind) {
      case RelationKind::cc_sim:
      case RelationKind::cc_equiv:
        from(cc_memo_);
        break;
      case RelationKind::conf_sim:
      case RelationKind::conf_precong:
      case RelationKind::conf_equiv:
        from(cs_memo_);
        break;
      case RelationKind::plain_sim:
        from(sim_memo_);
        break;
      case RelationKind::inverse_sim:
        from(inv_memo_);
        break;
      case RelationKind::bisim:
        if (p == q) identity_pairs(p, out);
        break;
      case RelationKind::ready_sim:
        from(rs_memo_);
        break;
      case RelationKind::ready_conf_sim:
        from(rcs_memo_);
        break;
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
      if (int c = compare(a.first, b.first); c != 0) return c < 0;
      return compare(a.second, b.second) < 0;
    });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  // ── Primitive checks ─────────────────────────────────────────────────────

  bool cc(Term p, Term q) {
    const std::uint64_t key = pair_key(p, q);
    if (auto it = cc_memo_.find(key); it != cc_memo_.end()) return it->second;
    bool v = true;
    for (const Summand& m : p.summands())
      if (polarity(m.action) != Polarity::contravariant && !cc_match_right(m, q)) {
        v = false;
        break;
      }
    if (v)
      for (const Summand& m : q.summands())
        if (polarity(m.action) != Polarity::covariant && !cc_match_left(p, m)) {
          v = false;
          break;
        }
    cc_memo_.emplace(key, v);
    return v;
  }

  bool cs(Term p, Term q) {
    const std::uint64_t key = pair_key(p, q);
    if (auto it = cs_memo_.find(key); it != cs_memo_.end()) return it->second;
    bool v = initials_subset(p, q);
    if (v)
      for (const Summand& m : q.summands()) {
        if (!offers(p, m.action)) continue;  // only shared initials transfer
        bool matched = false;
        for (const Summand& s : p.summands())
          if (s.action == m.action && cs(s.target, m.target)) {
            matched = true;
            break;
          }
        if (!matched) {
          v = false;
          break;
        }
      }
    cs_memo_.emplace(key, v);
    return v;
  }

  bool sim(Term p, Term q) {
    const std::uint64_t key = pair_key(p, q);
    if (auto it = sim_memo_.find(key); it != sim_memo_.end()) return it->second;
    bool v = true;
    for (const Summand& m : p.summands()) {
      bool matched = false;
      for (const Summand& s : q.summands())
        if (s.action == m.action && sim(m.target, s.target)) {
          matched = true;
          break;
        }
      if (!matched) {
        v = false;
        break;
      }
    }
    sim_memo_.emplace(key, v);
    return v;
  }

  bool inv(Term p, Term q) {
    const std::uint64_t key = pair_key(p, q);
    if (auto it = inv_memo_.find(key); it != inv_memo_.end()) return it->second;
    bool v = true;
    for (const Summand& m : q.summands()) {
      bool matched = false;
      for (const Summand& s : p.summands())
        if (s.action == m.action && inv(s.target, m.target)) {
          matched = true;
          break;
        }
      if (!matched) {
        v = false;
        break;
      }
    }
    inv_memo_.emplace(key, v);
    return v;
  }

  bool rs(Term p, Term q) {
    const std::uint64_t key = pair_key(p, q);
    if (auto it = rs_memo_.find(key); it != rs_memo_.end()) return it->second;
    bool v = initials_equal(p, q);
    if (v)
      for (const Summand& m : p.summands()) {
        bool matched = false;
        for (const Summand& s : q.summands())
          if (s.action == m.action && rs(m.target, s.target)) {
            matched = true;
            break;
          }
        if (!matched) {
          v = false;
          break;
        }
      }
    rs_memo_.emplace(key, v);
    return v;
  }

  bool rcs(Term p, Term q) {
    const std::uint64_t key = pair_key(p, q);
    if (auto it = rcs_memo_.find(key); it != rcs_memo_.end()) return it->second;
    bool v = initials_equal(p, q);
    if (v)
      for (const Summand& m : q.summands()) {
        bool matched = false;
        for (const Summand& s : p.summands())
          if (s.action == m.action && rcs(s.target, m.target)) {
            matched = true;
            break;
          }
        if (!matched) {
          v = false;
          break;
        }
      }
    rcs_memo_.emplace(key, v);
    return v;
  }

 private:
  static bool offers(Term t, ActionId a) {
    for (const Summand& s : t.summands())
      if (s.action == a) return true;
    return false;
  }

  bool cc_match_right(const Summand& m, Term q) {
    for (const Summand& s : q.summands())
      if (s.action == m.action && cc(m.target, s.target)) return true;
    return false;
  }

  bool cc_match_left(Term p, const Summand& m) {
    for (const Summand& s : p.summands())
      if (s.action == m.action && cc(s.target, m.target)) return true;
    return false;
  }

  Polarity polarity(ActionId a) const {
    std::optional<Polarity> pol = alphabet_.polarity(a);
    if (!pol)
      throw std::invalid_argument("term uses action '" +
                                  ActionRegistry::instance().name(a) +
                                  "' which the alphabet does not declare");
    return *pol;
  }

  static FailingObligation direction(const char* label, FailingObligation f) {
    f.requirement = std::string(label) + ": " + f.requirement;
    return f;
  }

  static void identity_pairs(Term t, std::vector<std::pair<Term, Term>>& out) {
    out.emplace_back(t, t);
    for (const Summand& s : t.summands()) identity_pairs(s.target, out);
  }

  FailingObligation explain_cc(Term p, Term q) {
    for (const Summand& m : p.summands()) {
      const Polarity pol = polarity(m.action);
      if (pol != Polarity::contravariant && !cc_match_right(m, q))
        return {p, q,
                std::string("the left term's ") + polarity_word(pol) + " move " +
                    move_text(m) + " is simulated by no '" +
                    ActionRegistry::instance().name(m.action) +
                    "'-move of the right term"};
    }
    for (const Summand& m : q.summands()) {
      const Polarity pol = polarity(m.action);
      if (pol != Polarity::covariant && !cc_match_left(p, m))
        return {p, q,
                std::string("the right term's ") + polarity_word(pol) + " move " +
                    move_text(m) + " is simulated by no '" +
                    ActionRegistry::instance().name(m.action) +
                    "'-move of the left term"};
    }
    return {p, q, "the check unexpectedly holds"};
  }

  FailingObligation explain_cs(Term p, Term q) {
    for (ActionId a : initials(p))
      if (!offers(q, a))
        return {p, q,
                "the left term offers '" + ActionRegistry::instance().name(a) +
                    "' but the right term does not"};
    for (const Summand& m : q.summands()) {
      if (!offers(p, m.action)) continue;
      bool matched = false;
      for (const Summand& s : p.summands())
        if (s.action == m.action && cs(s.target, m.target)) {
          matched = true;
          break;
        }
      if (!matched)
        return {p, q,
                "the right term's move " + move_text(m) +
                    " is conformance-matched by no '" +
                    ActionRegistry::instance().name(m.action) +
                    "'-move of the left term"};
    }
    return {p, q, "the check unexpectedly holds"};
  }

  FailingObligation explain_sim(Term p, Term q) {
    for (const Summand& m : p.summands()) {
      bool matched = false;
      for (const Summand& s : q.summands())
        if (s.action == m.action && sim(m.target, s.target)) {
          matched = true;
          break;
        }
      if (!matched)
        return {p, q,
                "the left term's move " + move_text(m) + " is simulated by no '" +
                    ActionRegistry::instance().name(m.action) +
                    "'-move of the right term"};
    }
    return {p, q, "the check unexpectedly holds"};
  }

  FailingObligation explain_inv(Term p, Term q) {
    for (const Summand& m : q.summands()) {
      bool matched = false;
      for (const Summand& s : p.summands())
        if (s.action == m.action && inv(s.target, m.target)) {
          matched = true;
          break;
        }
      if (!matched)
        return {p, q,
                "the right term's move " + move_text(m) + " is simulated by no '" +
                    ActionRegistry::instance().name(m.action) +
                    "'-move of the left term"};
    }
    return {p, q, "the check unexpectedly holds"};
  }

  FailingObligation explain_ready_sets(Term p, Term q) {
    for (ActionId a : initials(p))
      if (!offers(q, a))
        return {p, q,
                "only the left term offers '" + ActionRegistry::instance().name(a) +
                    "', so the ready sets differ"};
    for (ActionId a : initials(q))
      if (!offers(p, a))
        return {p, q,
                "only the right term offers '" + ActionRegistry::instance().name(a) +
                    "', so the ready sets differ"};
    return {p, q, "the check unexpectedly holds"};
  }

  FailingObligation explain_rs(Term p, Term q) {
    if (!initials_equal(p, q)) return explain_ready_sets(p, q);
    for (const Summand& m : p.summands()) {
      bool matched = false;
      for (const Summand& s : q.summands())
        if (s.action == m.action && rs(m.target, s.target)) {
          matched = true;
          break;
        }
      if (!matched)
        return {p, q,
                "the left term's move " + move_text(m) +
                    " is ready-simulated by no '" +
                    ActionRegistry::instance().name(m.action) +
                    "'-move of the right term"};
    }
    return {p, q, "the check unexpectedly holds"};
  }

  FailingObligation explain_rcs(Term p, Term q) {
    if (!initials_equal(p, q)) return explain_ready_sets(p, q);
    for (const Summand& m : q.summands()) {
      bool matched = false;
      for (const Summand& s : p.summands())
        if (s.action == m.action && rcs(s.target, m.target)) {
          matched = true;
          break;
        }
      if (!matched)
        return {p, q,
                "the right term's move " + move_text(m) +
                    " is matched by no '" + ActionRegistry::instance().name(m.action) +
                    "'-move of the left term with equal ready sets downstream"};
    }
    return {p, q, "the check unexpectedly holds"};
  }

  const Alphabet& alphabet_;
  std::unordered_map<std::uint64_t, bool> cc_memo_, cs_memo_, sim_memo_, inv_memo_,
      rs_memo_, rcs_memo_;
};

void validate_term(Term t, const Alphabet& alphabet, std::unordered_set<TermId>& seen) {
  if (!seen.insert(t.id()).second) return;
  for (const Summand& s : t.summands()) {
    if (!alphabet.contains(s.action))
      throw std::invalid_argument("term uses action '" +
                                  ActionRegistry::instance().name(s.action) +
                                  "' which the alphabet does not declare");
    validate_term(s.target, alphabet, seen);
  }
}

}  // namespace

Judgement check_relation(RelationKind kind, Term lhs, Term rhs, const Alphabet& alphabet) {
  std::unordered_set<TermId> seen;
  validate_term(lhs, alphabet, seen);
  validate_term(rhs, alphabet, seen);
  Checker checker(alphabet);
  Judgement j;
  j.kind = kind;
  j.lhs = lhs;
  j.rhs = rhs;
  j.verdict = checker.holds(kind, lhs, rhs);
  j.witness = checker.collect_witness(kind, lhs, rhs);
  if (!j.verdict) j.failure = checker.explain(kind, lhs, rhs);
  return j;
}

bool relation_holds(RelationKind kind, Term lhs, Term rhs, const Alphabet& alphabet) {
  Checker checker(alphabet);
  return checker.holds(kind, lhs, rhs);
}

struct RelationChecker::Impl {
  explicit Impl(Alphabet al) : alphabet(std::move(al)), checker(alphabet) {}
  Alphabet alphabet;
  Checker checker;
};

RelationChecker::RelationChecker(Alphabet alphabet)
    : impl_(std::make_unique<Impl>(std::move(alphabet))) {}
RelationChecker::~RelationChecker() = default;
RelationChecker::RelationChecker(RelationChecker&&) noexcept = default;
RelationChecker& RelationChecker::operator=(RelationChecker&&) noexcept = default;

bool RelationChecker::holds(RelationKind kind, Term lhs, Term rhs) {
  return impl_->checker.holds(kind, lhs, rhs);
}

const Alphabet& RelationChecker::alphabet() const { return impl_->alphabet; }

PolaritySplit split_by_polarity(Term t, const Alphabet& alphabet) {
  PolaritySplit out;
  for (const Summand& s : t.summands()) {
    std::optional<Polarity> pol = alphabet.polarity(s.action);
    if (!pol)
      throw std::invalid_argument("term uses action '" +
                                  ActionRegistry::instance().name(s.action) +
                                  "' which the alphabet does not declare");
    switch (*pol) {
      case Polarity::covariant: out.covariant.push_back(s); break;
      case Polarity::contravariant: out.contravariant.push_back(s); break;
      case Polarity::bivariant: out.bivariant.push_back(s); break;
    }
  }
  return out;
}

}  // namespace ccsim
