#include "ccsim/axioms.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <stdexcept>

#include "ccsim/parser.hpp"  // ParseError doubles as the axiom-format error

namespace ccsim {

// ── Pattern construction ────────────────────────────────────────────────────

ActionSlot ActionSlot::lit(ActionId a) {
  ActionSlot s;
  s.binding = Binding::concrete;
  s.action = a;
  return s;
}

ActionSlot ActionSlot::meta(std::string name, Constraint c) {
  ActionSlot s;
  s.binding = Binding::meta;
  s.name = std::move(name);
  s.constraint = c;
  return s;
}

PatternPtr Pattern::zero() { return std::make_shared<const Pattern>(); }

PatternPtr Pattern::var(std::string name) {
  Pattern p;
  PatternItem it;
  it.kind = PatternItem::Kind::variable;
  it.var = std::move(name);
  p.items.push_back(std::move(it));
  return std::make_shared<const Pattern>(std::move(p));
}

PatternPtr Pattern::pre(ActionSlot slot, PatternPtr target) {
  Pattern p;
  PatternItem it;
  it.kind = PatternItem::Kind::prefixed;
  it.slot = std::move(slot);
  it.target = std::move(target);
  p.items.push_back(std::move(it));
  return std::make_shared<const Pattern>(std::move(p));
}

PatternPtr Pattern::sum(std::initializer_list<PatternPtr> parts) {
  Pattern p;
  for (const PatternPtr& part : parts)
    p.items.insert(p.items.end(), part->items.begin(), part->items.end());
  return std::make_shared<const Pattern>(std::move(p));
}

// ── Printing ────────────────────────────────────────────────────────────────

namespace {

std::string slot_text(const ActionSlot& s) {
  return s.binding == ActionSlot::Binding::concrete
             ? ActionRegistry::instance().name(s.action)
             : s.name;
}

const char* constraint_text(ActionSlot::Constraint c) {
  switch (c) {
    case ActionSlot::Constraint::any: return "any";
    case ActionSlot::Constraint::covariant: return "r";
    case ActionSlot::Constraint::contravariant: return "l";
    case ActionSlot::Constraint::bivariant: return "bi";
  }
  return "?";
}

void render_pattern(const Pattern& p, std::string& out) {
  if (p.items.empty()) {
    out += '0';
    return;
  }
  bool first = true;
  for (const PatternItem& it : p.items) {
    if (!first) out += " + ";
    first = false;
    if (it.kind == PatternItem::Kind::variable) {
      out += it.var;
      continue;
    }
    out += slot_text(it.slot);
    out += '.';
    const bool parens = it.target->items.size() > 1;
    if (parens) out += '(';
    render_pattern(*it.target, out);
    if (parens) out += ')';
  }
}

void collect_names(const Pattern& p, std::set<std::string>* vars,
                   std::map<std::string, std::vector<ActionSlot::Constraint>>* slots) {
  for (const PatternItem& it : p.items) {
    if (it.kind == PatternItem::Kind::variable) {
      if (vars) vars->insert(it.var);
      continue;
    }
    if (it.slot.binding == ActionSlot::Binding::meta && slots)
      (*slots)[it.slot.name].push_back(it.slot.constraint);
    collect_names(*it.target, vars, slots);
  }
}

std::string condition_text(const SideCondition& sc) {
  switch (sc.kind) {
    case SideCondition::Kind::disjoint_initials:
      return "disjoint(" + sc.var_a + ", " + sc.var_b + ")";
    case SideCondition::Kind::initials_subset:
      return "subset(" + sc.var_a + ", " + sc.var_b + ")";
    case SideCondition::Kind::initials_in_class: {
      const char* cls = sc.cls == Polarity::covariant      ? "r"
                        : sc.cls == Polarity::contravariant ? "l"
                                                            : "bi";
      return "initials(" + sc.var_a + ") in " + cls;
    }
  }
  return "?";
}

// the "name: lhs REL rhs if conditions" part, shared by the schema printer
// and the set renderer (which must not emit the constraint suffix)
std::string schema_statement_text(const AxiomSchema& s) {
  std::string out = s.name + ": " + to_text(*s.lhs) +
                    (s.kind == SchemaKind::equation ? " = " : " <= ") + to_text(*s.rhs);
  if (!s.side.empty()) {
    out += " if ";
    for (std::size_t i = 0; i < s.side.size(); ++i) {
      if (i) out += ", ";
      out += condition_text(s.side[i]);
    }
  }
  return out;
}

}  // namespace

std::string to_text(const Pattern& p) {
  std::string out;
  render_pattern(p, out);
  return out;
}

std::vector<std::string> AxiomSchema::term_vars() const {
  std::set<std::string> names;
  collect_names(*lhs, &names, nullptr);
  collect_names(*rhs, &names, nullptr);
  return {names.begin(), names.end()};
}

std::vector<std::string> AxiomSchema::slot_names() const {
  std::map<std::string, std::vector<ActionSlot::Constraint>> slots;
  collect_names(*lhs, nullptr, &slots);
  collect_names(*rhs, nullptr, &slots);
  std::vector<std::string> out;
  for (const auto& [name, cons] : slots) out.push_back(name);
  return out;
}

std::string to_text(const AxiomSchema& s) {
  std::string out = schema_statement_text(s);
  std::map<std::string, std::vector<ActionSlot::Constraint>> slots;
  collect_names(*s.lhs, nullptr, &slots);
  collect_names(*s.rhs, nullptr, &slots);
  std::string cons;
  for (const auto& [name, occurrences] : slots)
    for (ActionSlot::Constraint c : occurrences)
      if (c != ActionSlot::Constraint::any) {
        if (!cons.empty()) cons += ", ";
        cons += name + ":" + constraint_text(c);
        break;  // one mention per slot
      }
  if (!cons.empty()) out += "  [" + cons + "]";
  return out;
}

std::string to_text(const AxiomSet& set) {
  std::string out = "set " + set.name + " for " + to_string(set.target) + "\n";
  std::set<std::string> vars;
  for (const AxiomSchema& s : set.schemas)
    for (const std::string& v : s.term_vars()) vars.insert(v);
  if (!vars.empty()) {
    out += "vars";
    for (const std::string& v : vars) out += " " + v;
    out += "\n";
  }
  std::map<std::string, ActionSlot::Constraint> env;
  for (const AxiomSchema& s : set.schemas) {
    std::map<std::string, std::vector<ActionSlot::Constraint>> occ;
    collect_names(*s.lhs, nullptr, &occ);
    collect_names(*s.rhs, nullptr, &occ);
    std::string decl;
    for (const auto& [name, constraints] : occ) {
      for (ActionSlot::Constraint c : constraints)
        if (c != constraints.front())
          throw std::invalid_argument("slot '" + name + "' of '" + s.name +
                                      "' mixes polarity constraints");
      const ActionSlot::Constraint c = constraints.front();
      auto it = env.find(name);
      if (it == env.end() || it->second != c) {
        decl += " " + name + ":" + constraint_text(c);
        env[name] = c;
      }
    }
    if (!decl.empty()) out += "actions" + decl + "\n";
    out += "axiom " + schema_statement_text(s) + "\n";
  }
  return out;
}

const AxiomSchema* AxiomSet::find(std::string_view schema_name) const {
  for (const AxiomSchema& s : schemas)
    if (s.name == schema_name) return &s;
  return nullptr;
}

// ── Builtin systems ─────────────────────────────────────────────────────────

namespace {

using C = ActionSlot::Constraint;

std::vector<AxiomSchema> sum_laws() {
  auto x = Pattern::var("x");
  auto y = Pattern::var("y");
  auto z = Pattern::var("z");
  std::vector<AxiomSchema> laws;
  laws.push_back({"B1", SchemaKind::equation, Pattern::sum({x, y}), Pattern::sum({y, x}), {}});
  laws.push_back({"B2", SchemaKind::equation, Pattern::sum({Pattern::sum({x, y}), z}),
                  Pattern::sum({x, Pattern::sum({y, z})}), {}});
  laws.push_back({"B3", SchemaKind::equation, Pattern::sum({x, x}), x, {}});
  laws.push_back({"B4", SchemaKind::equation, Pattern::sum({x, Pattern::zero()}), x, {}});
  return laws;
}

std::shared_ptr<const AxiomSet> make_set(std::string name, RelationKind target,
                                         std::vector<AxiomSchema> extra) {
  auto set = std::make_shared<AxiomSet>();
  set->name = std::move(name);
  set->target = target;
  set->schemas = sum_laws();
  for (AxiomSchema& s : extra) set->schemas.push_back(std::move(s));
  return set;
}

std::shared_ptr<const AxiomSet> build_cc_preorder() {
  auto x = Pattern::var("x");
  auto y = Pattern::var("y");
  std::vector<AxiomSchema> extra;
  extra.push_back({"Sr_p", SchemaKind::inequation, x,
                   Pattern::sum({x, Pattern::pre(ActionSlot::meta("a", C::covariant), y)}),
                   {}});
  extra.push_back({"Sl_p", SchemaKind::inequation,
                   Pattern::sum({x, Pattern::pre(ActionSlot::meta("a", C::contravariant), y)}),
                   x,
                   {}});
  return make_set("cc_preorder", RelationKind::cc_sim, std::move(extra));
}

std::shared_ptr<const AxiomSet> build_cc_equivalence() {
  auto x = Pattern::var("x");
  auto y = Pattern::var("y");
  auto inner = [&](C b_cls) {  // x + b.y
    return Pattern::sum({x, Pattern::pre(ActionSlot::meta("b", b_cls), y)});
  };
  auto wide = [&](C a_cls, C b_cls) {  // a.(x + b.y)
    return Pattern::pre(ActionSlot::meta("a", a_cls), inner(b_cls));
  };
  auto narrow = [&](C a_cls) {  // a.x
    return Pattern::pre(ActionSlot::meta("a", a_cls), x);
  };
  std::vector<AxiomSchema> extra;
  extra.push_back({"S1", SchemaKind::equation, wide(C::covariant, C::covariant),
                   Pattern::sum({wide(C::covariant, C::covariant), narrow(C::covariant)}),
                   {}});
  extra.push_back({"S2", SchemaKind::equation, narrow(C::covariant),
                   Pattern::sum({narrow(C::covariant), wide(C::covariant, C::contravariant)}),
                   {}});
  extra.push_back({"S3", SchemaKind::equation, narrow(C::contravariant),
                   Pattern::sum({narrow(C::contravariant), wide(C::contravariant, C::covariant)}),
                   {}});
  extra.push_back({"S4", SchemaKind::equation, wide(C::contravariant, C::contravariant),
                   Pattern::sum({wide(C::contravariant, C::contravariant), narrow(C::contravariant)}),
                   {}});
  return make_set("cc_equivalence", RelationKind::cc_equiv, std::move(extra));
}

std::shared_ptr<const AxiomSet> build_cs_precongruence() {
  auto p = Pattern::var("p");
  auto q = Pattern::var("q");
  auto a = [] { return ActionSlot::meta("a", C::any); };
  std::vector<AxiomSchema> extra;
  extra.push_back({"SCS_g", SchemaKind::inequation, Pattern::pre(a(), p),
                   Pattern::pre(a(), Pattern::sum({p, q})),
                   {{SideCondition::Kind::disjoint_initials, "p", "q", Polarity::covariant}}});
  extra.push_back({"SCSinv_p", SchemaKind::inequation,
                   Pattern::sum({Pattern::pre(a(), p), Pattern::pre(a(), q)}),
                   Pattern::pre(a(), p),
                   {}});
  return make_set("cs_precongruence", RelationKind::conf_precong, std::move(extra));
}

std::shared_ptr<const AxiomSet> build_cs_equivalence() {
  auto p = Pattern::var("p");
  auto q = Pattern::var("q");
  auto a = [] { return ActionSlot::meta("a", C::any); };
  std::vector<AxiomSchema> extra;
  extra.push_back({"SCS_eq", SchemaKind::equation, Pattern::pre(a(), p),
                   Pattern::sum({Pattern::pre(a(), p), Pattern::pre(a(), Pattern::sum({p, q}))}),
                   {{SideCondition::Kind::disjoint_initials, "p", "q", Polarity::covariant}}});
  extra.push_back({"SCSinv_eq", SchemaKind::equation,
                   Pattern::pre(a(), Pattern::sum({p, q})),
                   Pattern::sum({Pattern::pre(a(), Pattern::sum({p, q})), Pattern::pre(a(), p)}),
                   {{SideCondition::Kind::initials_subset, "q", "p", Polarity::covariant}}});
  return make_set("cs_equivalence", RelationKind::conf_equiv, std::move(extra));
}

const std::vector<std::shared_ptr<const AxiomSet>>& builtin_sets() {
  static const std::vector<std::shared_ptr<const AxiomSet>> sets = {
      build_cc_preorder(),
      build_cc_equivalence(),
      build_cs_precongruence(),
      build_cs_equivalence(),
  };
  return sets;
}

}  // namespace

std::shared_ptr<const AxiomSet> builtin_axiom_set(std::string_view name) {
  for (const auto& set : builtin_sets())
    if (set->name == name) return set;
  return nullptr;
}

const std::vector<std::string>& builtin_axiom_set_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& set : builtin_sets()) out.push_back(set->name);
    return out;
  }();
  return names;
}

// ── Instantiation and admissibility ─────────────────────────────────────────

Term instantiate(const Pattern& pattern, const Substitution& subst) {
  Term acc = Term::nil();
  for (const PatternItem& it : pattern.items) {
    if (it.kind == PatternItem::Kind::variable) {
      auto f = subst.vars.find(it.var);
      if (f == subst.vars.end())
        throw std::invalid_argument("unbound term variable '" + it.var + "'");
      acc = add(acc, f->second);
      continue;
    }
    ActionId a;
    if (it.slot.binding == ActionSlot::Binding::concrete) {
      a = it.slot.action;
    } else {
      auto f = subst.slots.find(it.slot.name);
      if (f == subst.slots.end())
        throw std::invalid_argument("unbound action slot '" + it.slot.name + "'");
      a = f->second;
    }
    acc = add(acc, prefix(a, instantiate(*it.target, subst)));
  }
  return acc;
}

namespace {

bool constraint_ok(ActionSlot::Constraint c, Polarity pol) {
  switch (c) {
    case ActionSlot::Constraint::any: return true;
    case ActionSlot::Constraint::covariant: return pol == Polarity::covariant;
    case ActionSlot::Constraint::contravariant: return pol == Polarity::contravariant;
    case ActionSlot::Constraint::bivariant: return pol == Polarity::bivariant;
  }
  return false;
}

}  // namespace

bool substitution_admissible(const AxiomSchema& schema, const Substitution& subst,
                             const Alphabet& alphabet) {
  std::map<std::string, std::vector<ActionSlot::Constraint>> slots;
  collect_names(*schema.lhs, nullptr, &slots);
  collect_names(*schema.rhs, nullptr, &slots);
  for (const auto& [name, action] : subst.slots) {
    const std::optional<Polarity> pol = alphabet.polarity(action);
    if (!pol) return false;
    auto it = slots.find(name);
    if (it == slots.end()) continue;  // stray binding; harmless
    for (ActionSlot::Constraint c : it->second)
      if (!constraint_ok(c, *pol)) return false;
  }
  for (const SideCondition& sc : schema.side) {
    auto a = subst.vars.find(sc.var_a);
    auto b = subst.vars.find(sc.var_b);
    switch (sc.kind) {
      case SideCondition::Kind::disjoint_initials:
        if (a != subst.vars.end() && b != subst.vars.end() &&
            !initials_disjoint(a->second, b->second))
          return false;
        break;
      case SideCondition::Kind::initials_subset:
        if (a != subst.vars.end() && b != subst.vars.end() &&
            !initials_subset(a->second, b->second))
          return false;
        break;
      case SideCondition::Kind::initials_in_class:
        if (a != subst.vars.end())
          for (ActionId i : initials(a->second)) {
            const std::optional<Polarity> pol = alphabet.polarity(i);
            if (!pol || *pol != sc.cls) return false;
          }
        break;
    }
  }
  return true;
}

// ── Positions ───────────────────────────────────────────────────────────────

namespace {

void collect_positions(Term t, Position& cur, std::vector<Position>& out) {
  out.push_back(cur);
  const std::vector<Summand>& sums = t.summands();
  for (std::size_t i = 0; i < sums.size(); ++i) {
    cur.push_back(i);
    collect_positions(sums[i].target, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<Position> positions(Term t) {
  std::vector<Position> out;
  Position cur;
  collect_positions(t, cur, out);
  return out;
}

Term subterm_at(Term t, const Position& pos) {
  Term cur = t;
  for (std::size_t index : pos) {
    const std::vector<Summand>& sums = cur.summands();
    if (index >= sums.size())
      throw std::out_of_range("position leaves the term (index " +
                              std::to_string(index) + " of a width-" +
                              std::to_string(sums.size()) + " sum)");
    cur = sums[index].target;
  }
  return cur;
}

Term replace_at(Term t, const Position& pos, Term replacement) {
  if (pos.empty()) return replacement;
  std::vector<Summand> sums = t.summands();
  const std::size_t index = pos.front();
  if (index >= sums.size())
    throw std::out_of_range("position leaves the term (index " + std::to_string(index) +
                            " of a width-" + std::to_string(sums.size()) + " sum)");
  Position rest(pos.begin() + 1, pos.end());
  sums[index].target = replace_at(sums[index].target, rest, replacement);
  return make_term(std::move(sums));
}

// ── Matching ────────────────────────────────────────────────────────────────

namespace {

using Sink = std::function<void(const Substitution&)>;

class Matcher {
 public:
  Matcher(const AxiomSchema& schema, const Alphabet& alphabet, const MatchOptions& options)
      : schema_(schema), alphabet_(alphabet), options_(options) {
    if (options_.max_width > 16)
      throw std::invalid_argument("match width caps above 16 are not supported");
  }

  std::vector<Substitution> run(const Pattern& pattern, Term t) {
    std::vector<Substitution> out;
    match(pattern, t, Substitution{}, [&](const Substitution& s) {
      if (!substitution_admissible(schema_, s, alphabet_)) return;
      if (instantiate(pattern, s) != t) return;  // safety net
      if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
    });
    return out;
  }

 private:
  void match(const Pattern& pattern, Term t, const Substitution& sigma, const Sink& sink) {
    const std::vector<Summand>& sums = t.summands();
    if (sums.size() > options_.max_width)
      throw std::length_error("matching against a sum of width " +
                              std::to_string(sums.size()) + " exceeds the cap of " +
                              std::to_string(options_.max_width));
    std::vector<const PatternItem*> prefixed, variables;
    for (const PatternItem& it : pattern.items)
      (it.kind == PatternItem::Kind::prefixed ? prefixed : variables).push_back(&it);
    place_prefixed(prefixed, 0, variables, sums, 0u, sigma, sink);
  }

  void place_prefixed(const std::vector<const PatternItem*>& prefixed, std::size_t k,
                      const std::vector<const PatternItem*>& variables,
                      const std::vector<Summand>& sums, unsigned covered,
                      const Substitution& sigma, const Sink& sink) {
    if (k == prefixed.size()) {
      place_variables(variables, 0, sums, covered, sigma, sink);
      return;
    }
    const PatternItem& item = *prefixed[k];
    for (std::size_t j = 0; j < sums.size(); ++j) {
      Substitution next = sigma;
      if (!bind_slot(item.slot, sums[j].action, next)) continue;
      match(*item.target, sums[j].target, next, [&, j](const Substitution& deeper) {
        place_prefixed(prefixed, k + 1, variables, sums, covered | (1u << j), deeper, sink);
      });
    }
  }

  void place_variables(const std::vector<const PatternItem*>& variables, std::size_t k,
                       const std::vector<Summand>& sums, unsigned covered,
                       const Substitution& sigma, const Sink& sink) {
    if (k == variables.size()) {
      const unsigned all = (1u << sums.size()) - 1u;
      if (covered == all) sink(sigma);
      return;
    }
    const std::string& name = variables[k]->var;
    auto bound = sigma.vars.find(name);
    if (bound != sigma.vars.end()) {
      unsigned mask = 0;
      for (const Summand& vs : bound->second.summands()) {
        bool found = false;
        for (std::size_t j = 0; j < sums.size(); ++j)
          if (sums[j] == vs) {
            mask |= 1u << j;
            found = true;
            break;
          }
        if (!found) return;  // the bound value is not a sub-sum here
      }
      place_variables(variables, k + 1, sums, covered | mask, sigma, sink);
      return;
    }
    for (unsigned mask = 0; mask < (1u << sums.size()); ++mask) {
      std::vector<Summand> chosen;
      for (std::size_t j = 0; j < sums.size(); ++j)
        if (mask & (1u << j)) chosen.push_back(sums[j]);
      Substitution next = sigma;
      next.vars.emplace(name, make_term(std::move(chosen)));
      place_variables(variables, k + 1, sums, covered | mask, next, sink);
    }
  }

  bool bind_slot(const ActionSlot& slot, ActionId action, Substitution& sigma) const {
    if (slot.binding == ActionSlot::Binding::concrete) return slot.action == action;
    auto it = sigma.slots.find(slot.name);
    if (it != sigma.slots.end()) return it->second == action;
    const std::optional<Polarity> pol = alphabet_.polarity(action);
    if (!pol || !constraint_ok(slot.constraint, *pol)) return false;
    sigma.slots.emplace(slot.name, action);
    return true;
  }

  const AxiomSchema& schema_;
  const Alphabet& alphabet_;
  MatchOptions options_;
};

}  // namespace

std::vector<Substitution> match_at(const AxiomSchema& schema, Term t, const Position& pos,
                                   const Alphabet& alphabet, RewriteDirection direction,
                                   const MatchOptions& options) {
  const Term sub = subterm_at(t, pos);
  const Pattern& pattern =
      direction == RewriteDirection::forward ? *schema.lhs : *schema.rhs;
  Matcher matcher(schema, alphabet, options);
  return matcher.run(pattern, sub);
}

Term apply_at(const AxiomSchema& schema, Term t, const Position& pos,
              const Substitution& subst, const Alphabet& alphabet,
              RewriteDirection direction) {
  for (const std::string& name : schema.term_vars())
    if (!subst.vars.count(name))
      throw std::invalid_argument("substitution leaves term variable '" + name +
                                  "' unbound");
  for (const std::string& name : schema.slot_names())
    if (!subst.slots.count(name))
      throw std::invalid_argument("substitution leaves action slot '" + name +
                                  "' unbound");
  if (!substitution_admissible(schema, subst, alphabet))
    throw std::invalid_argument("substitution violates the schema's constraints");
  const Pattern& from = direction == RewriteDirection::forward ? *schema.lhs : *schema.rhs;
  const Pattern& to = direction == RewriteDirection::forward ? *schema.rhs : *schema.lhs;
  const Term sub = subterm_at(t, pos);
  if (instantiate(from, subst) != sub)
    throw std::invalid_argument(
        "the instantiated source side does not equal the subterm at the position");
  return replace_at(t, pos, instantiate(to, subst));
}

// ── The plain-text axiom set format ─────────────────────────────────────────

namespace {

struct AxiomFormatParser {
  std::set<std::string> var_names;
  std::map<std::string, ActionSlot::Constraint> slot_decls;
  int line_no = 0;

  [[noreturn]] void fail(const std::string& message, int column = 1) const {
    throw ParseError(message, line_no, column);
  }

  static std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
  }

  static std::vector<std::string> words(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
  }

  std::optional<ActionSlot::Constraint> constraint_of(std::string_view s) const {
    if (s == "any") return ActionSlot::Constraint::any;
    if (s == "r") return ActionSlot::Constraint::covariant;
    if (s == "l") return ActionSlot::Constraint::contravariant;
    if (s == "bi") return ActionSlot::Constraint::bivariant;
    return std::nullopt;
  }

  // pexpr := patom ('+' patom)* ; patom := '0' | '(' pexpr ')' | NAME ['.' patom]
  PatternPtr parse_pattern(std::string_view text) {
    std::size_t pos = 0;
    PatternPtr p = parse_pexpr(text, pos);
    skip_space(text, pos);
    if (pos != text.size()) fail("trailing input after the pattern", static_cast<int>(pos) + 1);
    return p;
  }

  static void skip_space(std::string_view s, std::size_t& pos) {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

  PatternPtr parse_pexpr(std::string_view s, std::size_t& pos) {
    Pattern acc;
    auto append = [&acc](const PatternPtr& part) {
      acc.items.insert(acc.items.end(), part->items.begin(), part->items.end());
    };
    append(parse_patom(s, pos));
    for (;;) {
      skip_space(s, pos);
      if (pos >= s.size() || s[pos] != '+') break;
      ++pos;
      append(parse_patom(s, pos));
    }
    return std::make_shared<const Pattern>(std::move(acc));
  }

  PatternPtr parse_patom(std::string_view s, std::size_t& pos) {
    skip_space(s, pos);
    if (pos >= s.size()) fail("expected a pattern", static_cast<int>(pos) + 1);
    if (s[pos] == '0') {
      ++pos;
      return Pattern::zero();
    }
    if (s[pos] == '(') {
      ++pos;
      PatternPtr inner = parse_pexpr(s, pos);
      skip_space(s, pos);
      if (pos >= s.size() || s[pos] != ')') fail("expected ')'", static_cast<int>(pos) + 1);
      ++pos;
      return inner;
    }
    const std::size_t start = pos;
    while (pos < s.size() &&
           (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
      ++pos;
    if (pos == start) fail("expected a pattern", static_cast<int>(pos) + 1);
    const std::string name(s.substr(start, pos - start));
    if (var_names.count(name)) {
      skip_space(s, pos);
      if (pos < s.size() && s[pos] == '.')
        fail("'" + name + "' is a term variable and cannot be used as a prefix",
             static_cast<int>(pos) + 1);
      return Pattern::var(name);
    }
    auto slot = slot_decls.find(name);
    if (slot == slot_decls.end())
      fail("undeclared name '" + name + "' (declare it under vars or actions)",
           static_cast<int>(start) + 1);
    skip_space(s, pos);
    if (pos >= s.size() || s[pos] != '.')
      fail("action '" + name + "' needs a '.' and a target pattern",
           static_cast<int>(pos) + 1);
    ++pos;
    PatternPtr target = parse_patom(s, pos);
    return Pattern::pre(ActionSlot::meta(name, slot->second), target);
  }

  SideCondition parse_condition(std::string_view raw) {
    const std::string text = trim(raw);
    auto parse_args = [&](std::string_view inner) {
      std::vector<std::string> args;
      std::size_t from = 0;
      while (from <= inner.size()) {
        std::size_t comma = inner.find(',', from);
        if (comma == std::string_view::npos) comma = inner.size();
        args.push_back(trim(inner.substr(from, comma - from)));
        from = comma + 1;
      }
      return args;
    };
    auto check_var = [&](const std::string& v) {
      if (!var_names.count(v)) fail("condition mentions undeclared variable '" + v + "'");
      return v;
    };
    const std::size_t open = text.find('(');
    const std::size_t close = text.find(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
      fail("cannot read side condition '" + text + "'");
    const std::string head = trim(text.substr(0, open));
    const std::vector<std::string> args = parse_args(
        std::string_view(text).substr(open + 1, close - open - 1));
    const std::string tail = trim(text.substr(close + 1));
    if (head == "disjoint" && args.size() == 2 && tail.empty())
      return {SideCondition::Kind::disjoint_initials, check_var(args[0]),
              check_var(args[1]), Polarity::covariant};
    if (head == "subset" && args.size() == 2 && tail.empty())
      return {SideCondition::Kind::initials_subset, check_var(args[0]),
              check_var(args[1]), Polarity::covariant};
    if (head == "initials" && args.size() == 1 && tail.rfind("in ", 0) == 0) {
      const std::string cls = trim(tail.substr(3));
      Polarity pol;
      if (cls == "r")
        pol = Polarity::covariant;
      else if (cls == "l")
        pol = Polarity::contravariant;
      else if (cls == "bi")
        pol = Polarity::bivariant;
      else
        fail("unknown polarity class '" + cls + "' in side condition");
      return {SideCondition::Kind::initials_in_class, check_var(args[0]), "", pol};
    }
    fail("cannot read side condition '" + text + "'");
  }
};

}  // namespace

std::shared_ptr<const AxiomSet> parse_axiom_set(std::string_view text) {
  AxiomFormatParser ctx;
  auto set = std::make_shared<AxiomSet>();
  bool have_set_line = false;

  std::size_t from = 0;
  while (from <= text.size()) {
    std::size_t nl = text.find('\n', from);
    if (nl == std::string_view::npos) nl = text.size();
    std::string line(text.substr(from, nl - from));
    from = nl + 1;
    ++ctx.line_no;
    if (std::size_t hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = AxiomFormatParser::trim(line);
    if (line.empty()) continue;

    const std::size_t space = line.find_first_of(" \t");
    const std::string directive = line.substr(0, space);
    const std::string rest =
        space == std::string::npos ? "" : AxiomFormatParser::trim(line.substr(space + 1));

    if (directive == "set") {
      const std::vector<std::string> parts = AxiomFormatParser::words(rest);
      if (parts.size() != 3 || parts[1] != "for")
        ctx.fail("expected: set NAME for RELATION");
      std::optional<RelationKind> target = relation_from_string(parts[2]);
      if (!target) ctx.fail("unknown relation '" + parts[2] + "'");
      set->name = parts[0];
      set->target = *target;
      have_set_line = true;
      continue;
    }
    if (directive == "vars") {
      for (const std::string& v : AxiomFormatParser::words(rest)) ctx.var_names.insert(v);
      continue;
    }
    if (directive == "actions") {
      for (const std::string& decl : AxiomFormatParser::words(rest)) {
        const std::size_t colon = decl.find(':');
        if (colon == std::string::npos)
          ctx.fail("action declarations look like name:cls (cls one of r, l, bi, any)");
        const std::string name = decl.substr(0, colon);
        auto cls = ctx.constraint_of(decl.substr(colon + 1));
        if (name.empty() || !cls)
          ctx.fail("action declarations look like name:cls (cls one of r, l, bi, any)");
        ctx.slot_decls[name] = *cls;
      }
      continue;
    }
    if (directive == "axiom") {
      const std::size_t colon = rest.find(':');
      if (colon == std::string::npos) ctx.fail("expected: axiom NAME: LHS <= RHS");
      AxiomSchema schema;
      schema.name = AxiomFormatParser::trim(rest.substr(0, colon));
      if (schema.name.empty()) ctx.fail("the axiom needs a name");
      std::string body = AxiomFormatParser::trim(rest.substr(colon + 1));
      std::string conditions;
      if (std::size_t if_pos = body.find(" if "); if_pos != std::string::npos) {
        conditions = AxiomFormatParser::trim(body.substr(if_pos + 4));
        body = AxiomFormatParser::trim(body.substr(0, if_pos));
      }
      std::size_t rel_pos = body.find("<=");
      std::size_t rel_len = 2;
      schema.kind = SchemaKind::inequation;
      if (rel_pos == std::string::npos) {
        rel_pos = body.find('=');
        rel_len = 1;
        schema.kind = SchemaKind::equation;
      }
      if (rel_pos == std::string::npos) ctx.fail("the axiom body needs '<=' or '='");
      schema.lhs = ctx.parse_pattern(body.substr(0, rel_pos));
      schema.rhs = ctx.parse_pattern(body.substr(rel_pos + rel_len));
      if (!conditions.empty()) {
        // split on commas outside parentheses only
        std::size_t start = 0;
        int depth = 0;
        for (std::size_t i = 0; i <= conditions.size(); ++i) {
          if (i < conditions.size() && conditions[i] == '(') ++depth;
          if (i < conditions.size() && conditions[i] == ')') --depth;
          if (i == conditions.size() || (conditions[i] == ',' && depth == 0)) {
            schema.side.push_back(ctx.parse_condition(
                std::string_view(conditions).substr(start, i - start)));
            start = i + 1;
          }
        }
      }
      set->schemas.push_back(std::move(schema));
      continue;
    }
    ctx.fail("unknown directive '" + directive + "'");
  }
  if (!have_set_line)
    throw ParseError("an axiom file needs a 'set NAME for RELATION' line", 1, 1);
  return set;
}

}  // namespace ccsim
