#include "ccsim/proof.hpp"

#include <set>

#include <json.hpp>

#include "ccsim/parser.hpp"

namespace ccsim {

// ── Node construction ───────────────────────────────────────────────────────

ProofNodePtr ProofNode::refl(Term t) {
  auto n = std::make_shared<ProofNode>();
  n->rule = Rule::refl;
  n->term = t;
  return n;
}

ProofNodePtr ProofNode::axiom(std::string schema, Substitution subst,
                              RewriteDirection direction) {
  auto n = std::make_shared<ProofNode>();
  n->rule = Rule::axiom;
  n->schema = std::move(schema);
  n->subst = std::move(subst);
  n->direction = direction;
  return n;
}

ProofNodePtr ProofNode::trans(std::vector<ProofNodePtr> chain) {
  auto n = std::make_shared<ProofNode>();
  n->rule = Rule::trans;
  n->children = std::move(chain);
  return n;
}

ProofNodePtr ProofNode::sym(ProofNodePtr child) {
  auto n = std::make_shared<ProofNode>();
  n->rule = Rule::sym;
  n->children.push_back(std::move(child));
  return n;
}

ProofNodePtr ProofNode::cong_prefix(ActionId action, ProofNodePtr child) {
  auto n = std::make_shared<ProofNode>();
  n->rule = Rule::cong_prefix;
  n->action = action;
  n->children.push_back(std::move(child));
  return n;
}

ProofNodePtr ProofNode::cong_sum(Term remainder, ProofNodePtr child) {
  auto n = std::make_shared<ProofNode>();
  n->rule = Rule::cong_sum;
  n->remainder = remainder;
  n->children.push_back(std::move(child));
  return n;
}

// ── Verification ────────────────────────────────────────────────────────────

namespace {

void validate_actions(Term t, const Alphabet& alphabet, std::set<TermId>& seen) {
  if (!seen.insert(t.id()).second) return;
  for (const Summand& s : t.summands()) {
    if (!alphabet.polarity(s.action))
      throw ProofError("the derivation mentions the undeclared action '" +
                       ActionRegistry::instance().name(s.action) + "'");
    validate_actions(s.target, alphabet, seen);
  }
}

struct Verifier {
  const AxiomSet& axioms;
  const Alphabet& alphabet;
  VerifyCache& cache;
  std::set<TermId> checked_terms;

  const Statement& check(const ProofNodePtr& node) {
    if (!node) throw ProofError("missing derivation step");
    auto it = cache.statements.find(node.get());
    if (it != cache.statements.end()) return it->second;
    Statement st = derive(*node);
    return cache.statements.emplace(node.get(), std::move(st)).first->second;
  }

  Statement derive(const ProofNode& n) {
    switch (n.rule) {
      case ProofNode::Rule::refl:
        validate_actions(n.term, alphabet, checked_terms);
        return {SchemaKind::equation, n.term, n.term};

      case ProofNode::Rule::axiom: {
        const AxiomSchema* schema = axioms.find(n.schema);
        if (!schema)
          throw ProofError("the axiom system '" + axioms.name +
                           "' has no schema named '" + n.schema + "'");
        for (const std::string& v : schema->term_vars())
          if (!n.subst.vars.count(v))
            throw ProofError("axiom step '" + n.schema + "' leaves variable '" + v +
                             "' unbound");
        for (const std::string& s : schema->slot_names())
          if (!n.subst.slots.count(s))
            throw ProofError("axiom step '" + n.schema + "' leaves action slot '" + s +
                             "' unbound");
        if (!substitution_admissible(*schema, n.subst, alphabet))
          throw ProofError("axiom step '" + n.schema +
                           "' violates the schema's constraints");
        if (n.direction == RewriteDirection::backward &&
            schema->kind == SchemaKind::inequation)
          throw ProofError("inequational axiom '" + n.schema +
                           "' can only be used left to right");
        for (const auto& [name, value] : n.subst.vars)
          validate_actions(value, alphabet, checked_terms);
        Term l = instantiate(*schema->lhs, n.subst);
        Term r = instantiate(*schema->rhs, n.subst);
        if (n.direction == RewriteDirection::backward) std::swap(l, r);
        return {schema->kind, l, r};
      }

      case ProofNode::Rule::trans: {
        if (n.children.empty())
          throw ProofError("a transitivity step needs at least one link");
        Statement acc = check(n.children.front());
        for (std::size_t i = 1; i < n.children.size(); ++i) {
          const Statement& next = check(n.children[i]);
          if (acc.rhs != next.lhs)
            throw ProofError("transitivity chain breaks: a step ends at '" +
                             to_text(acc.rhs) + "' but the next starts from '" +
                             to_text(next.lhs) + "'");
          acc.rhs = next.rhs;
          if (next.kind == SchemaKind::inequation) acc.kind = SchemaKind::inequation;
        }
        return acc;
      }

      case ProofNode::Rule::sym: {
        if (n.children.size() != 1)
          throw ProofError("a symmetry step needs exactly one premise");
        const Statement& c = check(n.children.front());
        if (c.kind != SchemaKind::equation)
          throw ProofError("symmetry applies to equations only");
        return {SchemaKind::equation, c.rhs, c.lhs};
      }

      case ProofNode::Rule::cong_prefix: {
        if (n.children.size() != 1)
          throw ProofError("a prefix congruence step needs exactly one premise");
        if (!alphabet.polarity(n.action))
          throw ProofError("prefix congruence uses the undeclared action '" +
                           ActionRegistry::instance().name(n.action) + "'");
        const Statement& c = check(n.children.front());
        return {c.kind, prefix(n.action, c.lhs), prefix(n.action, c.rhs)};
      }

      case ProofNode::Rule::cong_sum: {
        if (n.children.size() != 1)
          throw ProofError("a sum congruence step needs exactly one premise");
        validate_actions(n.remainder, alphabet, checked_terms);
        const Statement& c = check(n.children.front());
        return {c.kind, add(c.lhs, n.remainder), add(c.rhs, n.remainder)};
      }
    }
    throw ProofError("corrupt derivation step");
  }
};

const char* rel_text(SchemaKind k) {
  return k == SchemaKind::equation ? " = " : " <= ";
}

}  // namespace

Statement verify_proof(const Proof& proof, VerifyCache& cache) {
  if (!proof.axioms) throw ProofError("the proof names no axiom system");
  if (!proof.root) throw ProofError("the proof has no derivation");
  const std::string alphabet_text = proof.alphabet.to_text();
  if (cache.axioms == nullptr) {
    cache.axioms = proof.axioms.get();
    cache.alphabet_text = alphabet_text;
  } else if (cache.axioms != proof.axioms.get() ||
             cache.alphabet_text != alphabet_text) {
    throw std::logic_error("a verification cache serves one axiom system and alphabet");
  }
  Verifier verifier{*proof.axioms, proof.alphabet, cache, {}};
  const Statement st = verifier.check(proof.root);
  if (st.lhs != proof.lhs || st.rhs != proof.rhs)
    throw ProofError("the derivation concludes '" + to_text(st.lhs) + rel_text(st.kind) +
                     to_text(st.rhs) + "' but the proof claims '" + to_text(proof.lhs) +
                     rel_text(proof.kind) + to_text(proof.rhs) + "'");
  if (proof.kind == SchemaKind::equation && st.kind == SchemaKind::inequation)
    throw ProofError("an inequational derivation cannot establish an equation");
  return st;
}

Statement verify_proof(const Proof& proof) {
  VerifyCache cache;
  return verify_proof(proof, cache);
}

// ── Traversal helpers ───────────────────────────────────────────────────────

namespace {

void topo_order(const ProofNodePtr& node, std::set<const ProofNode*>& seen,
                std::vector<const ProofNode*>& order) {
  if (!node || seen.count(node.get())) return;
  seen.insert(node.get());
  for (const ProofNodePtr& c : node->children) topo_order(c, seen, order);
  order.push_back(node.get());
}

std::vector<const ProofNode*> topo_order(const Proof& proof) {
  std::vector<const ProofNode*> order;
  std::set<const ProofNode*> seen;
  topo_order(proof.root, seen, order);
  return order;
}

}  // namespace

std::size_t count_axiom_steps(const Proof& proof) {
  std::size_t n = 0;
  for (const ProofNode* node : topo_order(proof))
    if (node->rule == ProofNode::Rule::axiom) ++n;
  return n;
}

std::map<std::string, std::size_t> axiom_step_counts(const Proof& proof) {
  std::map<std::string, std::size_t> counts;
  for (const ProofNode* node : topo_order(proof))
    if (node->rule == ProofNode::Rule::axiom) ++counts[node->schema];
  return counts;
}

// ── Text rendering ──────────────────────────────────────────────────────────

namespace {

std::string subst_text(const Substitution& s) {
  std::string out = "[";
  bool first = true;
  for (const auto& [name, value] : s.vars) {
    if (!first) out += ", ";
    first = false;
    out += name + " := " + to_text(value);
  }
  for (const auto& [name, action] : s.slots) {
    if (!first) out += ", ";
    first = false;
    out += name + " := " + ActionRegistry::instance().name(action);
  }
  return out + "]";
}

}  // namespace

std::string to_text(const Proof& proof) {
  VerifyCache cache;
  verify_proof(proof, cache);
  const std::vector<const ProofNode*> order = topo_order(proof);
  std::unordered_map<const ProofNode*, std::size_t> index;
  for (std::size_t i = 0; i < order.size(); ++i) index.emplace(order[i], i + 1);
  auto ref = [&](const ProofNodePtr& child) {
    return "(" + std::to_string(index.at(child.get())) + ")";
  };

  std::string out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const ProofNode& n = *order[i];
    const Statement& st = cache.statements.at(&n);
    out += "(" + std::to_string(i + 1) + ") " + to_text(st.lhs) + rel_text(st.kind) +
           to_text(st.rhs) + "\n      by ";
    switch (n.rule) {
      case ProofNode::Rule::refl:
        out += "reflexivity";
        break;
      case ProofNode::Rule::axiom:
        out += n.schema;
        if (n.direction == RewriteDirection::backward) out += " (right to left)";
        out += " " + subst_text(n.subst);
        break;
      case ProofNode::Rule::trans: {
        out += "the chain";
        for (const ProofNodePtr& c : n.children) out += " " + ref(c);
        break;
      }
      case ProofNode::Rule::sym:
        out += "symmetry of " + ref(n.children.front());
        break;
      case ProofNode::Rule::cong_prefix:
        out += "prefixing '" + ActionRegistry::instance().name(n.action) + "' onto " +
               ref(n.children.front());
        break;
      case ProofNode::Rule::cong_sum:
        out += "summing " + to_text(n.remainder) + " onto " + ref(n.children.front());
        break;
    }
    out += "\n";
  }
  out += "establishes " + to_text(proof.lhs) + rel_text(proof.kind) + to_text(proof.rhs) +
         "  [" + proof.axioms->name + "]\n";
  return out;
}

// ── JSON serialization ──────────────────────────────────────────────────────

std::string proof_to_json(const Proof& proof) {
  using nlohmann::ordered_json;
  if (!proof.axioms) throw std::invalid_argument("the proof names no axiom system");
  if (!proof.root) throw std::invalid_argument("the proof has no derivation");

  ordered_json j;
  j["format"] = "ccsim-proof";
  j["version"] = 1;
  j["kind"] = proof.kind == SchemaKind::equation ? "equation" : "inequation";
  j["lhs"] = to_text(proof.lhs);
  j["rhs"] = to_text(proof.rhs);
  j["alphabet"] = proof.alphabet.to_text();

  ordered_json ax;
  ax["name"] = proof.axioms->name;
  if (builtin_axiom_set(proof.axioms->name) == proof.axioms) {
    ax["builtin"] = true;
  } else {
    ax["builtin"] = false;
    ax["text"] = to_text(*proof.axioms);
  }
  j["axioms"] = ax;

  const std::vector<const ProofNode*> order = topo_order(proof);
  std::unordered_map<const ProofNode*, std::size_t> index;
  for (std::size_t i = 0; i < order.size(); ++i) index.emplace(order[i], i);
  auto ref = [&](const ProofNodePtr& child) { return index.at(child.get()); };

  ordered_json nodes = ordered_json::array();
  for (const ProofNode* n : order) {
    ordered_json e;
    switch (n->rule) {
      case ProofNode::Rule::refl:
        e["rule"] = "refl";
        e["term"] = to_text(n->term);
        break;
      case ProofNode::Rule::axiom: {
        e["rule"] = "axiom";
        e["schema"] = n->schema;
        e["direction"] =
            n->direction == RewriteDirection::forward ? "forward" : "backward";
        ordered_json vars = ordered_json::object();
        for (const auto& [name, value] : n->subst.vars) vars[name] = to_text(value);
        e["vars"] = vars;
        ordered_json slots = ordered_json::object();
        for (const auto& [name, action] : n->subst.slots)
          slots[name] = ActionRegistry::instance().name(action);
        e["slots"] = slots;
        break;
      }
      case ProofNode::Rule::trans: {
        e["rule"] = "trans";
        ordered_json children = ordered_json::array();
        for (const ProofNodePtr& c : n->children) children.push_back(ref(c));
        e["children"] = children;
        break;
      }
      case ProofNode::Rule::sym:
        e["rule"] = "sym";
        e["child"] = ref(n->children.front());
        break;
      case ProofNode::Rule::cong_prefix:
        e["rule"] = "cong_prefix";
        e["action"] = ActionRegistry::instance().name(n->action);
        e["child"] = ref(n->children.front());
        break;
      case ProofNode::Rule::cong_sum:
        e["rule"] = "cong_sum";
        e["remainder"] = to_text(n->remainder);
        e["child"] = ref(n->children.front());
        break;
    }
    nodes.push_back(std::move(e));
  }
  j["nodes"] = std::move(nodes);
  j["root"] = index.at(proof.root.get());
  return j.dump(2);
}

Proof proof_from_json(std::string_view text) {
  using nlohmann::ordered_json;
  const ordered_json j = ordered_json::parse(text);
  if (j.value("format", std::string()) != "ccsim-proof")
    throw std::invalid_argument("not a proof document");
  if (j.value("version", 0) != 1)
    throw std::invalid_argument("unsupported proof document version");

  Alphabet alphabet = parse_alphabet_spec(j.at("alphabet").get<std::string>());

  const ordered_json& ax = j.at("axioms");
  std::shared_ptr<const AxiomSet> axioms;
  if (ax.value("builtin", false)) {
    axioms = builtin_axiom_set(ax.at("name").get<std::string>());
    if (!axioms)
      throw std::invalid_argument("unknown built-in axiom system '" +
                                  ax.at("name").get<std::string>() + "'");
  } else {
    axioms = parse_axiom_set(ax.at("text").get<std::string>());
  }

  const std::string kind_text = j.at("kind").get<std::string>();
  if (kind_text != "equation" && kind_text != "inequation")
    throw std::invalid_argument("unknown claim kind '" + kind_text + "'");

  std::vector<ProofNodePtr> built;
  auto child_at = [&built](const ordered_json& v) -> ProofNodePtr {
    const std::size_t k = v.get<std::size_t>();
    if (k >= built.size())
      throw std::invalid_argument("a derivation step refers to a step after itself");
    return built[k];
  };

  for (const ordered_json& e : j.at("nodes")) {
    const std::string rule = e.at("rule").get<std::string>();
    if (rule == "refl") {
      built.push_back(
          ProofNode::refl(parse_term(e.at("term").get<std::string>(), alphabet)));
    } else if (rule == "axiom") {
      Substitution s;
      for (auto it = e.at("vars").begin(); it != e.at("vars").end(); ++it)
        s.vars.emplace(it.key(), parse_term(it.value().get<std::string>(), alphabet));
      for (auto it = e.at("slots").begin(); it != e.at("slots").end(); ++it)
        s.slots.emplace(it.key(),
                        ActionRegistry::instance().id_of(it.value().get<std::string>()));
      const std::string dir = e.at("direction").get<std::string>();
      if (dir != "forward" && dir != "backward")
        throw std::invalid_argument("unknown rewrite direction '" + dir + "'");
      built.push_back(ProofNode::axiom(
          e.at("schema").get<std::string>(), std::move(s),
          dir == "forward" ? RewriteDirection::forward : RewriteDirection::backward));
    } else if (rule == "trans") {
      std::vector<ProofNodePtr> chain;
      for (const ordered_json& c : e.at("children")) chain.push_back(child_at(c));
      built.push_back(ProofNode::trans(std::move(chain)));
    } else if (rule == "sym") {
      built.push_back(ProofNode::sym(child_at(e.at("child"))));
    } else if (rule == "cong_prefix") {
      built.push_back(ProofNode::cong_prefix(
          ActionRegistry::instance().id_of(e.at("action").get<std::string>()),
          child_at(e.at("child"))));
    } else if (rule == "cong_sum") {
      built.push_back(
          ProofNode::cong_sum(parse_term(e.at("remainder").get<std::string>(), alphabet),
                              child_at(e.at("child"))));
    } else {
      throw std::invalid_argument("unknown derivation rule '" + rule + "'");
    }
  }
  const std::size_t root = j.at("root").get<std::size_t>();
  if (root >= built.size())
    throw std::invalid_argument("the root index is out of range");

  const Term lhs = parse_term(j.at("lhs").get<std::string>(), alphabet);
  const Term rhs = parse_term(j.at("rhs").get<std::string>(), alphabet);
  return Proof{kind_text == "equation" ? SchemaKind::equation : SchemaKind::inequation,
               lhs,
               rhs,
               std::move(axioms),
               std::move(alphabet),
               built[root]};
}

}  // namespace ccsim
