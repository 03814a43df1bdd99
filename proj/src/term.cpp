#include "ccsim/term.hpp"

#include <algorithm>
#include <deque>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace ccsim {

namespace {

bool summand_less(const Summand& a, const Summand& b) {
  if (a.action != b.action) return action_name_less(a.action, b.action);
  return compare(a.target, b.target) < 0;
}

struct SummandVecHash {
  std::size_t operator()(const std::vector<Summand>& v) const noexcept {
    std::size_t h = v.size();
    auto mix = [&h](std::size_t k) {
      h ^= k + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    };
    for (const Summand& s : v) {
      mix(s.action);
      mix(s.target.id());
    }
    return h;
  }
};

// ── Intern table ────────────────────────────────────────────────────────────

// Canonical summand lists live as map keys (std::unordered_map is node-based,
// so key addresses survive rehashing); nodes_ gives the id -> key mapping and
// caches the depth.  Id 0 is always the empty list, i.e. the inert process.
class TermTable {
 public:
  static TermTable& instance() {
    static TermTable table;
    return table;
  }

  TermId intern(std::vector<Summand> canonical) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = ids_.find(canonical);
    if (it != ids_.end()) return it->second;
    int depth = 0;
    for (const Summand& s : canonical)
      depth = std::max(depth, node(s.target.id()).depth + 1);
    const auto id = static_cast<TermId>(nodes_.size());
    auto [pos, inserted] = ids_.emplace(std::move(canonical), id);
    (void)inserted;
    nodes_.push_back(Node{&pos->first, depth});
    return id;
  }

  const std::vector<Summand>& summands(TermId id) const {
    std::lock_guard<std::mutex> lock(mutex_);
    return *node(id).summands;
  }

  int depth(TermId id) const {
    std::lock_guard<std::mutex> lock(mutex_);
    return node(id).depth;
  }

 private:
  struct Node {
    const std::vector<Summand>* summands;
    int depth;
  };

  TermTable() { intern({}); }

  const Node& node(TermId id) const {
    if (id >= nodes_.size()) throw std::out_of_range("unknown term id");
    return nodes_[id];
  }

  mutable std::mutex mutex_;
  std::unordered_map<std::vector<Summand>, TermId, SummandVecHash> ids_;
  std::deque<Node> nodes_;
};

}  // namespace

// ── Term ────────────────────────────────────────────────────────────────────

Term::Term() : id_(0) {
  TermTable::instance();  // make sure id 0 exists before first use
}

bool Term::is_nil() const { return id_ == 0; }

const std::vector<Summand>& Term::summands() const {
  return TermTable::instance().summands(id_);
}

int Term::depth() const { return TermTable::instance().depth(id_); }

// ── Construction ────────────────────────────────────────────────────────────

Term make_term(std::vector<Summand> summands) {
  std::sort(summands.begin(), summands.end(), summand_less);
  summands.erase(std::unique(summands.begin(), summands.end()), summands.end());
  return Term(TermTable::instance().intern(std::move(summands)));
}

Term prefix(ActionId a, Term t) { return make_term({Summand{a, t}}); }

Term add(Term p, Term q) {
  if (p == q || q.is_nil()) return p;
  if (p.is_nil()) return q;
  std::vector<Summand> all = p.summands();
  const std::vector<Summand>& qs = q.summands();
  all.insert(all.end(), qs.begin(), qs.end());
  return make_term(std::move(all));
}

Term iterated_prefix(ActionId a, int n, Term t) {
  for (int i = 0; i < n; ++i) t = prefix(a, t);
  return t;
}

// ── Observations ────────────────────────────────────────────────────────────

std::vector<ActionId> initials(Term t) {
  std::vector<ActionId> out;
  for (const Summand& s : t.summands())  // sorted by action, so dedupe locally
    if (out.empty() || out.back() != s.action) out.push_back(s.action);
  return out;
}

bool initials_subset(Term p, Term q) {
  const std::vector<ActionId> ip = initials(p), iq = initials(q);
  return std::includes(iq.begin(), iq.end(), ip.begin(), ip.end(),
                       action_name_less);
}

bool initials_disjoint(Term p, Term q) {
  const std::vector<ActionId> ip = initials(p), iq = initials(q);
  auto i = ip.begin();
  auto j = iq.begin();
  while (i != ip.end() && j != iq.end()) {
    if (*i == *j) return false;
    if (action_name_less(*i, *j))
      ++i;
    else
      ++j;
  }
  return true;
}

Term prune(Term t, int depth) {
  if (t.depth() <= depth) return t;
  if (depth <= 0) return Term::nil();
  std::vector<Summand> out;
  out.reserve(t.summands().size());
  for (const Summand& s : t.summands())
    out.push_back(Summand{s.action, prune(s.target, depth - 1)});
  return make_term(std::move(out));
}

int compare(Term a, Term b) {
  if (a == b) return 0;
  const std::vector<Summand>& sa = a.summands();
  const std::vector<Summand>& sb = b.summands();
  const std::size_t n = std::min(sa.size(), sb.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (sa[i].action != sb[i].action)
      return action_name_less(sa[i].action, sb[i].action) ? -1 : 1;
    if (int c = compare(sa[i].target, sb[i].target); c != 0) return c;
  }
  if (sa.size() != sb.size()) return sa.size() < sb.size() ? -1 : 1;
  return 0;  // unreachable for interned terms: equal lists share one id
}

namespace {

void render(Term t, std::string& out) {
  if (t.is_nil()) {
    out += '0';
    return;
  }
  ActionRegistry& reg = ActionRegistry::instance();
  bool first = true;
  for (const Summand& s : t.summands()) {
    if (!first) out += " + ";
    first = false;
    out += reg.name(s.action);
    out += '.';
    const bool parens = s.target.summands().size() > 1;
    if (parens) out += '(';
    render(s.target, out);
    if (parens) out += ')';
  }
}

}  // namespace

std::string to_text(Term t) {
  std::string out;
  render(t, out);
  return out;
}

// ── Raw syntax trees ────────────────────────────────────────────────────────

RawTerm RawTerm::nil() {
  return RawTerm(std::make_shared<const Node>(Node{Kind::nil, 0, nullptr, nullptr}));
}

RawTerm RawTerm::prefix(ActionId a, RawTerm target) {
  return RawTerm(std::make_shared<const Node>(
      Node{Kind::prefix, a, std::move(target.node_), nullptr}));
}

RawTerm RawTerm::sum(RawTerm left, RawTerm right) {
  return RawTerm(std::make_shared<const Node>(
      Node{Kind::sum, 0, std::move(left.node_), std::move(right.node_)}));
}

ActionId RawTerm::action() const {
  if (node_->kind != Kind::prefix)
    throw std::logic_error("RawTerm::action on a non-prefix node");
  return node_->action;
}

RawTerm RawTerm::target() const {
  if (node_->kind != Kind::prefix)
    throw std::logic_error("RawTerm::target on a non-prefix node");
  return RawTerm(node_->a);
}

RawTerm RawTerm::left() const {
  if (node_->kind != Kind::sum)
    throw std::logic_error("RawTerm::left on a non-sum node");
  return RawTerm(node_->a);
}

RawTerm RawTerm::right() const {
  if (node_->kind != Kind::sum)
    throw std::logic_error("RawTerm::right on a non-sum node");
  return RawTerm(node_->b);
}

Term canonicalize_node(const RawTerm::Node* n) {
  using Kind = RawTerm::Kind;
  switch (n->kind) {
    case Kind::nil:
      return Term::nil();
    case Kind::prefix:
      return prefix(n->action, canonicalize_node(n->a.get()));
    case Kind::sum:
      return add(canonicalize_node(n->a.get()), canonicalize_node(n->b.get()));
  }
  throw std::logic_error("corrupt raw term node");
}

Term canonicalize(const RawTerm& raw) { return canonicalize_node(raw.node_.get()); }

}  // namespace ccsim
