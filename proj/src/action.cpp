#include "ccsim/action.hpp"

#include <algorithm>
#include <deque>
#include <mutex>
#include <sstream>
#include <unordered_map>

namespace ccsim {

const char* to_string(Polarity p) {
  switch (p) {
    case Polarity::covariant: return "covariant";
    case Polarity::contravariant: return "contravariant";
    case Polarity::bivariant: return "bivariant";
  }
  return "?";
}

// ── ActionRegistry ──────────────────────────────────────────────────────────

struct ActionRegistry::Impl {
  mutable std::mutex mutex;
  std::deque<std::string> names;  // id -> name; deque keeps references stable
  std::unordered_map<std::string_view, ActionId> ids;
};

ActionRegistry::Impl& ActionRegistry::impl() const {
  static Impl the_impl;
  return the_impl;
}

ActionRegistry& ActionRegistry::instance() {
  static ActionRegistry the_registry;
  return the_registry;
}

ActionId ActionRegistry::id_of(std::string_view name) {
  if (name.empty()) throw std::invalid_argument("action name must be non-empty");
  Impl& im = impl();
  std::lock_guard<std::mutex> lock(im.mutex);
  auto it = im.ids.find(name);
  if (it != im.ids.end()) return it->second;
  im.names.emplace_back(name);
  ActionId id = static_cast<ActionId>(im.names.size() - 1);
  im.ids.emplace(std::string_view(im.names.back()), id);
  return id;
}

std::optional<ActionId> ActionRegistry::find(std::string_view name) const {
  Impl& im = impl();
  std::lock_guard<std::mutex> lock(im.mutex);
  auto it = im.ids.find(name);
  if (it == im.ids.end()) return std::nullopt;
  return it->second;
}

const std::string& ActionRegistry::name(ActionId id) const {
  Impl& im = impl();
  std::lock_guard<std::mutex> lock(im.mutex);
  return im.names.at(id);
}

bool action_name_less(ActionId a, ActionId b) {
  if (a == b) return false;
  ActionRegistry& reg = ActionRegistry::instance();
  return reg.name(a) < reg.name(b);
}

// ── Alphabet ────────────────────────────────────────────────────────────────

namespace {

std::vector<ActionId> intern_sorted(const std::vector<std::string>& names) {
  std::vector<ActionId> ids;
  ids.reserve(names.size());
  for (const std::string& n : names) ids.push_back(ActionRegistry::instance().id_of(n));
  std::sort(ids.begin(), ids.end(), action_name_less);
  return ids;
}

}  // namespace

Alphabet Alphabet::make(const std::vector<std::string>& covariant,
                        const std::vector<std::string>& contravariant,
                        const std::vector<std::string>& bivariant,
                        const std::vector<std::string>& fresh) {
  Alphabet al;
  al.covariant_ = intern_sorted(covariant);
  al.contravariant_ = intern_sorted(contravariant);
  al.bivariant_ = intern_sorted(bivariant);
  al.fresh_ = intern_sorted(fresh);
  std::vector<ActionId> all;
  for (const auto* cls : {&al.covariant_, &al.contravariant_, &al.bivariant_, &al.fresh_})
    all.insert(all.end(), cls->begin(), cls->end());
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end())
    throw std::invalid_argument("alphabet classes must be pairwise disjoint");
  return al;
}

std::optional<Polarity> Alphabet::polarity(ActionId a) const {
  auto in = [a](const std::vector<ActionId>& v) {
    return std::find(v.begin(), v.end(), a) != v.end();
  };
  if (in(covariant_)) return Polarity::covariant;
  if (in(contravariant_)) return Polarity::contravariant;
  if (in(bivariant_)) return Polarity::bivariant;
  if (in(fresh_)) return Polarity::covariant;
  return std::nullopt;
}

bool Alphabet::is_fresh(ActionId a) const {
  return std::find(fresh_.begin(), fresh_.end(), a) != fresh_.end();
}

std::vector<ActionId> Alphabet::actions() const {
  std::vector<ActionId> all;
  for (const auto* cls : {&covariant_, &contravariant_, &bivariant_})
    all.insert(all.end(), cls->begin(), cls->end());
  std::sort(all.begin(), all.end(), action_name_less);
  return all;
}

Alphabet Alphabet::with_uniform_polarity(Polarity p) const {
  Alphabet al;
  std::vector<ActionId> all = actions();
  switch (p) {
    case Polarity::covariant: al.covariant_ = all; break;
    case Polarity::contravariant: al.contravariant_ = all; break;
    case Polarity::bivariant: al.bivariant_ = all; break;
  }
  al.fresh_ = fresh_;
  return al;
}

std::string Alphabet::to_text() const {
  ActionRegistry& reg = ActionRegistry::instance();
  std::ostringstream out;
  bool first_class = true;
  auto emit = [&](const char* label, const std::vector<ActionId>& ids) {
    if (ids.empty()) return;
    if (!first_class) out << "; ";
    first_class = false;
    out << label << ": ";
    for (size_t i = 0; i < ids.size(); ++i) {
      if (i) out << ", ";
      out << reg.name(ids[i]);
    }
  };
  emit("r", covariant_);
  emit("l", contravariant_);
  emit("bi", bivariant_);
  emit("fresh", fresh_);
  return out.str();
}

}  // namespace ccsim
