#pragma once
// Action names, polarity classes, and alphabets.
//
// Action *names* are process-global: the registry hands out one dense id per
// distinct name, so terms built under different alphabets can share the same
// intern table.  Polarity is deliberately not a property of the name — the
// same letter may be covariant in one experiment and bivariant in the next —
// so it lives in the Alphabet, which also carries the pool of fresh actions
// reserved for distinguishing contexts.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ccsim {

using ActionId = std::uint32_t;

enum class Polarity { covariant, contravariant, bivariant };

const char* to_string(Polarity p);

// ── Action registry ─────────────────────────────────────────────────────────

/// Process-wide, append-only map between action names and dense ids.
class ActionRegistry {
 public:
  static ActionRegistry& instance();

  /// Id for `name`, interning it on first use.  Names must be non-empty.
  ActionId id_of(std::string_view name);

  /// Id for `name` if it has been seen before.
  std::optional<ActionId> find(std::string_view name) const;

  const std::string& name(ActionId id) const;

 private:
  ActionRegistry() = default;
  struct Impl;
  Impl& impl() const;
};

/// Total order on actions by name (the order used for canonical summand
/// lists and everything user-visible).  Ids themselves are registration
/// order and carry no meaning.
bool action_name_less(ActionId a, ActionId b);

// ── Alphabet ────────────────────────────────────────────────────────────────

/// A finite action set partitioned into covariant / contravariant / bivariant
/// classes, plus an ordered pool of fresh actions that user terms must not
/// mention (they are reserved for contexts built by the sweeps, emulating an
/// unbounded supply of unused letters).
class Alphabet {
 public:
  Alphabet() = default;

  /// Builds an alphabet from name lists; throws std::invalid_argument when a
  /// name appears in more than one class (fresh included) or is empty.
  static Alphabet make(const std::vector<std::string>& covariant,
                       const std::vector<std::string>& contravariant = {},
                       const std::vector<std::string>& bivariant = {},
                       const std::vector<std::string>& fresh = {});

  /// Polarity of a declared action (fresh actions report covariant); nullopt
  /// for actions this alphabet does not know.
  std::optional<Polarity> polarity(ActionId a) const;

  bool contains(ActionId a) const { return polarity(a).has_value(); }
  bool is_fresh(ActionId a) const;

  // Class accessors; each list is sorted by action name.
  const std::vector<ActionId>& covariant() const { return covariant_; }
  const std::vector<ActionId>& contravariant() const { return contravariant_; }
  const std::vector<ActionId>& bivariant() const { return bivariant_; }
  const std::vector<ActionId>& fresh_pool() const { return fresh_; }

  /// All non-fresh actions, sorted by name.  These are the actions user terms
  /// and enumerated terms may use.
  std::vector<ActionId> actions() const;

  bool has_bivariant() const { return !bivariant_.empty(); }

  /// Rebuilds this alphabet with every non-fresh action moved into one class
  /// (used by the degeneration checks).
  Alphabet with_uniform_polarity(Polarity p) const;

  /// Text form matching the .bccsp alphabet block body, e.g.
  /// "r: a, b; l: c; bi: d; fresh: f1, f2".
  std::string to_text() const;

 private:
  std::vector<ActionId> covariant_, contravariant_, bivariant_, fresh_;
};

}  // namespace ccsim
