#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace walklab {

// Canonical element key: equal keys <=> equal group elements. The identity
// always has the empty key.
using Key = std::string;
// Group-specific working representation of an element. For most families it
// coincides with the key; for Grigorchuk it is a reduced word.
using State = std::string;
using Word = std::vector<int>;

enum class GroupFamily { kZd, kFree, kLamplighter, kHeisenberg, kGrigorchuk };

/// Mutable walker used by Monte Carlo sampling; avoids key round trips per step.
class Walker {
 public:
  virtual ~Walker() = default;
  virtual void reset() = 0;
  virtual void step(int generator) = 0;
  virtual Key key() const = 0;
};

/// A finitely generated group with solvable word problem and a symmetric
/// generating set. Generators act by right multiplication: x -> x*s.
class Group {
 public:
  virtual ~Group() = default;

  virtual std::string name() const = 0;
  virtual GroupFamily family() const = 0;

  int generator_count() const { return static_cast<int>(generators_.size()); }
  int inverse(int generator) const { return generators_.at(static_cast<std::size_t>(generator)).inverse; }
  const std::string& generator_name(int generator) const {
    return generators_.at(static_cast<std::size_t>(generator)).name;
  }
  std::optional<int> find_generator(std::string_view name) const;

  virtual State identity_state() const { return {}; }
  virtual State act(const State& x, int generator) const = 0;
  virtual Key key(const State& x) const { return x; }
  // True when key(x) == x for every state, so balls need not store states.
  virtual bool key_is_state() const { return true; }

  Key canonical_key(std::span<const int> word) const;
  Word inverse_word(std::span<const int> word) const;

  virtual std::unique_ptr<Walker> make_walker(std::size_t max_steps) const;

 protected:
  struct Generator {
    std::string name;
    int inverse;
  };
  std::vector<Generator> generators_;
};

/// Parses "z:1", "zd:3", "free:2", "lamplighter", "lamplighter:<s>:<d>",
/// "heisenberg", "grigorchuk".
std::unique_ptr<Group> make_group(std::string_view spec);

// ---- family-specific element constructors (used by structured witnesses) ----

Key zd_key(std::span<const std::int64_t> coords);
std::vector<std::int64_t> zd_coords(const Key& key, int dim);

/// Lamplighter Z_s wr Z^d element. Lamps are (position, value) with value in
/// [1, s); positions must be distinct.
struct LamplighterElement {
  std::vector<std::pair<std::vector<std::int64_t>, int>> lamps;
  std::vector<std::int64_t> cursor;
};
Key lamplighter_key(const LamplighterElement& element);
LamplighterElement lamplighter_decode(const Key& key, int dim, int lamp_order);

/// Word length of an element of Z_2 wr Z with generators {t, T, s}.
std::int64_t lamplighter_z_word_length(const LamplighterElement& element);

/// Portrait-based canonical key for a word over {a,b,c,d} (Grigorchuk group).
Key grigorchuk_key(std::string_view word);
/// Reduces a word over {a,b,c,d} using a^2=b^2=c^2=d^2=1 and bc=cb=d etc.
std::string grigorchuk_reduce(std::string_view word);

}  // namespace walklab
