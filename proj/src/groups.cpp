#include <algorithm>
#include <array>
#include <charconv>
#include <cstring>
#include <map>

#include "walklab/error.hpp"
#include "walklab/group.hpp"

namespace walklab {

namespace {

// ---- little-endian base-128 varints with zigzag for signed values ----

void put_varint(std::string& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<char>((v & 0x7f) | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<char>(v));
}

std::uint64_t get_varint(std::string_view& in) {
  std::uint64_t v = 0;
  int shift = 0;
  while (true) {
    if (in.empty()) throw Error(ErrorCode::kInvalidArgument, "truncated varint in key");
    auto byte = static_cast<std::uint8_t>(in.front());
    in.remove_prefix(1);
    v |= static_cast<std::uint64_t>(byte & 0x7f) << shift;
    if ((byte & 0x80) == 0) break;
    shift += 7;
  }
  return v;
}

std::uint64_t zigzag(std::int64_t v) {
  return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
}
std::int64_t unzigzag(std::uint64_t v) {
  return static_cast<std::int64_t>(v >> 1) ^ -static_cast<std::int64_t>(v & 1);
}

int parse_int(std::string_view s, const char* what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kInvalidArgument, std::string("bad ") + what + " in group spec");
  }
  return value;
}

class GenericWalker final : public Walker {
 public:
  explicit GenericWalker(const Group& g) : group_(g), state_(g.identity_state()) {}
  void reset() override { state_ = group_.identity_state(); }
  void step(int generator) override { state_ = group_.act(state_, generator); }
  Key key() const override { return group_.key(state_); }

 private:
  const Group& group_;
  State state_;
};

// ------------------------------- Z^d ---------------------------------------

class ZdGroup final : public Group {
 public:
  explicit ZdGroup(int dim) : dim_(dim) {
    if (dim < 1 || dim > 16) throw Error(ErrorCode::kInvalidArgument, "Z^d needs 1 <= d <= 16");
    for (int i = 0; i < dim; ++i) {
      std::string suffix = dim == 1 ? "" : std::to_string(i + 1);
      generators_.push_back({"e" + suffix, 2 * i + 1});
      generators_.push_back({"E" + suffix, 2 * i});
    }
  }
  std::string name() const override { return "zd:" + std::to_string(dim_); }
  GroupFamily family() const override { return GroupFamily::kZd; }

  State act(const State& x, int generator) const override {
    auto c = zd_coords(x, dim_);
    c[static_cast<std::size_t>(generator / 2)] += (generator % 2 == 0) ? 1 : -1;
    return zd_key(c);
  }

  std::unique_ptr<Walker> make_walker(std::size_t) const override {
    struct W final : Walker {
      explicit W(int d) : c(static_cast<std::size_t>(d), 0) {}
      void reset() override { std::fill(c.begin(), c.end(), 0); }
      void step(int g) override { c[static_cast<std::size_t>(g / 2)] += (g % 2 == 0) ? 1 : -1; }
      Key key() const override { return zd_key(c); }
      std::vector<std::int64_t> c;
    };
    return std::make_unique<W>(dim_);
  }

 private:
  int dim_;
};

// ---------------------------- free group -----------------------------------

class FreeGroup final : public Group {
 public:
  explicit FreeGroup(int rank) : rank_(rank) {
    if (rank < 1 || rank > 26) throw Error(ErrorCode::kInvalidArgument, "free group rank in [1, 26]");
    for (int i = 0; i < rank; ++i) {
      generators_.push_back({std::string(1, static_cast<char>('a' + i)), 2 * i + 1});
      generators_.push_back({std::string(1, static_cast<char>('A' + i)), 2 * i});
    }
  }
  std::string name() const override { return "free:" + std::to_string(rank_); }
  GroupFamily family() const override { return GroupFamily::kFree; }

  // key = freely reduced word, one byte per generator id
  State act(const State& x, int generator) const override {
    State y = x;
    if (!y.empty() && static_cast<int>(static_cast<unsigned char>(y.back())) == inverse(generator)) {
      y.pop_back();
    } else {
      y.push_back(static_cast<char>(generator));
    }
    return y;
  }

 private:
  int rank_;
};

// --------------------------- Heisenberg ------------------------------------

class HeisenbergGroup final : public Group {
 public:
  HeisenbergGroup() {
    generators_ = {{"x", 1}, {"X", 0}, {"y", 3}, {"Y", 2}};
  }
  std::string name() const override { return "heisenberg"; }
  GroupFamily family() const override { return GroupFamily::kHeisenberg; }

  // (x,y,z) is the upper unitriangular matrix [[1,x,z],[0,1,y],[0,0,1]]
  State act(const State& s, int generator) const override {
    auto c = zd_coords(s, 3);
    switch (generator) {
      case 0: c[0] += 1; break;
      case 1: c[0] -= 1; break;
      case 2: c[1] += 1; c[2] += c[0]; break;
      case 3: c[1] -= 1; c[2] -= c[0]; break;
      default: throw Error(ErrorCode::kInvalidArgument, "bad generator");
    }
    return zd_key(c);
  }
};

// --------------------------- lamplighter -----------------------------------

class LamplighterGroup final : public Group {
 public:
  LamplighterGroup(int lamp_order, int dim) : s_(lamp_order), d_(dim) {
    if (lamp_order < 2 || lamp_order > 255) throw Error(ErrorCode::kInvalidArgument, "lamp order in [2, 255]");
    if (dim < 1 || dim > 8) throw Error(ErrorCode::kInvalidArgument, "lamplighter base dim in [1, 8]");
    for (int i = 0; i < dim; ++i) {
      std::string suffix = dim == 1 ? "" : std::to_string(i + 1);
      generators_.push_back({"t" + suffix, 2 * i + 1});
      generators_.push_back({"T" + suffix, 2 * i});
    }
    int sw = 2 * dim;
    if (lamp_order == 2) {
      generators_.push_back({"s", sw});
    } else {
      generators_.push_back({"s", sw + 1});
      generators_.push_back({"S", sw});
    }
  }

  std::string name() const override {
    if (s_ == 2 && d_ == 1) return "lamplighter";
    return "lamplighter:" + std::to_string(s_) + ":" + std::to_string(d_);
  }
  GroupFamily family() const override { return GroupFamily::kLamplighter; }

  State act(const State& x, int generator) const override {
    LamplighterElement e = lamplighter_decode(x, d_, s_);
    if (generator < 2 * d_) {
      e.cursor[static_cast<std::size_t>(generator / 2)] += (generator % 2 == 0) ? 1 : -1;
      return lamplighter_key(e);
    }
    int delta = (generator == 2 * d_) ? 1 : s_ - 1;
    auto it = std::find_if(e.lamps.begin(), e.lamps.end(),
                           [&](const auto& lamp) { return lamp.first == e.cursor; });
    if (it == e.lamps.end()) {
      e.lamps.emplace_back(e.cursor, delta % s_);
    } else {
      it->second = (it->second + delta) % s_;
      if (it->second == 0) e.lamps.erase(it);
    }
    return lamplighter_key(e);
  }

  std::unique_ptr<Walker> make_walker(std::size_t max_steps) const override {
    if (d_ != 1) return Group::make_walker(max_steps);
    struct W final : Walker {
      W(int s, std::size_t max_steps)
          : lamp_order(s), offset(static_cast<std::int64_t>(max_steps) + 1),
            lamps(2 * max_steps + 3, 0) {}
      void reset() override {
        std::fill(lamps.begin(), lamps.end(), std::uint8_t{0});
        cursor = 0;
      }
      void step(int g) override {
        if (g == 0) {
          ++cursor;
        } else if (g == 1) {
          --cursor;
        } else {
          auto& v = lamps[static_cast<std::size_t>(cursor + offset)];
          v = static_cast<std::uint8_t>((v + (g == 2 ? 1 : lamp_order - 1)) % lamp_order);
        }
      }
      Key key() const override {
        LamplighterElement e;
        e.cursor = {cursor};
        for (std::size_t i = 0; i < lamps.size(); ++i) {
          if (lamps[i] != 0) e.lamps.push_back({{static_cast<std::int64_t>(i) - offset}, lamps[i]});
        }
        return lamplighter_key(e);
      }
      int lamp_order;
      std::int64_t offset;
      std::int64_t cursor = 0;
      std::vector<std::uint8_t> lamps;
    };
    return std::make_unique<W>(s_, max_steps);
  }

 private:
  int s_;
  int d_;
};

// --------------------------- Grigorchuk ------------------------------------

bool is_bcd(char c) { return c == 'b' || c == 'c' || c == 'd'; }

char bcd_product(char x, char y) {
  // {1,b,c,d} is a Klein four-group
  if (x == y) return 0;
  if (x != 'b' && y != 'b') return 'b';
  if (x != 'c' && y != 'c') return 'c';
  return 'd';
}

void push_reduced(std::string& w, char letter) {
  if (w.empty()) {
    w.push_back(letter);
    return;
  }
  char last = w.back();
  if (letter == 'a') {
    if (last == 'a') {
      w.pop_back();
    } else {
      w.push_back('a');
    }
    return;
  }
  if (is_bcd(last)) {
    w.pop_back();
    char p = bcd_product(last, letter);
    if (p != 0) push_reduced(w, p);
    return;
  }
  w.push_back(letter);
}

// Section of a letter at the first-level vertex v.
char letter_section(char letter, int v) {
  switch (letter) {
    case 'b': return v == 0 ? 'a' : 'c';
    case 'c': return v == 0 ? 'a' : 'd';
    case 'd': return v == 0 ? 0 : 'b';
    default: return 0;
  }
}

void portrait(std::string_view word, std::string& out) {
  // word is reduced
  if (word.empty()) {
    out.push_back('e');
    return;
  }
  if (word.size() == 1) {
    out.push_back(word.front());
    return;
  }
  int perm = 0;
  std::array<std::string, 2> sections;
  for (int v0 = 0; v0 < 2; ++v0) {
    int v = v0;
    for (char letter : word) {
      if (letter == 'a') {
        v ^= 1;
        if (v0 == 0) perm ^= 1;
        continue;
      }
      char s = letter_section(letter, v);
      if (s != 0) push_reduced(sections[static_cast<std::size_t>(v0)], s);
    }
  }
  std::string k0, k1;
  portrait(sections[0], k0);
  portrait(sections[1], k1);
  // collapse decompositions of single generators back to letters
  if (perm == 1 && k0 == "e" && k1 == "e") {
    out.push_back('a');
  } else if (perm == 0 && k0 == "e" && k1 == "e") {
    out.push_back('e');
  } else if (perm == 0 && k0 == "a" && k1 == "c") {
    out.push_back('b');
  } else if (perm == 0 && k0 == "a" && k1 == "d") {
    out.push_back('c');
  } else if (perm == 0 && k0 == "e" && k1 == "b") {
    out.push_back('d');
  } else {
    out.push_back(perm == 0 ? 'T' : 'U');
    out += k0;
    out += k1;
  }
}

class GrigorchukGroup final : public Group {
 public:
  GrigorchukGroup() { generators_ = {{"a", 0}, {"b", 1}, {"c", 2}, {"d", 3}}; }
  std::string name() const override { return "grigorchuk"; }
  GroupFamily family() const override { return GroupFamily::kGrigorchuk; }
  bool key_is_state() const override { return false; }

  State act(const State& x, int generator) const override {
    State y = x;
    push_reduced(y, static_cast<char>('a' + generator));
    return y;
  }
  Key key(const State& x) const override { return grigorchuk_key(x); }
};

}  // namespace

// ----------------------------- Group ---------------------------------------

std::optional<int> Group::find_generator(std::string_view name) const {
  for (std::size_t i = 0; i < generators_.size(); ++i) {
    if (generators_[i].name == name) return static_cast<int>(i);
  }
  return std::nullopt;
}

Key Group::canonical_key(std::span<const int> word) const {
  State s = identity_state();
  for (int g : word) {
    if (g < 0 || g >= generator_count()) throw Error(ErrorCode::kInvalidArgument, "generator id out of range");
    s = act(s, g);
  }
  return key(s);
}

Word Group::inverse_word(std::span<const int> word) const {
  Word out(word.rbegin(), word.rend());
  for (int& g : out) g = inverse(g);
  return out;
}

std::unique_ptr<Walker> Group::make_walker(std::size_t) const {
  return std::make_unique<GenericWalker>(*this);
}

std::unique_ptr<Group> make_group(std::string_view spec) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = spec.find(':', start);
    parts.push_back(spec.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  const auto head = parts.front();
  if (head == "z" || head == "zd") {
    if (parts.size() != 2) throw Error(ErrorCode::kInvalidArgument, "expected zd:<d>");
    return std::make_unique<ZdGroup>(parse_int(parts[1], "dimension"));
  }
  if (head == "free") {
    if (parts.size() != 2) throw Error(ErrorCode::kInvalidArgument, "expected free:<rank>");
    return std::make_unique<FreeGroup>(parse_int(parts[1], "rank"));
  }
  if (head == "lamplighter") {
    if (parts.size() == 1) return std::make_unique<LamplighterGroup>(2, 1);
    if (parts.size() != 3) throw Error(ErrorCode::kInvalidArgument, "expected lamplighter:<s>:<d>");
    return std::make_unique<LamplighterGroup>(parse_int(parts[1], "lamp order"),
                                              parse_int(parts[2], "dimension"));
  }
  if (head == "heisenberg" && parts.size() == 1) return std::make_unique<HeisenbergGroup>();
  if (head == "grigorchuk" && parts.size() == 1) return std::make_unique<GrigorchukGroup>();
  throw Error(ErrorCode::kInvalidArgument, "unknown group '" + std::string(spec) + "'");
}

// ------------------------- element helpers ---------------------------------

Key zd_key(std::span<const std::int64_t> coords) {
  if (std::all_of(coords.begin(), coords.end(), [](std::int64_t c) { return c == 0; })) return {};
  Key out;
  for (auto c : coords) put_varint(out, zigzag(c));
  return out;
}

std::vector<std::int64_t> zd_coords(const Key& key, int dim) {
  std::vector<std::int64_t> c(static_cast<std::size_t>(dim), 0);
  if (key.empty()) return c;
  std::string_view in(key);
  for (auto& v : c) v = unzigzag(get_varint(in));
  return c;
}

Key lamplighter_key(const LamplighterElement& element) {
  bool cursor_zero = std::all_of(element.cursor.begin(), element.cursor.end(),
                                 [](std::int64_t c) { return c == 0; });
  if (element.lamps.empty() && cursor_zero) return {};
  auto lamps = element.lamps;
  std::sort(lamps.begin(), lamps.end());
  Key out;
  put_varint(out, lamps.size());
  for (const auto& [pos, value] : lamps) {
    for (auto c : pos) put_varint(out, zigzag(c));
    put_varint(out, static_cast<std::uint64_t>(value));
  }
  for (auto c : element.cursor) put_varint(out, zigzag(c));
  return out;
}

LamplighterElement lamplighter_decode(const Key& key, int dim, int lamp_order) {
  LamplighterElement e;
  e.cursor.assign(static_cast<std::size_t>(dim), 0);
  if (key.empty()) return e;
  std::string_view in(key);
  auto count = get_varint(in);
  e.lamps.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::vector<std::int64_t> pos(static_cast<std::size_t>(dim));
    for (auto& c : pos) c = unzigzag(get_varint(in));
    int value = static_cast<int>(get_varint(in));
    if (value <= 0 || value >= lamp_order) throw Error(ErrorCode::kInvalidArgument, "bad lamp value in key");
    e.lamps.emplace_back(std::move(pos), value);
  }
  for (auto& c : e.cursor) c = unzigzag(get_varint(in));
  return e;
}

std::int64_t lamplighter_z_word_length(const LamplighterElement& element) {
  const std::int64_t x = element.cursor.at(0);
  std::int64_t lo = std::min<std::int64_t>(0, x);
  std::int64_t hi = std::max<std::int64_t>(0, x);
  for (const auto& lamp : element.lamps) {
    lo = std::min(lo, lamp.first.at(0));
    hi = std::max(hi, lamp.first.at(0));
  }
  std::int64_t left_first = -lo + (hi - lo) + (hi - x);
  std::int64_t right_first = hi + (hi - lo) + (x - lo);
  return static_cast<std::int64_t>(element.lamps.size()) + std::min(left_first, right_first);
}

std::string grigorchuk_reduce(std::string_view word) {
  std::string w;
  for (char c : word) {
    if (c < 'a' || c > 'd') throw Error(ErrorCode::kInvalidArgument, "Grigorchuk letters are a,b,c,d");
    push_reduced(w, c);
  }
  return w;
}

Key grigorchuk_key(std::string_view word) {
  std::string reduced = grigorchuk_reduce(word);
  std::string out;
  portrait(reduced, out);
  if (out == "e") return {};
  return out;
}

}  // namespace walklab
