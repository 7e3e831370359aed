#include "walklab/ball.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <deque>
#include <fstream>

#include "walklab/error.hpp"

namespace walklab {

static_assert(std::endian::native == std::endian::little, "ball files are written in host order");

namespace {

constexpr char kMagic[4] = {'W', 'L', 'K', 'B'};
constexpr char kNameTag[4] = {'G', 'R', 'P', 'N'};
constexpr std::uint16_t kVersion = 1;
constexpr std::uint64_t kFileBoundary = UINT64_MAX;

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw Error(ErrorCode::kIo, "truncated ball file");
  return v;
}

}  // namespace

CayleyBall CayleyBall::enumerate(const Group& group, int radius, const BallOptions& options) {
  if (radius < 0) throw Error(ErrorCode::kInvalidArgument, "radius must be >= 0");
  CayleyBall ball;
  ball.group_name_ = group.name();
  ball.radius_ = radius;
  ball.gens_ = group.generator_count();
  for (int s = 0; s < ball.gens_; ++s) ball.inverse_.push_back(group.inverse(s));

  const auto gens = static_cast<std::size_t>(ball.gens_);
  const std::size_t per_vertex = gens * 4 + 4 + 4 + 1 + (options.keep_index ? 96 : 0);
  auto check_cap = [&](std::size_t n) {
    if (n * per_vertex > options.memory_cap_bytes) {
      throw Error(ErrorCode::kMemoryCap, "ball of radius " + std::to_string(radius) + " exceeds " +
                                             std::to_string(options.memory_cap_bytes) + " bytes after " +
                                             std::to_string(n) + " states");
    }
  };

  std::unordered_map<Key, std::uint32_t> prev_map;
  std::unordered_map<Key, std::uint32_t> cur_map;
  std::vector<State> cur_states{group.identity_state()};
  cur_map.emplace(group.key(cur_states[0]), 0);
  ball.radii_.push_back(0);
  ball.adjacency_.assign(gens, kBoundary);
  if (options.keep_index) ball.keys_.push_back(group.key(cur_states[0]));
  std::size_t level_begin = 0;

  for (int r = 0; r <= radius; ++r) {
    struct Pending {
      std::uint32_t from;
      int gen;
      Key key;
    };
    std::vector<Pending> pending;
    std::vector<std::pair<Key, State>> fresh;
    for (std::size_t i = 0; i < cur_states.size(); ++i) {
      const auto vertex = static_cast<std::uint32_t>(level_begin + i);
      for (int s = 0; s < ball.gens_; ++s) {
        State y = group.act(cur_states[i], s);
        Key k = group.key(y);
        auto& slot = ball.adjacency_[vertex * gens + static_cast<std::size_t>(s)];
        if (auto it = cur_map.find(k); it != cur_map.end()) {
          slot = it->second;
        } else if (auto jt = prev_map.find(k); jt != prev_map.end()) {
          slot = jt->second;
        } else if (r < radius) {
          pending.push_back({vertex, s, k});
          fresh.emplace_back(std::move(k), std::move(y));
        }
      }
    }
    ball.level_end_.push_back(level_begin + cur_states.size());
    if (r == radius) break;

    std::sort(fresh.begin(), fresh.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    fresh.erase(std::unique(fresh.begin(), fresh.end(), [](const auto& a, const auto& b) { return a.first == b.first; }),
                fresh.end());
    const std::size_t next_begin = level_begin + cur_states.size();
    check_cap(next_begin + fresh.size());
    if (next_begin + fresh.size() >= kBoundary) throw Error(ErrorCode::kMemoryCap, "more than 2^32-1 states");

    std::unordered_map<Key, std::uint32_t> next_map;
    next_map.reserve(fresh.size());
    std::vector<State> next_states;
    next_states.reserve(fresh.size());
    for (std::size_t j = 0; j < fresh.size(); ++j) {
      next_map.emplace(fresh[j].first, static_cast<std::uint32_t>(next_begin + j));
      if (options.keep_index) ball.keys_.push_back(fresh[j].first);
      next_states.push_back(std::move(fresh[j].second));
    }
    for (const auto& p : pending) {
      ball.adjacency_[p.from * gens + static_cast<std::size_t>(p.gen)] = next_map.at(p.key);
    }
    ball.radii_.resize(next_begin + fresh.size(), static_cast<std::uint32_t>(r + 1));
    ball.adjacency_.resize((next_begin + fresh.size()) * gens, kBoundary);

    level_begin = next_begin;
    prev_map = std::move(cur_map);
    cur_map = std::move(next_map);
    cur_states = std::move(next_states);
  }

  ball.derive_parents();
  if (options.keep_index) {
    ball.index_.reserve(ball.keys_.size());
    for (std::size_t i = 0; i < ball.keys_.size(); ++i) ball.index_.emplace(ball.keys_[i], static_cast<std::uint32_t>(i));
  }
  return ball;
}

void CayleyBall::derive_parents() {
  parent_.assign(size(), kBoundary);
  parent_gen_.assign(size(), 0);
  for (std::size_t i = 0; i < size(); ++i) {
    for (int s = 0; s < gens_; ++s) {
      auto j = neighbor(i, s);
      if (j == kBoundary || radii_[j] != radii_[i] + 1 || parent_[j] != kBoundary) continue;
      parent_[j] = static_cast<std::uint32_t>(i);
      parent_gen_[j] = static_cast<std::uint8_t>(s);
    }
  }
}

std::size_t CayleyBall::count_within(int r) const {
  if (r < 0) return 0;
  if (r >= radius_) return size();
  return level_end_[static_cast<std::size_t>(r)];
}

std::vector<std::uint64_t> CayleyBall::growth() const {
  return {level_end_.begin(), level_end_.end()};
}

Word CayleyBall::word(std::size_t i) const {
  Word w;
  while (i != 0) {
    w.push_back(parent_gen_[i]);
    i = parent_[i];
  }
  std::reverse(w.begin(), w.end());
  return w;
}

std::optional<std::uint32_t> CayleyBall::find(const Key& key) const {
  if (keys_.empty()) throw Error(ErrorCode::kInvalidArgument, "ball has no key index");
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void CayleyBall::attach_index(const Group& group) {
  if (group.generator_count() != gens_) throw Error(ErrorCode::kInvalidArgument, "group does not match ball");
  keys_.assign(size(), Key{});
  std::vector<State> states(size());
  states[0] = group.identity_state();
  keys_[0] = group.key(states[0]);
  for (std::size_t i = 1; i < size(); ++i) {
    // parents precede children, so one forward pass suffices
    states[i] = group.act(states[parent_[i]], parent_gen_[i]);
    keys_[i] = group.key(states[i]);
  }
  index_.clear();
  for (std::size_t i = 0; i < size(); ++i) index_.emplace(keys_[i], static_cast<std::uint32_t>(i));
  if (index_.size() != size()) throw Error(ErrorCode::kInvalidArgument, "group does not match ball");
}

void CayleyBall::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  out.write(kMagic, 4);
  write_pod(out, kVersion);
  write_pod(out, static_cast<std::uint64_t>(size()));
  write_pod(out, static_cast<std::uint32_t>(radius_));
  write_pod(out, static_cast<std::uint16_t>(gens_));
  std::vector<std::uint64_t> row64(static_cast<std::size_t>(gens_));
  for (std::size_t i = 0; i < size(); ++i) {
    for (int s = 0; s < gens_; ++s) {
      auto j = neighbor(i, s);
      row64[static_cast<std::size_t>(s)] = j == kBoundary ? kFileBoundary : j;
    }
    out.write(reinterpret_cast<const char*>(row64.data()), static_cast<std::streamsize>(row64.size() * 8));
  }
  out.write(reinterpret_cast<const char*>(radii_.data()), static_cast<std::streamsize>(radii_.size() * 4));
  // optional trailer naming the group; readers of the bare format can ignore it
  out.write(kNameTag, 4);
  write_pod(out, static_cast<std::uint16_t>(group_name_.size()));
  out.write(group_name_.data(), static_cast<std::streamsize>(group_name_.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

std::pair<int, std::string> CayleyBall::peek(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw Error(ErrorCode::kIo, "not a ball file: " + path.string());
  if (read_pod<std::uint16_t>(in) != kVersion) throw Error(ErrorCode::kIo, "unsupported ball version");
  const auto n = read_pod<std::uint64_t>(in);
  const auto radius = static_cast<int>(read_pod<std::uint32_t>(in));
  const auto gens = read_pod<std::uint16_t>(in);
  in.seekg(static_cast<std::streamoff>(n * gens * 8 + n * 4), std::ios::cur);
  std::string name;
  char tag[4];
  if (in.read(tag, 4) && std::memcmp(tag, kNameTag, 4) == 0) {
    name.resize(read_pod<std::uint16_t>(in));
    in.read(name.data(), static_cast<std::streamsize>(name.size()));
  }
  return {radius, name};
}

CayleyBall CayleyBall::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw Error(ErrorCode::kIo, "not a ball file: " + path.string());
  if (read_pod<std::uint16_t>(in) != kVersion) throw Error(ErrorCode::kIo, "unsupported ball version");
  CayleyBall ball;
  auto n = read_pod<std::uint64_t>(in);
  ball.radius_ = static_cast<int>(read_pod<std::uint32_t>(in));
  ball.gens_ = read_pod<std::uint16_t>(in);
  const auto gens = static_cast<std::size_t>(ball.gens_);
  if (n == 0 || n >= kBoundary) throw Error(ErrorCode::kIo, "bad vertex count");
  ball.adjacency_.resize(n * gens);
  std::vector<std::uint64_t> row64(gens);
  for (std::size_t i = 0; i < n; ++i) {
    in.read(reinterpret_cast<char*>(row64.data()), static_cast<std::streamsize>(gens * 8));
    if (!in) throw Error(ErrorCode::kIo, "truncated adjacency");
    for (std::size_t s = 0; s < gens; ++s) {
      if (row64[s] != kFileBoundary && row64[s] >= n) throw Error(ErrorCode::kIo, "adjacency index out of range");
      ball.adjacency_[i * gens + s] = row64[s] == kFileBoundary ? kBoundary : static_cast<std::uint32_t>(row64[s]);
    }
  }
  ball.radii_.resize(n);
  in.read(reinterpret_cast<char*>(ball.radii_.data()), static_cast<std::streamsize>(n * 4));
  if (!in) throw Error(ErrorCode::kIo, "truncated radii");
  char tag[4];
  if (in.read(tag, 4) && std::memcmp(tag, kNameTag, 4) == 0) {
    auto len = read_pod<std::uint16_t>(in);
    ball.group_name_.resize(len);
    in.read(ball.group_name_.data(), len);
  }

  for (std::size_t i = 1; i < n; ++i) {
    if (ball.radii_[i] < ball.radii_[i - 1]) throw Error(ErrorCode::kIo, "radii not sorted by level");
  }
  for (int r = 0; r <= ball.radius_; ++r) {
    auto it = std::upper_bound(ball.radii_.begin(), ball.radii_.end(), static_cast<std::uint32_t>(r));
    ball.level_end_.push_back(static_cast<std::size_t>(it - ball.radii_.begin()));
  }
  // inverse pairing: the generator that leads back from every s-neighbor
  for (std::size_t s = 0; s < gens; ++s) {
    int found = -1;
    for (std::size_t t = 0; t < gens && found < 0; ++t) {
      bool ok = true;
      for (std::size_t i = 0; i < n && ok; ++i) {
        auto j = ball.adjacency_[i * gens + s];
        if (j == kBoundary) continue;
        auto back = ball.adjacency_[j * gens + t];
        ok = back == kBoundary || back == i;
        if (back == kBoundary && ball.radii_[j] < static_cast<std::uint32_t>(ball.radius_)) ok = false;
      }
      if (ok) found = static_cast<int>(t);
    }
    if (found < 0) throw Error(ErrorCode::kIo, "adjacency is not involution-consistent");
    ball.inverse_.push_back(found);
  }
  ball.derive_parents();
  return ball;
}

std::vector<std::uint32_t> bfs_radii(const CayleyBall& ball) {
  std::vector<std::uint32_t> dist(ball.size(), kBoundary);
  std::deque<std::size_t> queue{0};
  dist[0] = 0;
  while (!queue.empty()) {
    auto i = queue.front();
    queue.pop_front();
    for (int s = 0; s < ball.generator_count(); ++s) {
      auto j = ball.neighbor(i, s);
      if (j == kBoundary || dist[j] != kBoundary) continue;
      dist[j] = dist[i] + 1;
      queue.push_back(j);
    }
  }
  return dist;
}

}  // namespace walklab
