#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <unordered_map>
#include <vector>

#include "walklab/group.hpp"

namespace walklab {

inline constexpr std::uint32_t kBoundary = UINT32_MAX;

struct BallOptions {
  std::size_t memory_cap_bytes = std::size_t{2} << 30;
  // Keep the key of every vertex and a key -> index map after enumeration.
  bool keep_index = true;
};

/// Word-metric ball of radius R around the identity. Vertices are indexed by
/// BFS level; within a level indices follow sorted canonical key order, so
/// the layout does not depend on how the frontier was expanded.
class CayleyBall {
 public:
  static CayleyBall enumerate(const Group& group, int radius, const BallOptions& options = {});

  std::size_t size() const { return radii_.size(); }
  int radius() const { return radius_; }
  int generator_count() const { return gens_; }
  const std::string& group_name() const { return group_name_; }
  int inverse(int generator) const { return inverse_[static_cast<std::size_t>(generator)]; }

  std::uint32_t neighbor(std::size_t i, int generator) const {
    return adjacency_[i * static_cast<std::size_t>(gens_) + static_cast<std::size_t>(generator)];
  }
  const std::uint32_t* row(std::size_t i) const { return adjacency_.data() + i * static_cast<std::size_t>(gens_); }
  std::uint32_t radius_of(std::size_t i) const { return radii_[i]; }
  const std::vector<std::uint32_t>& radii() const { return radii_; }

  /// Number of vertices at distance <= r (r clamped to [−1, R]).
  std::size_t count_within(int r) const;
  /// Gr(r) for r = 0..R.
  std::vector<std::uint64_t> growth() const;

  /// A geodesic word from the identity to vertex i.
  Word word(std::size_t i) const;

  bool has_index() const { return !keys_.empty(); }
  std::optional<std::uint32_t> find(const Key& key) const;
  const Key& key(std::size_t i) const { return keys_.at(i); }
  /// Rebuilds keys and the key map from geodesic words (used after load()).
  void attach_index(const Group& group);

  void save(const std::filesystem::path& path) const;
  static CayleyBall load(const std::filesystem::path& path);
  /// Radius and group name from a ball file without reading the adjacency.
  static std::pair<int, std::string> peek(const std::filesystem::path& path);

 private:
  void derive_parents();

  std::string group_name_;
  int radius_ = 0;
  int gens_ = 0;
  std::vector<int> inverse_;
  std::vector<std::uint32_t> adjacency_;
  std::vector<std::uint32_t> radii_;
  std::vector<std::size_t> level_end_;  // level_end_[r] = count_within(r)
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint8_t> parent_gen_;
  std::vector<Key> keys_;
  std::unordered_map<Key, std::uint32_t> index_;
};

/// Radius of every vertex recomputed by plain BFS over the adjacency (test oracle).
std::vector<std::uint32_t> bfs_radii(const CayleyBall& ball);

}  // namespace walklab
