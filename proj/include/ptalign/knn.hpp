#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ptalign {

enum class IndexKind { kVp, kKd, kLinear };

IndexKind parse_index_kind(std::string_view text);
std::string to_string(IndexKind kind);

struct Point {
  std::size_t id;
  std::vector<double> coords;
};

struct Neighbor {
  std::size_t id;
  double distance;

  bool operator==(const Neighbor&) const = default;
};

double euclidean(std::span<const double> a, std::span<const double> b);

// Exact k-nearest-neighbour index under the Euclidean distance. Results are
// ordered by (distance, id) and coincide with brute_force() on the same
// points. Immutable after construction.
class KnnIndex {
 public:
  static constexpr std::size_t kDefaultLeafSize = 16;

  KnnIndex(std::vector<Point> points, IndexKind kind, std::size_t leaf_size = kDefaultLeafSize);

  IndexKind kind() const { return kind_; }
  std::size_t size() const { return points_.size(); }
  std::size_t dimension() const { return dimension_; }

  std::vector<Neighbor> query(std::span<const double> q, std::size_t k) const;

 private:
  struct Node {
    // Leaves hold points_[begin, end).
    std::size_t begin = 0;
    std::size_t end = 0;
    bool leaf = true;
    // vp: vantage point is points_[begin], children cover [begin+1, end).
    // kd: split dimension and value.
    std::size_t axis = 0;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
  };

  int build_vp(std::size_t begin, std::size_t end);
  int build_kd(std::size_t begin, std::size_t end, std::size_t depth);

  class Heap;
  void search_vp(int node, std::span<const double> q, Heap& heap) const;
  void search_kd(int node, std::span<const double> q, Heap& heap) const;
  void scan(std::size_t begin, std::size_t end, std::span<const double> q, Heap& heap) const;

  IndexKind kind_;
  std::size_t leaf_size_;
  std::size_t dimension_ = 0;
  std::vector<Point> points_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

std::vector<Neighbor> brute_force(std::span<const Point> points, std::span<const double> q,
                                  std::size_t k);

}  // namespace ptalign
