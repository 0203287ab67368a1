#include "ptalign/knn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "ptalign/errors.hpp"

namespace ptalign {

namespace {

// Pruning slack: floating-point triangle inequalities can be off by a few
// ulps, so a branch is skipped only when it is clearly farther.
constexpr double kSlack = 1e-12;

bool neighbor_less(const Neighbor& a, const Neighbor& b) {
  if (a.distance != b.distance) return a.distance < b.distance;
  return a.id < b.id;
}

}  // namespace

IndexKind parse_index_kind(std::string_view text) {
  if (text == "vp") return IndexKind::kVp;
  if (text == "kd") return IndexKind::kKd;
  if (text == "linear") return IndexKind::kLinear;
  throw PreconditionError("unknown index kind '" + std::string(text) + "'");
}

std::string to_string(IndexKind kind) {
  switch (kind) {
    case IndexKind::kVp: return "vp";
    case IndexKind::kKd: return "kd";
    case IndexKind::kLinear: return "linear";
  }
  return "?";
}

double euclidean(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

// Bounded max-heap of the k best neighbours under (distance, id).
class KnnIndex::Heap {
 public:
  explicit Heap(std::size_t k) : k_(k) {}

  void offer(const Neighbor& n) {
    if (heap_.size() < k_) {
      heap_.push_back(n);
      std::push_heap(heap_.begin(), heap_.end(), neighbor_less);
    } else if (neighbor_less(n, heap_.front())) {
      std::pop_heap(heap_.begin(), heap_.end(), neighbor_less);
      heap_.back() = n;
      std::push_heap(heap_.begin(), heap_.end(), neighbor_less);
    }
  }
  bool full() const { return heap_.size() == k_; }
  double radius() const {
    return full() ? heap_.front().distance : std::numeric_limits<double>::infinity();
  }
  std::vector<Neighbor> sorted() && {
    std::sort(heap_.begin(), heap_.end(), neighbor_less);
    return std::move(heap_);
  }

 private:
  std::size_t k_;
  std::vector<Neighbor> heap_;
};

KnnIndex::KnnIndex(std::vector<Point> points, IndexKind kind, std::size_t leaf_size)
    : kind_(kind), leaf_size_(std::max<std::size_t>(leaf_size, 1)), points_(std::move(points)) {
  if (points_.empty()) throw PreconditionError("cannot index an empty point set");
  dimension_ = points_.front().coords.size();
  for (const auto& p : points_) {
    if (p.coords.size() != dimension_) throw PreconditionError("point dimension mismatch");
    for (double x : p.coords) {
      if (!std::isfinite(x)) throw PreconditionError("point coordinates must be finite");
    }
  }
  switch (kind_) {
    case IndexKind::kVp: root_ = build_vp(0, points_.size()); break;
    case IndexKind::kKd: root_ = build_kd(0, points_.size(), 0); break;
    case IndexKind::kLinear: break;
  }
}

int KnnIndex::build_vp(std::size_t begin, std::size_t end) {
  Node node;
  node.begin = begin;
  node.end = end;
  if (end - begin <= leaf_size_) {
    nodes_.push_back(node);
    return static_cast<int>(nodes_.size() - 1);
  }
  node.leaf = false;
  const std::vector<double>& vantage = points_[begin].coords;
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(end - begin - 1);
  for (std::size_t i = begin + 1; i < end; ++i) dist.emplace_back(euclidean(vantage, points_[i].coords), i);
  std::sort(dist.begin(), dist.end());
  const std::size_t half = dist.size() / 2;
  node.threshold = dist[half].first;
  std::vector<Point> reordered;
  reordered.reserve(dist.size());
  for (const auto& [d, i] : dist) reordered.push_back(std::move(points_[i]));
  std::move(reordered.begin(), reordered.end(), points_.begin() + begin + 1);
  // Inner: [begin+1, begin+1+half) has d <= threshold; outer has d >= threshold.
  const int self = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  const int left = build_vp(begin + 1, begin + 1 + half);
  const int right = build_vp(begin + 1 + half, end);
  nodes_[self].left = left;
  nodes_[self].right = right;
  return self;
}

int KnnIndex::build_kd(std::size_t begin, std::size_t end, std::size_t depth) {
  Node node;
  node.begin = begin;
  node.end = end;
  if (end - begin <= leaf_size_) {
    nodes_.push_back(node);
    return static_cast<int>(nodes_.size() - 1);
  }
  node.leaf = false;
  if (dimension_ <= 3) {
    node.axis = depth % dimension_;
  } else {
    double widest = -1.0;
    for (std::size_t d = 0; d < dimension_; ++d) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t i = begin; i < end; ++i) {
        lo = std::min(lo, points_[i].coords[d]);
        hi = std::max(hi, points_[i].coords[d]);
      }
      if (hi - lo > widest) {
        widest = hi - lo;
        node.axis = d;
      }
    }
  }
  const std::size_t mid = begin + (end - begin) / 2;
  const std::size_t axis = node.axis;
  std::nth_element(points_.begin() + begin, points_.begin() + mid, points_.begin() + end,
                   [axis](const Point& a, const Point& b) {
                     if (a.coords[axis] != b.coords[axis]) return a.coords[axis] < b.coords[axis];
                     return a.id < b.id;
                   });
  node.threshold = points_[mid].coords[axis];
  // Left: [begin, mid) with coord <= threshold; right: [mid, end) with >=.
  const int self = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  const int left = build_kd(begin, mid, depth + 1);
  const int right = build_kd(mid, end, depth + 1);
  nodes_[self].left = left;
  nodes_[self].right = right;
  return self;
}

void KnnIndex::scan(std::size_t begin, std::size_t end, std::span<const double> q,
                    Heap& heap) const {
  for (std::size_t i = begin; i < end; ++i) heap.offer({points_[i].id, euclidean(q, points_[i].coords)});
}

void KnnIndex::search_vp(int index, std::span<const double> q, Heap& heap) const {
  const Node& node = nodes_[index];
  if (node.leaf) {
    scan(node.begin, node.end, q, heap);
    return;
  }
  const double d = euclidean(q, points_[node.begin].coords);
  heap.offer({points_[node.begin].id, d});
  const bool inside = d <= node.threshold;
  const int first = inside ? node.left : node.right;
  const int second = inside ? node.right : node.left;
  search_vp(first, q, heap);
  const double gap = std::abs(d - node.threshold);
  if (gap <= heap.radius() * (1.0 + kSlack) + kSlack) search_vp(second, q, heap);
}

void KnnIndex::search_kd(int index, std::span<const double> q, Heap& heap) const {
  const Node& node = nodes_[index];
  if (node.leaf) {
    scan(node.begin, node.end, q, heap);
    return;
  }
  const double diff = q[node.axis] - node.threshold;
  const int first = diff <= 0.0 ? node.left : node.right;
  const int second = diff <= 0.0 ? node.right : node.left;
  search_kd(first, q, heap);
  if (std::abs(diff) <= heap.radius() * (1.0 + kSlack) + kSlack) search_kd(second, q, heap);
}

std::vector<Neighbor> KnnIndex::query(std::span<const double> q, std::size_t k) const {
  if (k == 0) throw PreconditionError("k must be positive");
  if (q.size() != dimension_) throw PreconditionError("query dimension mismatch");
  Heap heap(std::min(k, points_.size()));
  switch (kind_) {
    case IndexKind::kVp: search_vp(root_, q, heap); break;
    case IndexKind::kKd: search_kd(root_, q, heap); break;
    case IndexKind::kLinear: scan(0, points_.size(), q, heap); break;
  }
  return std::move(heap).sorted();
}

std::vector<Neighbor> brute_force(std::span<const Point> points, std::span<const double> q,
                                  std::size_t k) {
  if (k == 0) throw PreconditionError("k must be positive");
  std::vector<Neighbor> all;
  all.reserve(points.size());
  for (const auto& p : points) {
    if (p.coords.size() != q.size()) throw PreconditionError("query dimension mismatch");
    all.push_back({p.id, euclidean(q, p.coords)});
  }
  const std::size_t take = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + take, all.end(), neighbor_less);
  all.resize(take);
  return all;
}

}  // namespace ptalign
