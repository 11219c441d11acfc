#include "nfrbf/kdtree.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "nfrbf/error.hpp"

namespace nfrbf {

namespace {
constexpr int kLeafSize = 12;
}

KdTree::KdTree(std::vector<Vec3> points, int dim) : points_(std::move(points)), dim_(dim) {
    if (dim != 2 && dim != 3) throw InvalidInput("KdTree: dim must be 2 or 3");
    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), 0);
    if (!points_.empty()) root_ = build(0, static_cast<int>(points_.size()), 0);
}

int KdTree::build(int lo, int hi, int depth) {
    Node node;
    node.lo = lo;
    node.hi = hi;
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    if (hi - lo <= kLeafSize) return id;

    // split along the widest extent
    Vec3 mn = points_[order_[lo]], mx = mn;
    for (int i = lo; i < hi; ++i) {
        mn = mn.cwiseMin(points_[order_[i]]);
        mx = mx.cwiseMax(points_[order_[i]]);
    }
    int axis = 0;
    for (int a = 1; a < dim_; ++a)
        if (mx[a] - mn[a] > mx[axis] - mn[axis]) axis = a;
    const int mid = (lo + hi) / 2;
    std::nth_element(order_.begin() + lo, order_.begin() + mid, order_.begin() + hi, [&](int a, int b) {
        return points_[a][axis] < points_[b][axis] || (points_[a][axis] == points_[b][axis] && a < b);
    });
    const double split = points_[order_[mid]][axis];
    const int left = build(lo, mid, depth + 1);
    const int right = build(mid, hi, depth + 1);
    nodes_[id].axis = axis;
    nodes_[id].split = split;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

void KdTree::search(int id, const Vec3& q, std::size_t k, std::vector<std::pair<double, int>>& heap) const {
    const Node& node = nodes_[id];
    if (node.axis < 0) {
        for (int i = node.lo; i < node.hi; ++i) {
            const int p = order_[i];
            double d2 = 0.0;
            for (int a = 0; a < dim_; ++a) {
                const double d = points_[p][a] - q[a];
                d2 += d * d;
            }
            const std::pair<double, int> cand{d2, p};
            if (heap.size() < k) {
                heap.push_back(cand);
                std::push_heap(heap.begin(), heap.end());
            } else if (cand < heap.front()) {
                std::pop_heap(heap.begin(), heap.end());
                heap.back() = cand;
                std::push_heap(heap.begin(), heap.end());
            }
        }
        return;
    }
    const double diff = q[node.axis] - node.split;
    const int near = diff < 0.0 ? node.left : node.right;
    const int far = diff < 0.0 ? node.right : node.left;
    search(near, q, k, heap);
    // <= keeps equidistant lower-index candidates reachable
    if (heap.size() < k || diff * diff <= heap.front().first) search(far, q, k, heap);
}

std::vector<int> KdTree::nearest(const Vec3& query, std::size_t k) const {
    if (k > points_.size())
        throw InvalidInput("KdTree: requested " + std::to_string(k) + " neighbours from " +
                           std::to_string(points_.size()) + " points");
    std::vector<std::pair<double, int>> heap;
    heap.reserve(k + 1);
    if (k > 0) search(root_, query, k, heap);
    std::sort_heap(heap.begin(), heap.end());
    std::vector<int> out(heap.size());
    for (std::size_t i = 0; i < heap.size(); ++i) out[i] = heap[i].second;
    return out;
}

}  // namespace nfrbf
