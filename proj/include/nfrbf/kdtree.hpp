#pragma once

#include <vector>

#include "nfrbf/mesh.hpp"

namespace nfrbf {

/// Static k-d tree over 2-D or 3-D points.
///
/// Neighbours are ranked by (squared distance, index), so equidistant candidates resolve to
/// the lower index and results are reproducible.
class KdTree {
public:
    KdTree() = default;
    KdTree(std::vector<Vec3> points, int dim);

    /// The k nearest points to `query`, closest first.
    std::vector<int> nearest(const Vec3& query, std::size_t k) const;

    std::size_t size() const { return points_.size(); }
    const Vec3& point(int i) const { return points_[i]; }

private:
    struct Node {
        int lo = 0, hi = 0;  // index range into order_
        int axis = -1;       // -1 for leaves
        double split = 0.0;
        int left = -1, right = -1;
    };

    int build(int lo, int hi, int depth);
    void search(int node, const Vec3& q, std::size_t k, std::vector<std::pair<double, int>>& heap) const;

    std::vector<Vec3> points_;
    std::vector<int> order_;
    std::vector<Node> nodes_;
    int dim_ = 2;
    int root_ = -1;
};

}  // namespace nfrbf
