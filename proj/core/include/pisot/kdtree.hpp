#ifndef PISOT_KDTREE_HPP
#define PISOT_KDTREE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "pisot/error.hpp"

namespace pisot {

/* Static k-d tree for the block-max metric: coordinates are grouped into
 * blocks (one block per place), the distance is the maximum over blocks of
 * the Euclidean distance inside the block. */
class KdTree {
  public:
    static constexpr int kMaxDim = 16;

  private:
    struct Node {
        int lo, hi;          /* range in idx_ */
        int left = -1, right = -1;
        std::vector<double> bmin, bmax;
    };

    int dim_ = 0;
    std::vector<int> block_;
    int nblocks_ = 0;
    std::vector<double> const* x_ = nullptr;
    std::vector<int> idx_;
    std::vector<Node> nodes_;

    double coord(int p, int d) const { return (*x_)[static_cast<std::size_t>(p) * dim_ + d]; }

    int build(int lo, int hi)
    {
        Node nd;
        nd.lo = lo;
        nd.hi = hi;
        nd.bmin.assign(dim_, std::numeric_limits<double>::infinity());
        nd.bmax.assign(dim_, -std::numeric_limits<double>::infinity());
        for (int i = lo; i < hi; i++)
            for (int d = 0; d < dim_; d++) {
                nd.bmin[d] = std::min(nd.bmin[d], coord(idx_[i], d));
                nd.bmax[d] = std::max(nd.bmax[d], coord(idx_[i], d));
            }
        int id = static_cast<int>(nodes_.size());
        nodes_.push_back(nd);
        if (hi - lo > 8) {
            int split = 0;
            for (int d = 1; d < dim_; d++)
                if (nd.bmax[d] - nd.bmin[d] > nd.bmax[split] - nd.bmin[split])
                    split = d;
            int mid = (lo + hi) / 2;
            std::nth_element(idx_.begin() + lo, idx_.begin() + mid, idx_.begin() + hi,
                             [&](int a, int b) { return coord(a, split) < coord(b, split); });
            int l = build(lo, mid);
            int r = build(mid, hi);
            nodes_[id].left = l;
            nodes_[id].right = r;
        }
        return id;
    }

    double box_dist(Node const& nd, double const* q) const
    {
        double best = 0.0;
        double acc[kMaxDim] = {};
        for (int d = 0; d < dim_; d++) {
            double t = 0.0;
            if (q[d] < nd.bmin[d])
                t = nd.bmin[d] - q[d];
            else if (q[d] > nd.bmax[d])
                t = q[d] - nd.bmax[d];
            acc[block_[d]] += t * t;
        }
        for (int b = 0; b < nblocks_; b++)
            best = std::max(best, acc[b]);
        return std::sqrt(best);
    }

    void nearest(int n, double const* q, int skip, double& best, int& arg) const
    {
        Node const& nd = nodes_[n];
        if (box_dist(nd, q) >= best)
            return;
        if (nd.left < 0) {
            for (int i = nd.lo; i < nd.hi; i++) {
                if (idx_[i] == skip)
                    continue;
                double d = dist(q, idx_[i]);
                if (d < best) {
                    best = d;
                    arg = idx_[i];
                }
            }
            return;
        }
        double dl = box_dist(nodes_[nd.left], q), dr = box_dist(nodes_[nd.right], q);
        if (dl <= dr) {
            nearest(nd.left, q, skip, best, arg);
            nearest(nd.right, q, skip, best, arg);
        } else {
            nearest(nd.right, q, skip, best, arg);
            nearest(nd.left, q, skip, best, arg);
        }
    }

    void within(int n, double const* q, double r, std::vector<int>& out) const
    {
        Node const& nd = nodes_[n];
        if (box_dist(nd, q) > r)
            return;
        if (nd.left < 0) {
            for (int i = nd.lo; i < nd.hi; i++)
                if (dist(q, idx_[i]) <= r)
                    out.push_back(idx_[i]);
            return;
        }
        within(nd.left, q, r, out);
        within(nd.right, q, r, out);
    }

  public:
    /* x is point-major with dim entries per point; it must outlive the tree */
    KdTree(std::vector<double> const& x, int dim, std::vector<int> block)
        : dim_(dim), block_(std::move(block)), x_(&x)
    {
        if (dim > kMaxDim || static_cast<int>(block_.size()) != dim)
            fail(ErrorKind::cap, "k-d tree dimension out of range");
        nblocks_ = block_.empty() ? 0 : *std::max_element(block_.begin(), block_.end()) + 1;
        int n = dim ? static_cast<int>(x.size() / dim) : 0;
        idx_.resize(n);
        std::iota(idx_.begin(), idx_.end(), 0);
        if (n > 0)
            build(0, n);
    }

    int size() const { return static_cast<int>(idx_.size()); }

    double dist(double const* q, int p) const
    {
        double acc[kMaxDim] = {};
        for (int d = 0; d < dim_; d++) {
            double t = q[d] - coord(p, d);
            acc[block_[d]] += t * t;
        }
        double best = 0.0;
        for (int b = 0; b < nblocks_; b++)
            best = std::max(best, acc[b]);
        return std::sqrt(best);
    }

    /* index of the nearest point other than `skip`, and its distance;
     * -1 when there is none */
    std::pair<int, double> nearest(double const* q, int skip = -1) const
    {
        double best = std::numeric_limits<double>::infinity();
        int arg = -1;
        if (!nodes_.empty())
            nearest(0, q, skip, best, arg);
        return {arg, best};
    }

    std::vector<int> within(double const* q, double r) const
    {
        std::vector<int> out;
        if (!nodes_.empty())
            within(0, q, r, out);
        std::sort(out.begin(), out.end());
        return out;
    }
};

} // namespace pisot

#endif
