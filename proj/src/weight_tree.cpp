#include "zipfirm/weight_tree.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "zipfirm/error.hpp"

namespace zipfirm {
namespace {

constexpr std::size_t lowbit(std::size_t j) noexcept { return j & (~j + 1); }

void check_weight(double w) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
        throw Error(ErrorKind::invariant, "weight tree: invalid weight " + std::to_string(w));
    }
}

}  // namespace

WeightTree::WeightTree(std::span<const double> weights)
    : leaves_(weights.begin(), weights.end()) {
    for (double w : leaves_) check_weight(w);
    rebuild();
}

double WeightTree::prefix(std::size_t count) const noexcept {
    double sum = 0.0;
    for (std::size_t j = count; j > 0; j -= lowbit(j)) sum += nodes_[j - 1];
    return sum;
}

std::size_t WeightTree::append(double weight) {
    check_weight(weight);
    leaves_.push_back(weight);
    const std::size_t j = leaves_.size();
    double node = weight;
    for (std::size_t child = 1; child < lowbit(j); child <<= 1) node += nodes_[j - child - 1];
    nodes_.push_back(node);
    return j - 1;
}

void WeightTree::set(std::size_t slot, double weight) {
    check_weight(weight);
    const double delta = weight - leaves_.at(slot);
    leaves_[slot] = weight;
    if (delta == 0.0) return;
    for (std::size_t j = slot + 1; j <= leaves_.size(); j += lowbit(j)) nodes_[j - 1] += delta;
    count_update();
}

std::size_t WeightTree::find(double target) const {
    const std::size_t n = leaves_.size();
    if (n == 0) throw Error(ErrorKind::invariant, "weight tree: sampling from empty tree");
    std::size_t pos = 0;
    for (std::size_t step = std::bit_floor(n); step > 0; step >>= 1) {
        const std::size_t next = pos + step;
        if (next <= n && nodes_[next - 1] <= target) {
            pos = next;
            target -= nodes_[next - 1];
        }
    }
    if (pos < n && leaves_[pos] > 0.0) return pos;
    // Rounding pushed the search onto an empty slot or past the end.
    for (std::size_t i = pos < n ? pos : n; i < n; ++i) {
        if (leaves_[i] > 0.0) return i;
    }
    for (std::size_t i = pos < n ? pos : n; i-- > 0;) {
        if (leaves_[i] > 0.0) return i;
    }
    throw Error(ErrorKind::invariant, "weight tree: total weight is zero");
}

void WeightTree::rebuild() {
    nodes_ = leaves_;
    const std::size_t n = nodes_.size();
    for (std::size_t j = 1; j <= n; ++j) {
        const std::size_t parent = j + lowbit(j);
        if (parent <= n) nodes_[parent - 1] += nodes_[j - 1];
    }
    updates_ = 0;
}

WeightTree WeightTree::restore(std::vector<double> leaves, std::vector<double> nodes,
                               std::uint64_t updates_since_rebuild) {
    if (leaves.size() != nodes.size()) {
        throw Error(ErrorKind::snapshot_format, "weight tree: leaf/node count mismatch");
    }
    for (double w : leaves) check_weight(w);
    WeightTree tree;
    tree.leaves_ = std::move(leaves);
    tree.nodes_ = std::move(nodes);
    tree.updates_ = updates_since_rebuild;
    return tree;
}

void WeightTree::count_update() {
    if (++updates_ >= kRebuildInterval) rebuild();
}

}  // namespace zipfirm
