#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace zipfirm {

/// Dynamic Fenwick tree over non-negative slot weights. Supports append,
/// point update and sampling a slot with probability weight/total in
/// O(log n). Node sums drift under floating-point updates, so the tree is
/// rebuilt from its leaves every `kRebuildInterval` updates.
class WeightTree {
public:
    static constexpr std::uint64_t kRebuildInterval = 1u << 16;

    WeightTree() = default;
    explicit WeightTree(std::span<const double> weights);

    [[nodiscard]] std::size_t size() const noexcept { return leaves_.size(); }
    [[nodiscard]] bool empty() const noexcept { return leaves_.empty(); }
    [[nodiscard]] double weight(std::size_t slot) const { return leaves_.at(slot); }
    [[nodiscard]] double total() const noexcept { return prefix(leaves_.size()); }

    /// Sum of the first `count` leaves, read off the tree nodes.
    [[nodiscard]] double prefix(std::size_t count) const noexcept;

    std::size_t append(double weight);
    void set(std::size_t slot, double weight);

    /// First slot whose running prefix sum exceeds `target`. Slots with zero
    /// weight are never returned while target < total().
    [[nodiscard]] std::size_t find(double target) const;

    /// Draw a slot proportionally to weight; u must lie in [0, 1).
    [[nodiscard]] std::size_t sample(double u) const { return find(u * total()); }

    /// Recompute all nodes from the leaves.
    void rebuild();

    /// Raw state, exposed for snapshots. Restoring a tree from its own nodes
    /// keeps later floating-point sums bit-identical to an uninterrupted run.
    [[nodiscard]] std::span<const double> leaves() const noexcept { return leaves_; }
    [[nodiscard]] std::span<const double> nodes() const noexcept { return nodes_; }
    [[nodiscard]] std::uint64_t updates_since_rebuild() const noexcept { return updates_; }
    static WeightTree restore(std::vector<double> leaves, std::vector<double> nodes,
                              std::uint64_t updates_since_rebuild);

    friend bool operator==(const WeightTree&, const WeightTree&) = default;

private:
    void count_update();

    std::vector<double> leaves_;
    std::vector<double> nodes_;  // nodes_[i] covers leaves (i - lowbit(i+1), i]
    std::uint64_t updates_ = 0;
};

}  // namespace zipfirm
