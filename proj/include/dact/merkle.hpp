#pragma once

#include <dact/field.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace dact {

inline constexpr int kMaxTreeDepth = 32;
inline constexpr std::size_t kMixerRootHistory = 100;

/// Empty-leaf constant: keccak256("surfermonkey") mod p.
const FieldElement& merkle_zero();

struct MerklePath {
    std::vector<FieldElement> elements;
    std::vector<std::uint8_t> indices; // 0: the running node is the left child

    friend bool operator==(const MerklePath&, const MerklePath&) = default;
};

/// Folds `leaf` up through the path with mimc_hash2.
FieldElement fold_path(const FieldElement& leaf, const MerklePath& path);

/// False on any mismatch, including malformed paths (length or index bits).
bool verify_path(const FieldElement& root, const FieldElement& leaf, const MerklePath& path);

/// Append-only incremental Merkle tree (filled-subtree caching) with a ring
/// buffer of recent roots.
class MerkleTree {
public:
    /// Throws DepthOutOfRange unless 1 <= depth <= 32. Charges `depth` mimc
    /// units for the zero-subtree table.
    explicit MerkleTree(int depth, std::size_t root_history = kMixerRootHistory);

    int depth() const noexcept { return depth_; }
    std::uint64_t capacity() const noexcept { return std::uint64_t{1} << depth_; }
    std::uint64_t size() const noexcept { return leaves_.size(); }
    const std::vector<FieldElement>& leaves() const noexcept { return leaves_; }
    const FieldElement& root() const noexcept { return history_[current_].root; }
    const FieldElement& zero(int level) const { return zeros_.at(level); }

    /// Returns the index the leaf landed on. Exactly `depth` mimc units.
    std::uint64_t insert(const FieldElement& leaf);

    bool is_known_root(const FieldElement& root) const noexcept;

    /// Leaf count at the moment `root` was current, if it is still in history.
    std::optional<std::uint64_t> size_at_root(const FieldElement& root) const noexcept;

    /// Path of leaf `index` against the current root. Throws IndexUnknown.
    MerklePath path(std::uint64_t index) const { return path(index, size()); }

    /// Path against the root of the first `prefix` leaves.
    MerklePath path(std::uint64_t index, std::uint64_t prefix) const;

private:
    struct HistoryEntry {
        FieldElement root;
        std::uint64_t size = 0;
    };

    int depth_;
    std::vector<FieldElement> zeros_;
    std::vector<FieldElement> filled_;
    std::vector<FieldElement> leaves_;
    std::vector<HistoryEntry> history_;
    std::size_t current_ = 0;
    std::size_t history_used_ = 0;
};

} // namespace dact
