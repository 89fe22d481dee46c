#include <dact/error.hpp>
#include <dact/merkle.hpp>
#include <dact/mimc.hpp>

namespace dact {

const FieldElement& merkle_zero()
{
    static const FieldElement zero = field_from_tag("surfermonkey");
    return zero;
}

FieldElement fold_path(const FieldElement& leaf, const MerklePath& path)
{
    FieldElement node = leaf;
    for (std::size_t i = 0; i < path.elements.size(); ++i) {
        node = path.indices[i] == 0 ? mimc_hash2(node, path.elements[i]) : mimc_hash2(path.elements[i], node);
    }
    return node;
}

bool verify_path(const FieldElement& root, const FieldElement& leaf, const MerklePath& path)
{
    if (path.elements.empty() || path.elements.size() != path.indices.size()) return false;
    if (path.elements.size() > kMaxTreeDepth) return false;
    for (auto bit : path.indices) {
        if (bit > 1) return false;
    }
    return fold_path(leaf, path) == root;
}

MerkleTree::MerkleTree(int depth, std::size_t root_history) : depth_(depth)
{
    if (depth < 1 || depth > kMaxTreeDepth) fail(Errc::DepthOutOfRange, std::to_string(depth));
    if (root_history == 0) fail(Errc::PreconditionViolated, "root history must hold at least one root");
    zeros_.reserve(depth + 1);
    zeros_.push_back(merkle_zero());
    for (int i = 1; i <= depth; ++i) zeros_.push_back(mimc_hash2(zeros_[i - 1], zeros_[i - 1]));
    filled_.assign(zeros_.begin(), zeros_.begin() + depth);
    history_.resize(root_history);
    history_[0] = {zeros_[depth], 0};
    history_used_ = 1;
}

std::uint64_t MerkleTree::insert(const FieldElement& leaf)
{
    const std::uint64_t index = size();
    if (index >= capacity()) fail(Errc::TreeFull);

    std::uint64_t pos = index;
    FieldElement node = leaf;
    for (int level = 0; level < depth_; ++level) {
        if (pos % 2 == 0) {
            filled_[level] = node;
            node = mimc_hash2(node, zeros_[level]);
        } else {
            node = mimc_hash2(filled_[level], node);
        }
        pos /= 2;
    }
    leaves_.push_back(leaf);

    current_ = (current_ + 1) % history_.size();
    history_[current_] = {node, leaves_.size()};
    if (history_used_ < history_.size()) ++history_used_;
    return index;
}

bool MerkleTree::is_known_root(const FieldElement& root) const noexcept
{
    return size_at_root(root).has_value();
}

std::optional<std::uint64_t> MerkleTree::size_at_root(const FieldElement& root) const noexcept
{
    // Walk newest to oldest so a repeated root reports its latest size.
    for (std::size_t k = 0; k < history_used_; ++k) {
        const auto& e = history_[(current_ + history_.size() - k) % history_.size()];
        if (e.root == root) return e.size;
    }
    return std::nullopt;
}

MerklePath MerkleTree::path(std::uint64_t index, std::uint64_t prefix) const
{
    if (prefix > size()) fail(Errc::IndexUnknown, "prefix beyond tree size");
    if (index >= prefix) fail(Errc::IndexUnknown, std::to_string(index));

    MerklePath out;
    out.elements.reserve(depth_);
    out.indices.reserve(depth_);

    // Only the populated prefix of each level is materialised; everything to
    // the right is the zero subtree of that level.
    std::vector<FieldElement> level(leaves_.begin(), leaves_.begin() + static_cast<std::ptrdiff_t>(prefix));
    std::uint64_t pos = index;
    for (int l = 0; l < depth_; ++l) {
        std::uint64_t sibling = pos ^ 1;
        out.elements.push_back(sibling < level.size() ? level[sibling] : zeros_[l]);
        out.indices.push_back(static_cast<std::uint8_t>(pos & 1));
        if (l + 1 == depth_) break;

        std::vector<FieldElement> next((level.size() + 1) / 2);
        for (std::size_t i = 0; i < next.size(); ++i) {
            const FieldElement& right = 2 * i + 1 < level.size() ? level[2 * i + 1] : zeros_[l];
            next[i] = mimc_hash2(level[2 * i], right);
        }
        level = std::move(next);
        pos /= 2;
    }
    return out;
}

} // namespace dact
