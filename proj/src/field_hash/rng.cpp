#include <dact/rng.hpp>

#include <algorithm>

namespace dact {

SeededRng::SeededRng(std::uint64_t root_seed)
{
    Bytes buf(as_bytes("dact.rng.root").begin(), as_bytes("dact.rng.root").end());
    auto w = be_word(root_seed);
    append(buf, w);
    key_ = detail::keccak256_uncounted(buf);
}

SeededRng SeededRng::child(std::string_view label) const
{
    Bytes buf(key_.bytes.begin(), key_.bytes.end());
    append(buf, as_bytes(label));
    return SeededRng(detail::keccak256_uncounted(buf));
}

void SeededRng::fill(std::span<std::uint8_t> out)
{
    std::size_t off = 0;
    while (off < out.size()) {
        if (used_ == block_.size()) {
            Bytes buf(key_.bytes.begin(), key_.bytes.end());
            append(buf, be_word(counter_++));
            block_ = detail::keccak256_uncounted(buf).bytes;
            used_ = 0;
        }
        std::size_t n = std::min(out.size() - off, block_.size() - used_);
        std::copy_n(block_.begin() + used_, n, out.begin() + off);
        used_ += n;
        off += n;
    }
}

std::uint64_t SeededRng::next_u64()
{
    std::array<std::uint8_t, 8> b{};
    fill(b);
    std::uint64_t v = 0;
    for (auto x : b) v = v << 8 | x;
    return v;
}

std::uint64_t SeededRng::uniform(std::uint64_t bound)
{
    // Rejection sampling removes modulo bias.
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do {
        v = next_u64();
    } while (v >= limit);
    return v % bound;
}

FieldElement random_field_31(SeededRng& rng)
{
    std::array<std::uint8_t, 31> b{};
    rng.fill(b);
    return FieldElement::from_bytes_reduce(b);
}

} // namespace dact
