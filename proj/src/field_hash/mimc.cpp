#include <dact/keccak.hpp>
#include <dact/mimc.hpp>
#include <dact/op_counter.hpp>

namespace dact {

const std::array<FieldElement, kMimcRounds>& mimc_round_constants()
{
    static const auto constants = [] {
        std::array<FieldElement, kMimcRounds> c{};
        ByteHash32 digest = detail::keccak256_uncounted(as_bytes("mimcsponge"));
        for (int i = 1; i < kMimcRounds; ++i) {
            digest = detail::keccak256_uncounted(digest.bytes);
            c[i] = FieldElement::from_bytes_reduce(digest.bytes);
        }
        c[0] = FieldElement{};
        c[kMimcRounds - 1] = FieldElement{};
        return c;
    }();
    return constants;
}

FeistelState mimc_feistel(FeistelState s, const FieldElement& key) noexcept
{
    const auto& c = mimc_round_constants();
    for (int i = 0; i < kMimcRounds; ++i) {
        FieldElement t = s.left + key + c[i];
        FieldElement t2 = t.square();
        FieldElement t5 = t2.square() * t;
        if (i < kMimcRounds - 1) {
            FieldElement next_left = s.right + t5;
            s.right = s.left;
            s.left = next_left;
        } else {
            s.right = s.right + t5;
        }
    }
    return s;
}

FieldElement mimc_sponge(std::span<const FieldElement> inputs, const FieldElement& key)
{
    op_counter().mimc += 1;
    FeistelState s;
    for (const auto& x : inputs) {
        s.left += x;
        s = mimc_feistel(s, key);
    }
    return s.left;
}

FieldElement mimc_hash2(const FieldElement& left, const FieldElement& right)
{
    const FieldElement in[2] = {left, right};
    return mimc_sponge(in, FieldElement{});
}

FieldElement field_from_tag(std::string_view tag)
{
    return FieldElement::from_bytes_reduce(detail::keccak256_uncounted(as_bytes(tag)).bytes);
}

} // namespace dact
