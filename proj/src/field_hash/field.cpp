#include <dact/field.hpp>

#include <stdexcept>

namespace dact {
namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;
using Limbs = FieldElement::Limbs;

constexpr Limbs P = {0x43e1f593f0000001ULL, 0x2833e84879b97091ULL,
                     0xb85045b68181585dULL, 0x30644e72e131a029ULL};

// -p^-1 mod 2^64 by Newton iteration.
constexpr u64 compute_inv()
{
    u64 x = 1;
    for (int i = 0; i < 6; ++i) x *= 2 - P[0] * x;
    return ~x + 1;
}
constexpr u64 INV = compute_inv();

constexpr bool geq(const Limbs& a, const Limbs& b)
{
    for (int i = 3; i >= 0; --i) {
        if (a[i] != b[i]) return a[i] > b[i];
    }
    return true;
}

constexpr u64 sub_in_place(Limbs& a, const Limbs& b)
{
    u64 borrow = 0;
    for (int i = 0; i < 4; ++i) {
        u128 d = static_cast<u128>(a[i]) - b[i] - borrow;
        a[i] = static_cast<u64>(d);
        borrow = static_cast<u64>(d >> 64) & 1;
    }
    return borrow;
}

constexpr u64 add_in_place(Limbs& a, const Limbs& b)
{
    u64 carry = 0;
    for (int i = 0; i < 4; ++i) {
        u128 s = static_cast<u128>(a[i]) + b[i] + carry;
        a[i] = static_cast<u64>(s);
        carry = static_cast<u64>(s >> 64);
    }
    return carry;
}

constexpr Limbs add_mod(Limbs a, const Limbs& b)
{
    // p < 2^254, so the sum of two reduced values never carries out.
    add_in_place(a, b);
    if (geq(a, P)) sub_in_place(a, P);
    return a;
}

// R^2 mod p with R = 2^256, by doubling 1 five hundred and twelve times.
constexpr Limbs compute_r2()
{
    Limbs r = {1, 0, 0, 0};
    for (int i = 0; i < 512; ++i) r = add_mod(r, r);
    return r;
}
constexpr Limbs R2 = compute_r2();

Limbs mont_mul(const Limbs& a, const Limbs& b) noexcept
{
    u64 t[6] = {0, 0, 0, 0, 0, 0};
    for (int i = 0; i < 4; ++i) {
        u64 carry = 0;
        for (int j = 0; j < 4; ++j) {
            u128 cur = static_cast<u128>(a[j]) * b[i] + t[j] + carry;
            t[j] = static_cast<u64>(cur);
            carry = static_cast<u64>(cur >> 64);
        }
        u128 top = static_cast<u128>(t[4]) + carry;
        t[4] = static_cast<u64>(top);
        t[5] = static_cast<u64>(top >> 64);

        u64 m = t[0] * INV;
        u128 cur = static_cast<u128>(m) * P[0] + t[0];
        carry = static_cast<u64>(cur >> 64);
        for (int j = 1; j < 4; ++j) {
            cur = static_cast<u128>(m) * P[j] + t[j] + carry;
            t[j - 1] = static_cast<u64>(cur);
            carry = static_cast<u64>(cur >> 64);
        }
        top = static_cast<u128>(t[4]) + carry;
        t[3] = static_cast<u64>(top);
        t[4] = t[5] + static_cast<u64>(top >> 64);
    }
    Limbs r = {t[0], t[1], t[2], t[3]};
    if (t[4] != 0 || geq(r, P)) sub_in_place(r, P);
    return r;
}

Limbs reduce_256(Limbs v) noexcept
{
    while (geq(v, P)) sub_in_place(v, P);
    return v;
}

} // namespace

const Limbs FieldElement::kModulus = P;

FieldElement FieldElement::from_limbs(const Limbs& plain) noexcept
{
    FieldElement f;
    f.m_ = mont_mul(reduce_256(plain), R2);
    return f;
}

FieldElement FieldElement::from_u64(std::uint64_t v) noexcept
{
    return from_limbs({v, 0, 0, 0});
}

static Limbs limbs_from_be(ByteView be)
{
    Limbs v{};
    std::size_t n = be.size();
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t bit = 8 * (n - 1 - i);
        v[bit / 64] |= static_cast<u64>(be[i]) << (bit % 64);
    }
    return v;
}

std::optional<FieldElement> FieldElement::from_canonical(ByteView be32)
{
    if (be32.size() != 32) return std::nullopt;
    Limbs v = limbs_from_be(be32);
    if (geq(v, P)) return std::nullopt;
    return from_limbs(v);
}

FieldElement FieldElement::from_bytes_reduce(ByteView be)
{
    if (be.size() > 32) throw std::invalid_argument("field input longer than 32 bytes");
    return from_limbs(limbs_from_be(be));
}

FieldElement FieldElement::from_hex(std::string_view hex)
{
    Bytes raw = dact::from_hex(hex);
    if (raw.size() != 32) throw std::invalid_argument("field element hex must be 32 bytes");
    auto f = from_canonical(raw);
    if (!f) throw std::invalid_argument("field element not canonical (>= p)");
    return *f;
}

Limbs FieldElement::to_limbs() const noexcept
{
    return mont_mul(m_, {1, 0, 0, 0});
}

std::array<std::uint8_t, 32> FieldElement::to_bytes() const noexcept
{
    Limbs v = to_limbs();
    std::array<std::uint8_t, 32> out{};
    for (int i = 0; i < 32; ++i) {
        int bit = 8 * (31 - i);
        out[i] = static_cast<std::uint8_t>(v[bit / 64] >> (bit % 64));
    }
    return out;
}

FieldElement FieldElement::operator+(const FieldElement& o) const noexcept
{
    FieldElement r;
    r.m_ = add_mod(m_, o.m_);
    return r;
}

FieldElement FieldElement::operator-(const FieldElement& o) const noexcept
{
    FieldElement r;
    r.m_ = m_;
    if (sub_in_place(r.m_, o.m_)) add_in_place(r.m_, P);
    return r;
}

FieldElement FieldElement::operator-() const noexcept
{
    return FieldElement{} - *this;
}

FieldElement FieldElement::operator*(const FieldElement& o) const noexcept
{
    FieldElement r;
    r.m_ = mont_mul(m_, o.m_);
    return r;
}

FieldElement FieldElement::pow(std::uint64_t e) const noexcept
{
    FieldElement result = from_u64(1);
    FieldElement base = *this;
    while (e) {
        if (e & 1) result *= base;
        base = base.square();
        e >>= 1;
    }
    return result;
}

FieldElement FieldElement::inverse() const noexcept
{
    // Fermat: a^(p-2).
    Limbs e = P;
    e[0] -= 2;
    FieldElement result = from_u64(1);
    for (int i = 3; i >= 0; --i) {
        for (int bit = 63; bit >= 0; --bit) {
            result = result.square();
            if ((e[i] >> bit) & 1) result *= *this;
        }
    }
    return result;
}

bool operator<(const FieldElement& a, const FieldElement& b) noexcept
{
    Limbs x = a.to_limbs(), y = b.to_limbs();
    for (int i = 3; i >= 0; --i) {
        if (x[i] != y[i]) return x[i] < y[i];
    }
    return false;
}

} // namespace dact
