#include "hydra/signed_permutation.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

namespace hydra {

namespace {

constexpr int kMaxSize = 16; // 2^17 * 17! > 2^64

void check_size(int n) {
    if (n < 1)
        throw DimensionError("signed permutation size must be positive");
    if (n > kMaxSize)
        throw DimensionError("signed permutation size above 16 overflows the 64-bit codebook index");
}

// Sign flip as a pure sign-bit toggle: exact for every bit pattern.
double flip_sign(double x) {
    return std::bit_cast<double>(std::bit_cast<std::uint64_t>(x) ^ 0x8000000000000000ull);
}

std::uint64_t factorial(int n) {
    std::uint64_t f = 1;
    for (int i = 2; i <= n; ++i)
        f *= static_cast<std::uint64_t>(i);
    return f;
}

} // namespace

SignedPermutation SignedPermutation::identity(int n) {
    check_size(n);
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    return SignedPermutation(std::move(perm), std::vector<int>(static_cast<std::size_t>(n), 1));
}

SignedPermutation SignedPermutation::from_parts(std::vector<int> perm, std::vector<int> signs) {
    check_size(static_cast<int>(perm.size()));
    if (perm.size() != signs.size())
        throw InvalidElementError("perm and signs must have the same length");
    const int n = static_cast<int>(perm.size());
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int p : perm) {
        if (p < 0 || p >= n || seen[static_cast<std::size_t>(p)])
            throw InvalidElementError("perm is not a bijection on [0, n)");
        seen[static_cast<std::size_t>(p)] = true;
    }
    for (int s : signs) {
        if (s != 1 && s != -1)
            throw InvalidElementError("signs must be +1 or -1");
    }
    return SignedPermutation(std::move(perm), std::move(signs));
}

void SignedPermutation::apply(std::span<const double> in, std::span<double> out) const {
    const std::size_t n = perm_.size();
    if (in.size() != n || out.size() != n)
        throw DimensionError("apply: vector length does not match permutation size");
    for (std::size_t i = 0; i < n; ++i) {
        const double v = in[static_cast<std::size_t>(perm_[i])];
        out[i] = signs_[i] < 0 ? flip_sign(v) : v;
    }
}

std::vector<double> SignedPermutation::apply(std::span<const double> in) const {
    std::vector<double> out(perm_.size());
    apply(in, out);
    return out;
}

SignedPermutation SignedPermutation::inverse() const {
    const std::size_t n = perm_.size();
    std::vector<int> perm(n), signs(n);
    // matrix transpose: entry (i, perm(i)) moves to (perm(i), i)
    for (std::size_t i = 0; i < n; ++i) {
        perm[static_cast<std::size_t>(perm_[i])] = static_cast<int>(i);
        signs[static_cast<std::size_t>(perm_[i])] = signs_[i];
    }
    return SignedPermutation(std::move(perm), std::move(signs));
}

SignedPermutation compose(const SignedPermutation& a, const SignedPermutation& b) {
    if (a.size() != b.size())
        throw DimensionError("compose: size mismatch");
    const int n = a.size();
    std::vector<int> perm(static_cast<std::size_t>(n)), signs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        perm[static_cast<std::size_t>(i)] = b.perm(a.perm(i));
        signs[static_cast<std::size_t>(i)] = a.sign(i) * b.sign(a.perm(i));
    }
    return SignedPermutation::from_parts(std::move(perm), std::move(signs));
}

std::uint64_t codebook_size(int n) {
    check_size(n);
    return factorial(n) << n;
}

std::uint64_t rank(const SignedPermutation& sp) {
    const int n = sp.size();
    // Lehmer code of the one-line form gives the lexicographic rank.
    std::uint64_t lex = 0;
    for (int i = 0; i < n; ++i) {
        int smaller_right = 0;
        for (int j = i + 1; j < n; ++j)
            if (sp.perm(j) < sp.perm(i))
                ++smaller_right;
        lex += static_cast<std::uint64_t>(smaller_right) * factorial(n - 1 - i);
    }
    std::uint64_t bits = 0;
    for (int i = 0; i < n; ++i)
        bits = (bits << 1) | (sp.sign(i) < 0 ? 1u : 0u);
    return (lex << n) | bits;
}

SignedPermutation unrank(std::uint64_t index, int n) {
    check_size(n);
    if (index >= codebook_size(n))
        throw RangeError("codebook index out of range");
    const std::uint64_t bits = index & ((std::uint64_t{1} << n) - 1);
    std::uint64_t lex = index >> n;

    std::vector<int> pool(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), 0);
    std::vector<int> perm, signs;
    perm.reserve(static_cast<std::size_t>(n));
    signs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const std::uint64_t f = factorial(n - 1 - i);
        const auto digit = static_cast<std::size_t>(lex / f);
        lex %= f;
        perm.push_back(pool[digit]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(digit));
        // bit i of the mask, most significant first, selects sign(i) = -1
        signs.push_back((bits >> (n - 1 - i)) & 1u ? -1 : 1);
    }
    return SignedPermutation::from_parts(std::move(perm), std::move(signs));
}

} // namespace hydra
