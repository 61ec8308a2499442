#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hydra/errors.hpp"

namespace hydra {

/// A signed permutation of n elements: the compact form of an n x n matrix
/// with exactly one nonzero entry (+1 or -1) per row and per column.
///
/// Convention used everywhere in this project:
///   apply(v)[i] = sign(i) * v[perm(i)]
/// i.e. output position i reads input position perm(i).
class SignedPermutation {
public:
    /// Identity element of size n.
    static SignedPermutation identity(int n);

    /// Builds from one-line permutation form plus signs; validates both.
    static SignedPermutation from_parts(std::vector<int> perm, std::vector<int> signs);

    int size() const { return static_cast<int>(perm_.size()); }
    int perm(int i) const { return perm_[static_cast<std::size_t>(i)]; }
    int sign(int i) const { return signs_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& perm_vector() const { return perm_; }
    const std::vector<int>& sign_vector() const { return signs_; }

    /// out[i] = sign(i) * in[perm(i)]. Sign flips are done on the bit level,
    /// so the result is a byte-exact reorder of the input (no rounding, and
    /// -0.0 / subnormals / NaN payloads survive a flip-and-flip-back).
    void apply(std::span<const double> in, std::span<double> out) const;
    std::vector<double> apply(std::span<const double> in) const;

    /// Group inverse; its matrix is the transpose of this one's.
    SignedPermutation inverse() const;

    bool operator==(const SignedPermutation&) const = default;

private:
    SignedPermutation(std::vector<int> perm, std::vector<int> signs)
        : perm_(std::move(perm)), signs_(std::move(signs)) {}

    std::vector<int> perm_;
    std::vector<int> signs_; // each +1 or -1
};

/// matrix(compose(a, b)) = matrix(a) * matrix(b), so
/// apply(compose(a, b), v) == apply(a, apply(b, v)).
SignedPermutation compose(const SignedPermutation& a, const SignedPermutation& b);

/// Number of signed permutations of size n: 2^n * n!.
/// Supported range is 1 <= n <= 16 (the count overflows 64 bits beyond that).
std::uint64_t codebook_size(int n);

/// Index of sp in the canonical order. The order is
///   index = lexrank(perm) * 2^n + signbits
/// where signbits bit i, read most-significant-first, is set iff sign(i) = -1.
std::uint64_t rank(const SignedPermutation& sp);

/// Inverse of rank: the index-th element of the canonical order.
SignedPermutation unrank(std::uint64_t index, int n);

} // namespace hydra
