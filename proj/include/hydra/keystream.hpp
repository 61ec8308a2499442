#pragma once

#include <cstdint>

#include "hydra/errors.hpp"

namespace hydra {

/// Secret key of the coding scheme: the p parameter of the Fibonacci
/// p-sequence plus an additive offset applied to the packet sequence number
/// before the sequence is evaluated.
struct PSequenceKey {
    std::uint32_t p = 1;
    std::uint64_t seed = 0;
};

/// F_p(n) mod m for the Fibonacci p-sequence
///   F_p(n) = 0 for n < 0, F_p(0) = 1, F_p(n) = F_p(n-1) + F_p(n-p-1).
/// Evaluated iteratively with a sliding window of p+1 residues; every
/// intermediate value stays below m, so no big integers are involved.
/// Requires m >= 2.
std::uint64_t fib_p_mod(std::uint32_t p, std::int64_t n, std::uint64_t m);

/// Smallest L > 0 such that the state vector (F_p(n), ..., F_p(n+p)) mod m
/// returns to its value at n = 0; then F_p(n+L) = F_p(n) (mod m) for all
/// n >= 0. Throws NotPeriodicError when the initial state never recurs
/// within m^(p+1)+1 steps (the recursion is not invertible mod m, e.g.
/// p = 0 with even m).
std::uint64_t fib_p_period(std::uint32_t p, std::uint64_t m);

/// Codebook index for one packet: fib_p_mod(key.p, key.seed + seq, size).
/// Stateless in seq, which is what keeps decoding loss-resilient: the
/// receiver reconstructs the index of any packet from its sequence number
/// alone.
std::uint64_t select_index(const PSequenceKey& key, std::uint64_t seq, std::uint64_t size);

} // namespace hydra
