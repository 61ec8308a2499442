#include "hydra/keystream.hpp"

#include <limits>
#include <vector>

namespace hydra {

namespace {

// m^e saturated at uint64 max.
std::uint64_t saturating_pow(std::uint64_t m, std::uint32_t e) {
    std::uint64_t r = 1;
    for (std::uint32_t i = 0; i < e; ++i) {
        if (r > std::numeric_limits<std::uint64_t>::max() / m)
            return std::numeric_limits<std::uint64_t>::max();
        r *= m;
    }
    return r;
}

} // namespace

std::uint64_t fib_p_mod(std::uint32_t p, std::int64_t n, std::uint64_t m) {
    if (m < 2)
        throw ModulusError("fib_p_mod: modulus must be at least 2");
    if (n < 0)
        return 0;
    // w[k mod (p+1)] holds F(k); the slot about to be overwritten at step k
    // still holds F(k-p-1), which is exactly the second recursion term.
    // Slots start at 0 = F(negative index).
    const std::size_t width = static_cast<std::size_t>(p) + 1;
    std::vector<std::uint64_t> w(width, 0);
    w[0] = 1 % m;
    for (std::int64_t k = 1; k <= n; ++k) {
        const std::size_t slot = static_cast<std::size_t>(k % static_cast<std::int64_t>(width));
        const std::size_t prev = static_cast<std::size_t>((k - 1) % static_cast<std::int64_t>(width));
        w[slot] = (w[prev] + w[slot]) % m;
    }
    return w[static_cast<std::size_t>(n % static_cast<std::int64_t>(width))];
}

std::uint64_t fib_p_period(std::uint32_t p, std::uint64_t m) {
    if (m < 2)
        throw ModulusError("fib_p_period: modulus must be at least 2");
    const std::size_t width = static_cast<std::size_t>(p) + 1;

    // initial state (F(0), ..., F(p)) mod m
    std::vector<std::uint64_t> initial(width);
    for (std::size_t i = 0; i < width; ++i)
        initial[i] = fib_p_mod(p, static_cast<std::int64_t>(i), m);

    // There are at most m^(p+1) distinct states, so if the initial state has
    // not recurred after that many steps the sequence is pre-periodic only.
    const std::uint64_t limit = saturating_pow(m, p + 1);

    std::vector<std::uint64_t> state = initial;
    for (std::uint64_t step = 1; step <= limit + 1; ++step) {
        // advance: F(n+p+1) = F(n+p) + F(n)
        const std::uint64_t next = (state[width - 1] + state[0]) % m;
        for (std::size_t i = 0; i + 1 < width; ++i)
            state[i] = state[i + 1];
        state[width - 1] = next;
        if (state == initial)
            return step;
    }
    throw NotPeriodicError("fib_p_period: sequence is not purely periodic for this modulus");
}

std::uint64_t select_index(const PSequenceKey& key, std::uint64_t seq, std::uint64_t size) {
    if (size == 0)
        throw ModulusError("select_index: codebook size must be positive");
    if (size == 1)
        return 0;
    const std::uint64_t n = key.seed + seq;
    if (n < key.seed || n > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
        throw RangeError("select_index: evaluation index seed + seq is too large");
    return fib_p_mod(key.p, static_cast<std::int64_t>(n), size);
}

} // namespace hydra
