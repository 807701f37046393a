#pragma once

// Word-sized modular arithmetic: a residue number system over primes just
// above 2^61, and kernel sizes of small integer matrices modulo q^N.

#include "rational.hpp"

#include <array>
#include <cstdint>
#include <mutex>
#include <span>
#include <vector>

namespace heis::residue {

using u64 = std::uint64_t;
using u128 = unsigned __int128;
using i64 = std::int64_t;

inline u64 mulmod(u64 a, u64 b, u64 p) { return static_cast<u64>(static_cast<u128>(a) * b % p); }
inline u64 addmod(u64 a, u64 b, u64 p)
{
    u64 s = a + b;
    return s >= p ? s - p : s;
}

// Primes p with 2^61 < p < 2^62, ascending; grown on demand.
inline std::vector<u64> word_primes(std::size_t count)
{
    static std::mutex mu;
    static std::vector<u64> primes;
    std::lock_guard lock(mu);
    BigInt cur = BigInt(1) << 61;
    if (!primes.empty())
        cur = BigInt(static_cast<unsigned long>(primes.back()));
    while (primes.size() < count) {
        mpz_nextprime(cur.get_mpz_t(), cur.get_mpz_t());
        primes.push_back(static_cast<u64>(cur.get_ui()));
    }
    return {primes.begin(), primes.begin() + static_cast<std::ptrdiff_t>(count)};
}

class RnsBasis
{
public:
    // Enough primes to represent integers in [0, 2^bits).
    explicit RnsBasis(std::size_t bits) : primes_(word_primes(bits / 61 + 1)) {}

    const std::vector<u64> &primes() const { return primes_; }
    std::size_t size() const { return primes_.size(); }

    // Incremental CRT (Garner): the unique value in [0, prod p_i).
    BigInt reconstruct(std::span<const u64> residues) const
    {
        BigInt x = 0;
        BigInt M = 1;
        for (std::size_t i = 0; i < primes_.size(); ++i) {
            const BigInt p(static_cast<unsigned long>(primes_[i]));
            BigInt diff = BigInt(static_cast<unsigned long>(residues[i])) - x;
            BigInt Minv;
            BigInt Mp = M % p;
            mpz_invert(Minv.get_mpz_t(), Mp.get_mpz_t(), p.get_mpz_t());
            BigInt t = diff * Minv;
            mpz_fdiv_r(t.get_mpz_t(), t.get_mpz_t(), p.get_mpz_t());
            x += M * t;
            M *= p;
        }
        return x;
    }

private:
    std::vector<u64> primes_;
};

inline i64 mod(i64 a, i64 m)
{
    i64 r = a % m;
    return r < 0 ? r + m : r;
}

inline i64 inverse_mod(i64 a, i64 m)
{
    i64 g = m, x = 0, x1 = 1, a1 = mod(a, m);
    while (a1) {
        i64 t = g / a1;
        std::swap(g, a1);
        a1 -= t * g;
        std::swap(x, x1);
        x1 -= t * x;
    }
    if (g != 1)
        throw std::domain_error("inverse_mod: not a unit");
    return mod(x, m);
}

inline i64 ipow(i64 b, int e)
{
    i64 r = 1;
    while (e-- > 0)
        r *= b;
    return r;
}

// q-adic valuation of a residue mod q^N, capped at N.
inline int valuation_capped(i64 x, i64 q, int N)
{
    if (x == 0)
        return N;
    int v = 0;
    while (v < N && x % q == 0) {
        x /= q;
        ++v;
    }
    return v;
}

constexpr int kMaxDim = 6;
using SmallMatrix = std::array<i64, kMaxDim * kMaxDim>;

/// log_q #{a in (Z/q^N)^dim : M a = 0}. The matrix is destroyed; entries
/// must be reduced mod Q < 2^31 so that products fit in 64 bits.
/// Elimination with pivots of minimal valuation yields the elementary
/// divisors q^{v_i}; the kernel has size prod q^{min(v_i, N)}.
inline int kernel_exponent(SmallMatrix &m, int dim, i64 q, int N, i64 Q)
{
    auto at = [&](int i, int j) -> i64 & { return m[i * kMaxDim + j]; };
    int total = 0;
    for (int step = 0; step < dim; ++step) {
        int best = N + 1, bi = step, bj = step;
        for (int i = step; i < dim && best > 0; ++i)
            for (int j = step; j < dim; ++j) {
                int v = valuation_capped(at(i, j), q, N);
                if (v < best) {
                    best = v;
                    bi = i;
                    bj = j;
                    if (v == 0)
                        break;
                }
            }
        if (best >= N)
            return total + N * (dim - step);
        if (bi != step)
            for (int j = 0; j < dim; ++j)
                std::swap(at(step, j), at(bi, j));
        if (bj != step)
            for (int i = 0; i < dim; ++i)
                std::swap(at(i, step), at(i, bj));
        total += best;
        const i64 qv = ipow(q, best);
        const i64 uinv = inverse_mod(at(step, step) / qv, Q);
        for (int i = step + 1; i < dim; ++i) {
            if (at(i, step) == 0)
                continue;
            const i64 f = (at(i, step) / qv) * uinv % Q;
            for (int j = step; j < dim; ++j)
                at(i, j) = mod(at(i, j) - f * at(step, j) % Q, Q);
        }
        for (int j = step + 1; j < dim; ++j) {
            if (at(step, j) == 0)
                continue;
            const i64 f = (at(step, j) / qv) * uinv % Q;
            for (int i = step; i < dim; ++i)
                at(i, j) = mod(at(i, j) - f * at(i, step) % Q, Q);
        }
    }
    return total;
}

} // namespace heis::residue
