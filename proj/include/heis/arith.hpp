#pragma once

// Scalar number theory: Bernoulli numbers, the quadratic character of an
// imaginary quadratic field, class numbers, Hilbert symbols.

#include "rational.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace heis {

inline bool is_prime(long long n)
{
    if (n < 2)
        return false;
    for (long long d = 2; d * d <= n; ++d)
        if (n % d == 0)
            return false;
    return true;
}

// Ascending prime factorisation of |n|, n != 0.
inline std::vector<std::pair<long long, int>> factorize(long long n)
{
    if (n == 0)
        throw std::domain_error("factorize: zero");
    std::vector<std::pair<long long, int>> out;
    unsigned long long m = static_cast<unsigned long long>(n < 0 ? -n : n);
    for (unsigned long long d = 2; d * d <= m; ++d) {
        int e = 0;
        while (m % d == 0) {
            m /= d;
            ++e;
        }
        if (e)
            out.emplace_back(static_cast<long long>(d), e);
    }
    if (m > 1)
        out.emplace_back(static_cast<long long>(m), 1);
    return out;
}

inline bool is_squarefree(long long n)
{
    for (auto [p, e] : factorize(n))
        if (e > 1)
            return false;
    return true;
}

inline long floor_mod(long long a, long long m)
{
    long long r = a % m;
    return static_cast<long>(r < 0 ? r + m : r);
}

// ---------------------------------------------------------------------------
// Bernoulli numbers, B_1 = -1/2.

namespace detail {
struct BernoulliTable
{
    std::mutex mu;
    std::vector<Rational> values{Rational(1)};
};
inline BernoulliTable &bernoulli_table()
{
    static BernoulliTable t;
    return t;
}
} // namespace detail

inline Rational bernoulli(unsigned n)
{
    auto &t = detail::bernoulli_table();
    std::lock_guard lock(t.mu);
    while (t.values.size() <= n) {
        const unsigned m = static_cast<unsigned>(t.values.size());
        if (m > 1 && (m & 1U)) {
            t.values.emplace_back(0);
            continue;
        }
        // sum_{j=0}^{m} C(m+1, j) B_j = 0
        Rational s;
        for (unsigned j = 0; j < m; ++j)
            if (!t.values[j].is_zero())
                s += Rational(binomial(m + 1, j)) * t.values[j];
        t.values.push_back(-s / Rational(static_cast<long>(m) + 1));
    }
    return t.values[n];
}

inline Rational bernoulli_polynomial(unsigned n, const Rational &x)
{
    Rational acc;
    Rational xp(1);
    // Horner-free expansion: sum_k C(n,k) B_k x^{n-k}, accumulated from k = n down.
    for (unsigned k = n + 1; k-- > 0;) {
        acc += Rational(binomial(n, k)) * bernoulli(k) * xp;
        xp *= x;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Quadratic characters.

inline bool is_fundamental_discriminant(long long d)
{
    if (d == 0 || d == 1)
        return false;
    if (floor_mod(d, 4) == 1)
        return is_squarefree(d);
    if (floor_mod(d, 4) != 0)
        return false;
    long long m = d / 4;
    long r = floor_mod(m, 4);
    return (r == 2 || r == 3) && is_squarefree(m);
}

/// The Kronecker character a -> (disc / a) attached to a negative
/// fundamental discriminant.
class QuadraticCharacter
{
public:
    explicit QuadraticCharacter(long long fundamental_discriminant)
        : disc_(fundamental_discriminant)
    {
        if (disc_ >= 0 || !is_fundamental_discriminant(disc_))
            throw std::invalid_argument("QuadraticCharacter: " + std::to_string(disc_)
                                        + " is not a negative fundamental discriminant");
    }

    long long fundamental_discriminant() const { return disc_; }
    long long conductor() const { return -disc_; }

    int operator()(long long a) const { return mpz_si_kronecker(static_cast<long>(disc_), BigInt(static_cast<long>(a)).get_mpz_t()); }

private:
    long long disc_;
};

inline int character_value(const QuadraticCharacter &chi, long long a) { return chi(a); }

namespace detail {
struct GenBernoulliCache
{
    std::mutex mu;
    std::map<std::pair<unsigned, long long>, Rational> values;
};
inline GenBernoulliCache &gen_bernoulli_cache()
{
    static GenBernoulliCache c;
    return c;
}
} // namespace detail

/// B_{n,chi} = f^{n-1} sum_{a=1}^{f} chi(a) B_n(a/f), evaluated as
/// sum_j C(n,j) B_j f^{j-1} sum_a chi(a) a^{n-j}.
inline Rational generalized_bernoulli(unsigned n, const QuadraticCharacter &chi)
{
    if (n == 0)
        throw std::invalid_argument("generalized_bernoulli: n must be >= 1");
    auto &cache = detail::gen_bernoulli_cache();
    const auto key = std::make_pair(n, chi.conductor());
    {
        std::lock_guard lock(cache.mu);
        if (auto it = cache.values.find(key); it != cache.values.end())
            return it->second;
    }
    const long long f = chi.conductor();
    std::vector<BigInt> power_sums(n + 1);
    for (long long a = 1; a <= f; ++a) {
        int c = chi(a);
        if (c == 0)
            continue;
        BigInt ap = 1;
        for (unsigned e = 0; e <= n; ++e) {
            if (c > 0)
                power_sums[e] += ap;
            else
                power_sums[e] -= ap;
            ap *= static_cast<long>(a);
        }
    }
    Rational acc;
    for (unsigned j = 0; j <= n; ++j) {
        if (power_sums[n - j] == 0)
            continue;
        Rational fj = Rational(f).pow(static_cast<long>(j) - 1);
        acc += Rational(binomial(n, j)) * bernoulli(j) * fj * Rational(power_sums[n - j]);
    }
    std::lock_guard lock(cache.mu);
    cache.values.emplace(key, acc);
    return acc;
}

inline BigInt sigma(unsigned k, long long n)
{
    if (n < 1)
        throw std::invalid_argument("sigma: n must be positive");
    BigInt s;
    for (long long d = 1; d * d <= n; ++d) {
        if (n % d)
            continue;
        s += big_pow(d, k);
        if (d * d != n)
            s += big_pow(n / d, k);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Class numbers by reduced-form enumeration.

inline long class_number(long long D)
{
    if (D <= 0 || !is_fundamental_discriminant(-D))
        throw std::invalid_argument("class_number: -" + std::to_string(D)
                                    + " is not a fundamental discriminant");
    static std::mutex mu;
    static std::map<long long, long> cache;
    {
        std::lock_guard lock(mu);
        if (auto it = cache.find(D); it != cache.end())
            return it->second;
    }
    long h = 0;
    for (long long a = 1; 3 * a * a <= D; ++a) {
        for (long long b = -a + 1; b <= a; ++b) {
            long long num = b * b + D;
            if (num % (4 * a))
                continue;
            long long c = num / (4 * a);
            if (c < a)
                continue;
            if (c == a && b < 0)
                continue;
            ++h;
        }
    }
    std::lock_guard lock(mu);
    cache.emplace(D, h);
    return h;
}

class ImaginaryQuadraticField
{
public:
    explicit ImaginaryQuadraticField(long long D) : D_(D), chi_(-D), h_(heis::class_number(D))
    {
        w_ = D == 4 ? 4 : (D == 3 ? 6 : 2);
    }

    long long D() const { return D_; }
    long class_number() const { return h_; }
    int unit_order() const { return w_; }
    const QuadraticCharacter &chi() const { return chi_; }

    friend bool operator==(const ImaginaryQuadraticField &a, const ImaginaryQuadraticField &b)
    {
        return a.D_ == b.D_;
    }

private:
    long long D_;
    QuadraticCharacter chi_;
    long h_;
    int w_ = 2;
};

// ---------------------------------------------------------------------------
// Hilbert symbols.

struct Place
{
    long long prime = 0; // 0 encodes the infinite place

    static Place infinity() { return {}; }
    static Place at(long long p) { return {p}; }
    bool is_infinite() const { return prime == 0; }
    std::string to_string() const { return is_infinite() ? "inf" : std::to_string(prime); }
    friend bool operator==(const Place &, const Place &) = default;
};

namespace detail {
// Integer representative of the square class of a nonzero rational.
inline BigInt square_class_rep(const Rational &x)
{
    if (x.is_zero())
        throw std::domain_error("hilbert_symbol: zero argument");
    return x.num() * x.den();
}

inline long strip(BigInt &u, long long p)
{
    return static_cast<long>(mpz_remove(u.get_mpz_t(), u.get_mpz_t(), BigInt(static_cast<long>(p)).get_mpz_t()));
}
} // namespace detail

inline int hilbert_symbol(const Rational &a, const Rational &b, Place v)
{
    BigInt u = detail::square_class_rep(a);
    BigInt w = detail::square_class_rep(b);
    if (v.is_infinite())
        return (u < 0 && w < 0) ? -1 : 1;
    const long long p = v.prime;
    const long alpha = detail::strip(u, p);
    const long beta = detail::strip(w, p);
    if (p == 2) {
        auto eps = [](const BigInt &t) { return mpz_fdiv_ui(t.get_mpz_t(), 4) == 3 ? 1 : 0; };
        auto omega = [](const BigInt &t) {
            unsigned long r = mpz_fdiv_ui(t.get_mpz_t(), 8);
            return (r == 3 || r == 5) ? 1 : 0;
        };
        int e = eps(u) * eps(w) + (alpha & 1) * omega(w) + (beta & 1) * omega(u);
        return (e & 1) ? -1 : 1;
    }
    BigInt pz(static_cast<long>(p));
    int s = ((alpha & 1) && (beta & 1) && ((p - 1) / 2) % 2) ? -1 : 1;
    if (beta & 1)
        s *= mpz_legendre(u.get_mpz_t(), pz.get_mpz_t());
    if (alpha & 1)
        s *= mpz_legendre(w.get_mpz_t(), pz.get_mpz_t());
    return s;
}

/// Local component of the idele class character of K at v: t -> (t, -D_K)_v.
inline int local_character(const ImaginaryQuadraticField &K, Place v, const Rational &t)
{
    return hilbert_symbol(t, Rational(-K.D()), v);
}

/// Smallest prime q with local_character(K, q, gamma) = -1. Only primes
/// dividing 2*gamma*D_K can contribute; the product formula is asserted.
inline long long witness_prime(const ImaginaryQuadraticField &K, long long gamma)
{
    if (gamma >= 0)
        throw std::invalid_argument("witness_prime: gamma must be negative");
    std::vector<long long> primes{2};
    for (auto [p, e] : factorize(gamma))
        primes.push_back(p);
    for (auto [p, e] : factorize(K.D()))
        primes.push_back(p);
    std::sort(primes.begin(), primes.end());
    primes.erase(std::unique(primes.begin(), primes.end()), primes.end());

    int product = local_character(K, Place::infinity(), Rational(gamma));
    long long first = 0;
    for (long long p : primes) {
        int c = local_character(K, Place::at(p), Rational(gamma));
        product *= c;
        if (c == -1 && first == 0)
            first = p;
    }
    if (product != 1 || first == 0)
        throw std::logic_error("witness_prime: Hilbert product formula violated");
    return first;
}

} // namespace heis
