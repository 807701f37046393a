#pragma once

// Local Siegel series F_q(H, X) for Hermitian H of rank 1 or 2.
//
// F_q is pinned down by: constant term 1, degree ord_q(gamma(H)), the
// functional equation, and local representation densities related to F_q
// through a calibrated bridge alpha_q(S_k, H) = u_{k,n} F_q(H, t_k).
//
// Two density models are available:
//   identity    S_k = 1_k; counts X in M_{k,n}(O/q^N) with X*X = H.
//   hyperbolic  S_k = k/2 copies of [[0, 1/s], [-1/s, 0]], s = sqrt(-D).
// The hyperbolic counts are computed by a character sum whose terms are
// kernel sizes of integer matrices, so no roots of unity ever appear.

#include "arith.hpp"
#include "hermitian.hpp"
#include "residue.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace heis {

// ---------------------------------------------------------------------------
// Errors.

class SiegelError : public std::runtime_error
{
public:
    SiegelError(std::string code, const std::string &what)
        : std::runtime_error(code + ": " + what), code_(std::move(code))
    {
    }
    const std::string &code() const { return code_; }

private:
    std::string code_;
};

struct Infeasible : SiegelError
{
    explicit Infeasible(const std::string &w) : SiegelError("infeasible", w) {}
};
struct RamifiedNonintegral : SiegelError
{
    explicit RamifiedNonintegral(const std::string &w) : SiegelError("ramified-nonintegral", w) {}
};
struct NotStabilized : SiegelError
{
    explicit NotStabilized(const std::string &w) : SiegelError("not-stabilized", w) {}
};
struct BridgeCalibrationFailed : SiegelError
{
    explicit BridgeCalibrationFailed(const std::string &w) : SiegelError("bridge-calibration-failed", w) {}
};

// ---------------------------------------------------------------------------
// F_q as an integer polynomial.

struct SiegelPolynomial
{
    long long q = 2;
    std::vector<BigInt> coeffs{BigInt(1)};

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }

    Rational evaluate(const Rational &x) const
    {
        Rational acc;
        for (std::size_t i = coeffs.size(); i-- > 0;)
            acc = acc * x + Rational(coeffs[i]);
        return acc;
    }

    std::string to_string() const
    {
        std::string s = std::to_string(q) + "; ";
        for (std::size_t i = 0; i < coeffs.size(); ++i)
            s += (i ? "," : "") + coeffs[i].get_str();
        return s;
    }

    static SiegelPolynomial parse(std::string_view text)
    {
        const auto semi = text.find(';');
        if (semi == std::string_view::npos)
            throw std::invalid_argument("SiegelPolynomial: missing ';'");
        SiegelPolynomial P;
        P.q = std::stoll(std::string(text.substr(0, semi)));
        P.coeffs.clear();
        std::stringstream ss{std::string(text.substr(semi + 1))};
        for (std::string item; std::getline(ss, item, ',');) {
            auto b = item.find_first_not_of(' ');
            P.coeffs.emplace_back(item.substr(b == std::string::npos ? 0 : b));
        }
        return P;
    }

    friend bool operator==(const SiegelPolynomial &, const SiegelPolynomial &) = default;
};

inline SiegelPolynomial fq_rank1(long long h, long long q)
{
    if (h < 1)
        throw std::invalid_argument("fq_rank1: h must be positive");
    const long v = ordp_int(BigInt(static_cast<long>(h)), static_cast<long>(q));
    SiegelPolynomial P{q, {}};
    for (long i = 0; i <= v; ++i)
        P.coeffs.push_back(big_pow(q, static_cast<unsigned long>(i)));
    return P;
}

/// Coefficient form of the functional equation: c_{d-i} = xi^{n-1} q^{n(d-2i)} c_i.
inline bool functional_equation_check(const SiegelPolynomial &P, long long q, int d, int xi, int n)
{
    if (P.degree() > d)
        return false;
    auto c = [&](int i) { return i <= P.degree() ? P.coeffs[i] : BigInt(0); };
    const int sign = (n - 1) % 2 == 0 ? 1 : xi;
    for (int i = 0; i <= d; ++i) {
        const Rational lhs(c(d - i));
        const Rational rhs = Rational(sign) * Rational(q).pow(static_cast<long>(n) * (d - 2 * i)) * Rational(c(i));
        if (lhs != rhs)
            return false;
    }
    return true;
}

inline bool functional_equation_check(const SiegelPolynomial &P, const ImaginaryQuadraticField &K, long long q,
                                      const SemiIntegralHermitian &H)
{
    const long long g = gamma(H);
    const int d = static_cast<int>(ordp_int(BigInt(static_cast<long>(g)), static_cast<long>(q)));
    return functional_equation_check(P, q, d, local_character(K, Place::at(q), Rational(g)), H.degree());
}

/// The polynomial when c_0 = 1 and the functional equation leave no freedom.
inline std::optional<SiegelPolynomial> fe_forced(long long q, int d, int xi, int n)
{
    const int sign = (n - 1) % 2 == 0 ? 1 : xi;
    std::vector<std::optional<Rational>> c(d + 1);
    c[0] = Rational(1);
    for (int i = 0; i <= d; ++i) {
        const int j = d - i;
        const Rational f = Rational(sign) * Rational(q).pow(static_cast<long>(n) * (d - 2 * i));
        if (i == j) {
            if (f != Rational(1))
                c[i] = Rational(0);
        } else if (c[i] && !c[j]) {
            c[j] = f * *c[i];
        }
    }
    SiegelPolynomial P{q, {}};
    for (auto &ci : c) {
        if (!ci || !ci->is_integer())
            return std::nullopt;
        P.coeffs.push_back(ci->num());
    }
    return P;
}

// ---------------------------------------------------------------------------
// Residue groups of Hermitian matrices mod q^N.

namespace detail {

using residue::i64;

struct LevelShape
{
    i64 q;
    int N;
    i64 Q;
    int n;
    int coords() const { return n * n; }
};

inline LevelShape make_shape(long long q, int N, int n)
{
    if (N < 1)
        throw std::invalid_argument("level must be >= 1");
    BigInt Qb = big_pow(q, static_cast<unsigned long>(N));
    if (Qb >= (BigInt(1) << 31))
        throw Infeasible("modulus " + std::to_string(q) + "^" + std::to_string(N) + " exceeds 2^31");
    return {q, N, static_cast<i64>(Qb.get_si()), n};
}

inline BigInt group_size(const LevelShape &s) { return big_pow(s.Q, static_cast<unsigned long>(s.coords())); }

// Coordinates of X*X-type targets: h_jj, then (x, y) of h_jl = t_jl / sqrt(-D).
inline std::vector<i64> identity_coordinates(const SemiIntegralHermitian &H, const LevelShape &s)
{
    const long long D = H.D();
    IntegerRing O(D);
    const int n = H.degree();
    std::vector<i64> c;
    for (int j = 0; j < n; ++j)
        c.push_back(residue::mod(H.diag()[j], s.Q));
    const long vD = ordp_int(BigInt(static_cast<long>(D)), static_cast<long>(s.q));
    const i64 qv = residue::ipow(s.q, static_cast<int>(vD));
    const i64 Dinv = residue::inverse_mod(residue::mod(D / qv, s.Q), s.Q);
    for (const auto &t : H.upper()) {
        // h = t / s = -t s / D
        AlgebraicInteger w = O.mul(t, O.sqrt_minus_d());
        for (long long v : {w.x, w.y}) {
            if (v % qv != 0)
                throw RamifiedNonintegral("off-diagonal entry of " + canonical_key(H) + " is not integral at "
                                          + std::to_string(s.q));
            c.push_back(residue::mod(static_cast<i64>((static_cast<__int128>(residue::mod(-v / qv, s.Q)) * Dinv) % s.Q),
                                     s.Q));
        }
    }
    return c;
}

inline std::size_t encode(const std::vector<i64> &c, i64 Q)
{
    std::size_t idx = 0;
    for (std::size_t i = c.size(); i-- > 0;)
        idx = idx * static_cast<std::size_t>(Q) + static_cast<std::size_t>(c[i]);
    return idx;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Identity model: single-row pushforward histogram and its convolution powers.

struct NormHistogram
{
    long long q = 0;
    int N = 0;
    int n = 0;
    long long Q = 0;
    std::vector<std::uint64_t> counts; // indexed by encoded coordinates

    std::uint64_t total() const
    {
        std::uint64_t s = 0;
        for (auto c : counts)
            s += c;
        return s;
    }
    std::uint64_t at(const std::vector<long long> &coords) const
    {
        std::vector<residue::i64> c(coords.begin(), coords.end());
        return counts.at(detail::encode(c, Q));
    }
};

inline NormHistogram norm_histogram(long long D, long long q, int N, int n, std::uint64_t cap = 1u << 20)
{
    if (n < 1 || n > 3)
        throw std::invalid_argument("norm_histogram: degree must be 1..3");
    auto s = detail::make_shape(q, N, n);
    if (detail::group_size(s) > BigInt(static_cast<unsigned long>(cap)))
        throw Infeasible("histogram group size " + detail::group_size(s).get_str() + " exceeds cap "
                         + std::to_string(cap));
    const BigInt points = big_pow(s.Q, 2UL * n);
    if (points > BigInt(1UL << 28))
        throw Infeasible("histogram needs " + points.get_str() + " row vectors");

    IntegerRing O(D);
    NormHistogram hist{q, N, n, s.Q, std::vector<std::uint64_t>(detail::group_size(s).get_ui(), 0)};
    std::vector<AlgebraicInteger> y(n);
    std::vector<residue::i64> digits(2 * n, 0);
    std::vector<residue::i64> c(s.coords());
    while (true) {
        for (int j = 0; j < n; ++j)
            y[j] = {digits[2 * j], digits[2 * j + 1]};
        int pos = 0;
        for (int j = 0; j < n; ++j)
            c[pos++] = residue::mod(O.norm(y[j]), s.Q);
        for (int j = 0; j < n; ++j)
            for (int l = j + 1; l < n; ++l) {
                AlgebraicInteger e = O.mul(O.conj(y[j]), y[l]);
                c[pos++] = residue::mod(e.x, s.Q);
                c[pos++] = residue::mod(e.y, s.Q);
            }
        ++hist.counts[detail::encode(c, s.Q)];
        int i = 0;
        while (i < 2 * n && ++digits[i] == s.Q)
            digits[i++] = 0;
        if (i == 2 * n)
            break;
    }
    return hist;
}

namespace detail {

// Group convolution of two functions on (Z/Q)^c, modulo one word prime.
inline std::vector<residue::u64> convolve_mod(const std::vector<residue::u64> &f, const std::vector<residue::u64> &g,
                                              const std::vector<std::vector<i64>> &coords, i64 Q, residue::u64 p)
{
    const std::size_t G = f.size();
    std::vector<residue::u64> h(G, 0);
    std::vector<i64> diff(coords.empty() ? 0 : coords[0].size());
    for (std::size_t a = 0; a < G; ++a) {
        if (!f[a])
            continue;
        for (std::size_t b = 0; b < G; ++b) {
            if (!g[b])
                continue;
            for (std::size_t i = 0; i < diff.size(); ++i) {
                i64 v = coords[a][i] + coords[b][i];
                diff[i] = v >= Q ? v - Q : v;
            }
            const std::size_t c = encode(diff, Q);
            h[c] = residue::addmod(h[c], residue::mulmod(f[a], g[b], p), p);
        }
    }
    return h;
}

} // namespace detail

/// A_N = #{X in M_{k,n}(O/q^N) : X*X = H} by direct k-fold group convolution
/// of the row histogram, carried out in a residue number system.
inline BigInt representation_count_direct(long long D, long long q, int N, int n, int k,
                                          const SemiIntegralHermitian &H, std::uint64_t cap = 1u << 12)
{
    if (k < 1)
        throw std::invalid_argument("representation_count: k must be >= 1");
    auto s = detail::make_shape(q, N, n);
    const auto target = detail::encode(detail::identity_coordinates(H, s), s.Q);
    const NormHistogram hist = norm_histogram(D, q, N, n, cap);
    const std::size_t G = hist.counts.size();
    std::vector<std::vector<residue::i64>> coords(G, std::vector<residue::i64>(s.coords()));
    for (std::size_t idx = 0; idx < G; ++idx) {
        std::size_t r = idx;
        for (int i = 0; i < s.coords(); ++i) {
            coords[idx][i] = static_cast<residue::i64>(r % static_cast<std::size_t>(s.Q));
            r /= static_cast<std::size_t>(s.Q);
        }
    }
    // counts are bounded by q^{2Nkn}
    const std::size_t bits =
        static_cast<std::size_t>(mpz_sizeinbase(big_pow(q, 2UL * N * k * n).get_mpz_t(), 2)) + 1;
    residue::RnsBasis basis(bits);
    std::vector<residue::u64> residues;
    for (residue::u64 p : basis.primes()) {
        std::vector<residue::u64> f(G);
        for (std::size_t i = 0; i < G; ++i)
            f[i] = hist.counts[i] % p;
        std::vector<residue::u64> acc;
        std::vector<residue::u64> base = f;
        for (int e = k; e > 0; e >>= 1) {
            if (e & 1)
                acc = acc.empty() ? base : detail::convolve_mod(acc, base, coords, s.Q, p);
            if (e > 1)
                base = detail::convolve_mod(base, base, coords, s.Q, p);
        }
        residues.push_back(acc[target]);
    }
    return basis.reconstruct(residues);
}

namespace detail {

// Functions on Z/Q invariant under multiplication by norms of units of
// O/Q. Rank-1 histograms and all their convolution powers live here, so a
// convolution costs (#orbits)^3 instead of Q^2.
class NormOrbitAlgebra
{
public:
    NormOrbitAlgebra(long long D, LevelShape s) : s_(s), label_(static_cast<std::size_t>(s.Q), -1)
    {
        IntegerRing O(D);
        const int e = static_cast<int>(std::min<long long>(s.N, s.q == 2 ? 3 : 1));
        const i64 E = residue::ipow(s.q, e);
        std::vector<bool> normset(static_cast<std::size_t>(E), false);
        for (i64 x = 0; x < E; ++x)
            for (i64 y = 0; y < E; ++y) {
                i64 nv = residue::mod(O.norm({x, y}), E);
                if (nv % s.q != 0)
                    normset[static_cast<std::size_t>(nv)] = true;
            }
        std::vector<i64> units;
        for (i64 u = 1; u < s.Q; ++u)
            if (u % s.q != 0 && normset[static_cast<std::size_t>(u % E)])
                units.push_back(u);
        for (i64 c = 0; c < s.Q; ++c) {
            if (label_[c] >= 0)
                continue;
            const int id = static_cast<int>(reps_.size());
            reps_.push_back(c);
            for (i64 u : units)
                label_[static_cast<std::size_t>(static_cast<__int128>(c) * u % s.Q)] = id;
        }
        const std::size_t r = reps_.size();
        structure_.assign(r * r * r, 0);
        for (std::size_t l = 0; l < r; ++l)
            for (i64 a = 0; a < s.Q; ++a) {
                const int i = label_[static_cast<std::size_t>(a)];
                const int j = label_[static_cast<std::size_t>(residue::mod(reps_[l] - a, s.Q))];
                ++structure_[(l * r + static_cast<std::size_t>(i)) * r + static_cast<std::size_t>(j)];
            }
    }

    std::size_t orbits() const { return reps_.size(); }
    i64 rep(std::size_t i) const { return reps_[i]; }
    int label(i64 c) const { return label_[static_cast<std::size_t>(residue::mod(c, s_.Q))]; }

    std::vector<BigInt> multiply(const std::vector<BigInt> &f, const std::vector<BigInt> &g) const
    {
        const std::size_t r = reps_.size();
        std::vector<BigInt> h(r);
        for (std::size_t l = 0; l < r; ++l)
            for (std::size_t i = 0; i < r; ++i) {
                if (f[i] == 0)
                    continue;
                BigInt partial = 0;
                for (std::size_t j = 0; j < r; ++j) {
                    const auto c = structure_[(l * r + i) * r + j];
                    if (c)
                        partial += g[j] * static_cast<unsigned long>(c);
                }
                h[l] += f[i] * partial;
            }
        return h;
    }

    // #{y in O/Q : N(y) = rep_i} for every orbit.
    std::vector<BigInt> norm_counts(long long D) const
    {
        IntegerRing O(D);
        std::vector<BigInt> out(reps_.size());
        if (s_.q == 2) {
            if (static_cast<BigInt>(s_.Q) * s_.Q > BigInt(1UL << 26))
                throw Infeasible("2-adic norm histogram at modulus " + std::to_string(s_.Q));
            std::vector<std::uint64_t> cnt(reps_.size(), 0);
            std::vector<std::uint64_t> raw(static_cast<std::size_t>(s_.Q), 0);
            for (i64 x = 0; x < s_.Q; ++x)
                for (i64 y = 0; y < s_.Q; ++y)
                    ++raw[static_cast<std::size_t>(residue::mod(O.norm({x, y}), s_.Q))];
            for (std::size_t i = 0; i < reps_.size(); ++i)
                out[i] = static_cast<unsigned long>(raw[static_cast<std::size_t>(reps_[i])]);
            return out;
        }
        // 4 N(x + y omega) = (2x - D y)^2 + D y^2 and x -> 2x - Dy is bijective.
        std::vector<std::uint64_t> squares(static_cast<std::size_t>(s_.Q), 0);
        for (i64 z = 0; z < s_.Q; ++z)
            ++squares[static_cast<std::size_t>(static_cast<__int128>(z) * z % s_.Q)];
        const i64 Dm = residue::mod(D, s_.Q);
        for (std::size_t i = 0; i < reps_.size(); ++i) {
            std::uint64_t acc = 0;
            const i64 four_c = residue::mod(4 * reps_[i], s_.Q);
            for (i64 y = 0; y < s_.Q; ++y) {
                const i64 dy2 = static_cast<i64>(static_cast<__int128>(Dm) * (static_cast<__int128>(y) * y % s_.Q) % s_.Q);
                acc += squares[static_cast<std::size_t>(residue::mod(four_c - dy2, s_.Q))];
            }
            out[i] = static_cast<unsigned long>(acc);
        }
        return out;
    }

private:
    LevelShape s_;
    std::vector<int> label_;
    std::vector<i64> reps_;
    std::vector<std::uint64_t> structure_;
};

// A_N(h) for k = 1..kmax, identity model, rank 1.
inline std::vector<BigInt> rank1_identity_counts(long long D, long long q, int N, long long h, int kmax,
                                                 std::uint64_t cap)
{
    auto s = make_shape(q, N, 1);
    if (static_cast<std::uint64_t>(s.Q) > cap)
        throw Infeasible("rank-1 group size " + std::to_string(s.Q) + " exceeds cap " + std::to_string(cap));
    NormOrbitAlgebra alg(D, s);
    const std::vector<BigInt> f = alg.norm_counts(D);
    const int target = alg.label(h);
    std::vector<BigInt> out;
    std::vector<BigInt> power = f;
    for (int k = 1; k <= kmax; ++k) {
        if (k > 1)
            power = alg.multiply(power, f);
        out.push_back(power[static_cast<std::size_t>(target)]);
    }
    return out;
}

} // namespace detail

/// #{X in M_{k,n}(O/q^N) : X*X = H}. Rank 1 runs in the unit-orbit algebra,
/// higher rank by direct convolution.
inline BigInt representation_count(long long D, long long q, int N, int n, int k, const SemiIntegralHermitian &H,
                                   std::uint64_t cap = 1u << 20)
{
    if (H.degree() != n)
        throw std::invalid_argument("representation_count: H has degree " + std::to_string(H.degree()));
    if (n == 1) {
        auto s = detail::make_shape(q, N, 1);
        (void)detail::identity_coordinates(H, s);
        return detail::rank1_identity_counts(D, q, N, H.diag()[0], k, cap).back();
    }
    return representation_count_direct(D, q, N, n, k, H, std::min<std::uint64_t>(cap, 1u << 12));
}

// ---------------------------------------------------------------------------
// Hyperbolic model via kernel sizes.

namespace detail {

// Bilinear coefficient matrices: coordinate i of (a*b - b*a)/s, with a, b in
// O^n written in the {1, omega} basis, equals a^T B_i b.
inline std::vector<residue::SmallMatrix> hyperbolic_bilinear(long long D, int n)
{
    IntegerRing O(D);
    const int dim = 2 * n;
    auto unit = [&](int u) {
        std::vector<AlgebraicInteger> v(n);
        if (u % 2 == 0)
            v[u / 2] = {1, 0};
        else
            v[u / 2] = {0, 1};
        return v;
    };
    auto pair_coords = [&](const std::vector<AlgebraicInteger> &a, const std::vector<AlgebraicInteger> &b) {
        std::vector<i64> c;
        for (int j = 0; j < n; ++j)
            c.push_back(O.mul(O.conj(a[j]), b[j]).y);
        for (int j = 0; j < n; ++j)
            for (int l = j + 1; l < n; ++l) {
                AlgebraicInteger t = O.sub(O.mul(O.conj(a[j]), b[l]), O.mul(O.conj(b[j]), a[l]));
                c.push_back(t.x);
                c.push_back(t.y);
            }
        return c;
    };
    std::vector<residue::SmallMatrix> B(static_cast<std::size_t>(n * n));
    for (auto &m : B)
        m.fill(0);
    for (int u = 0; u < dim; ++u)
        for (int v = 0; v < dim; ++v) {
            auto c = pair_coords(unit(u), unit(v));
            for (int i = 0; i < n * n; ++i)
                B[i][u * residue::kMaxDim + v] = c[i];
        }
    return B;
}

// Kernel-exponent tallies over R with <H,R> = 0 (zero) and with
// ord <H,R> = N-1 (edge), counted with multiplicity.
struct KernelTally
{
    std::vector<std::uint64_t> zero;
    std::vector<std::uint64_t> edge;
};

// Both the kernel of M_R and the class of <H,R> are invariant under
// R -> uR for units u, so one representative per orbit suffices: the
// first coordinate of minimal valuation v is normalized to q^v, and the
// orbit has (q-1) q^{N-1-v} elements. Within each family one free
// coordinate is solved from <H,R> = 0 mod q^{N-1} instead of enumerated.
inline KernelTally hyperbolic_tally(long long D, const LevelShape &s, const std::vector<i64> &target,
                                    std::uint64_t max_terms)
{
    using residue::kMaxDim;
    const int c = s.coords();
    const int dim = 2 * s.n;
    auto Bm = hyperbolic_bilinear(D, s.n);
    for (auto &m : Bm)
        for (auto &x : m)
            x = residue::mod(x, s.Q);
    auto add_into = [&](residue::SmallMatrix &M, const residue::SmallMatrix &A) {
        for (int u = 0; u < dim; ++u)
            for (int w = 0; w < dim; ++w) {
                auto &x = M[u * kMaxDim + w];
                x += A[u * kMaxDim + w];
                if (x >= s.Q)
                    x -= s.Q;
            }
    };
    auto scaled = [&](const residue::SmallMatrix &A, i64 f) {
        residue::SmallMatrix out{};
        for (int e = 0; e < kMaxDim * kMaxDim; ++e)
            out[e] = A[e] * f % s.Q;
        return out;
    };

    struct Family
    {
        int v, j, pivot;
        std::vector<i64> step, count;
        int g;          // valuation of the pivot's pairing coefficient
        i64 sol_stride; // solutions for the pivot digit repeat with this period
    };
    std::vector<Family> families;
    BigInt work = 0;
    for (int v = 0; v < s.N; ++v) {
        const i64 qv = residue::ipow(s.q, v);
        for (int j = 0; j < c; ++j) {
            Family f{v, j, -1, std::vector<i64>(c, 0), std::vector<i64>(c, 1), s.N, 1};
            for (int i = 0; i < c; ++i) {
                if (i == j)
                    continue;
                f.step[i] = i < j ? std::min(s.Q, qv * s.q) : qv;
                f.count[i] = s.Q / f.step[i];
                if (f.count[i] == 1)
                    continue;
                const int g = residue::valuation_capped(target[i] * f.step[i] % s.Q, s.q, s.N);
                if (f.pivot < 0 || g < f.g) {
                    f.pivot = i;
                    f.g = g;
                }
            }
            BigInt terms = 1;
            for (int i = 0; i < c; ++i)
                if (i != f.pivot)
                    terms *= static_cast<unsigned long>(f.count[i]);
            if (f.pivot >= 0) {
                f.sol_stride = f.g < s.N - 1 ? residue::ipow(s.q, s.N - 1 - f.g) : 1;
                terms *= static_cast<unsigned long>(f.count[f.pivot] / f.sol_stride);
            }
            work += terms;
            families.push_back(std::move(f));
        }
    }
    if (work > BigInt(static_cast<unsigned long>(max_terms)))
        throw Infeasible("character sum needs ~" + work.get_str() + " terms");

    KernelTally tally{std::vector<std::uint64_t>(dim * s.N + 1, 0), std::vector<std::uint64_t>(dim * s.N + 1, 0)};
    tally.zero[static_cast<std::size_t>(dim * s.N)] += 1; // R = 0
    const i64 edge_unit = s.Q / s.q;
    auto visit = [&](i64 pairing, const residue::SmallMatrix &M, std::uint64_t weight) {
        const bool zero = pairing == 0;
        if (!zero && pairing % edge_unit != 0)
            return;
        residue::SmallMatrix work_m = M;
        const int e = residue::kernel_exponent(work_m, dim, s.q, s.N, s.Q);
        (zero ? tally.zero : tally.edge)[static_cast<std::size_t>(e)] += weight;
    };

    for (const auto &f : families) {
        const i64 qv = residue::ipow(s.q, f.v);
        const std::uint64_t weight = static_cast<std::uint64_t>((s.q - 1) * residue::ipow(s.q, s.N - 1 - f.v));
        std::vector<int> free;
        std::vector<residue::SmallMatrix> stepB(c);
        std::vector<i64> step_target(c, 0), digit(c, 0);
        for (int i = 0; i < c; ++i) {
            if (i == f.j || f.count[i] == 1)
                continue;
            stepB[i] = scaled(Bm[i], f.step[i]);
            step_target[i] = target[i] * f.step[i] % s.Q;
            if (i != f.pivot)
                free.push_back(i);
        }
        residue::SmallMatrix M = scaled(Bm[f.j], qv);
        i64 pairing = target[f.j] * qv % s.Q;

        // Pivot digit d solves pairing + d * step_target[pivot] = 0 mod q^{N-1}.
        const i64 E = edge_unit;
        i64 unit_inv = 0;
        residue::SmallMatrix strideB{};
        i64 stride_target = 0;
        if (f.pivot >= 0) {
            if (f.g < s.N - 1) {
                const i64 qg = residue::ipow(s.q, f.g);
                unit_inv = residue::inverse_mod(step_target[f.pivot] / qg, f.sol_stride);
            }
            strideB = scaled(stepB[f.pivot], f.sol_stride);
            stride_target = step_target[f.pivot] * f.sol_stride % s.Q;
        }

        while (true) {
            if (f.pivot < 0) {
                visit(pairing, M, weight);
            } else {
                i64 d0 = 0;
                bool solvable = true;
                if (f.g < s.N - 1) {
                    const i64 qg = residue::ipow(s.q, f.g);
                    const i64 rest = pairing % E;
                    if (rest % qg != 0)
                        solvable = false;
                    else
                        d0 = residue::mod(-(rest / qg) * unit_inv, f.sol_stride);
                } else if (pairing % E != 0) {
                    solvable = false;
                }
                if (solvable) {
                    residue::SmallMatrix P = M;
                    add_into(P, scaled(stepB[f.pivot], d0));
                    i64 pp = (pairing + step_target[f.pivot] * d0) % s.Q;
                    for (i64 t = 0; t < f.count[f.pivot] / f.sol_stride; ++t) {
                        visit(pp, P, weight);
                        add_into(P, strideB);
                        pp = (pp + stride_target) % s.Q;
                    }
                }
            }
            std::size_t pos = 0;
            for (; pos < free.size(); ++pos) {
                const int i = free[pos];
                pairing = (pairing + step_target[i]) % s.Q;
                add_into(M, stepB[i]);
                if (++digit[i] < f.count[i])
                    break;
                digit[i] = 0;
            }
            if (pos == free.size())
                break;
        }
    }
    return tally;
}

// alpha = q^{-N n k} sum_e (zero_e - edge_e/(q-1)) q^{e k/2}, k even.
inline Rational hyperbolic_alpha(const KernelTally &t, const LevelShape &s, int k)
{
    BigInt zero_sum = 0, edge_sum = 0;
    for (std::size_t e = 0; e < t.zero.size(); ++e) {
        const BigInt w = big_pow(s.q, e * static_cast<unsigned long>(k / 2));
        if (t.zero[e])
            zero_sum += w * static_cast<unsigned long>(t.zero[e]);
        if (t.edge[e])
            edge_sum += w * static_cast<unsigned long>(t.edge[e]);
    }
    Rational total = Rational(zero_sum) - Rational(edge_sum, BigInt(static_cast<long>(s.q - 1)));
    return total / Rational(big_pow(s.q, static_cast<unsigned long>(s.N) * s.n * k));
}

} // namespace detail

// ---------------------------------------------------------------------------
// Density profiles and stabilization.

enum class DensityModel { identity, hyperbolic };

inline const char *to_string(DensityModel m) { return m == DensityModel::identity ? "identity" : "hyperbolic"; }

struct DensityLimits
{
    std::uint64_t cap_group_size = 1u << 20; // rank-1 groups and identity histograms
    std::uint64_t max_terms = 1ULL << 26;    // character-sum terms per level
    int max_level = 12;
};

struct DensityProfile
{
    long long q = 0;
    std::string key;
    DensityModel model = DensityModel::identity;
    std::map<int, Rational> alpha; // k -> stabilized density
    std::map<int, int> level;      // k -> first level N* with N* and N*+1 agreeing
};

namespace detail {

using LevelEval = std::function<std::vector<Rational>(int N)>;

inline std::pair<std::vector<Rational>, int> stabilize(int start, const DensityLimits &lim, const LevelEval &eval,
                                                        const std::string &what)
{
    std::vector<Rational> prev = eval(start);
    for (int N = start + 1; N <= lim.max_level; ++N) {
        std::vector<Rational> cur = eval(N);
        if (cur == prev)
            return {cur, N - 1};
        prev = std::move(cur);
    }
    throw NotStabilized(what + " did not stabilize by level " + std::to_string(lim.max_level));
}

inline int ordq(long long x, long long q) { return static_cast<int>(ordp_int(BigInt(static_cast<long>(x)), static_cast<long>(q))); }

// Jordan exponents (a, b) of a rank-2 H at an unramified q: H ~ diag(q^a, q^b).
inline std::pair<int, int> unramified_jordan(const SemiIntegralHermitian &H, long long q)
{
    const int d = ordq(gamma(H), q);
    int a = d;
    for (long long v : {H.diag()[0], H.diag()[1], H.t(0, 1).x, H.t(0, 1).y})
        if (v != 0)
            a = std::min(a, ordq(v, q));
    return {a, d - a};
}

inline std::vector<Rational> rank1_identity_alphas(long long D, long long q, int N, long long h,
                                                   const std::vector<int> &ks, const DensityLimits &lim)
{
    const int kmax = *std::max_element(ks.begin(), ks.end());
    auto counts = rank1_identity_counts(D, q, N, h, kmax, lim.cap_group_size);
    std::vector<Rational> out;
    for (int k : ks)
        out.push_back(Rational(counts[static_cast<std::size_t>(k - 1)])
                      / Rational(big_pow(q, static_cast<unsigned long>(N) * (2 * k - 1))));
    return out;
}

inline std::vector<Rational> hyperbolic_alphas(long long D, long long q, int N, int n, const std::vector<i64> &raw,
                                               const std::vector<int> &ks, const DensityLimits &lim)
{
    auto s = make_shape(q, N, n);
    std::vector<i64> target;
    for (i64 v : raw)
        target.push_back(residue::mod(v, s.Q));
    auto tally = hyperbolic_tally(D, s, target, lim.max_terms);
    std::vector<Rational> out;
    for (int k : ks)
        out.push_back(hyperbolic_alpha(tally, s, k));
    return out;
}

inline void require_even(const std::vector<int> &ks)
{
    for (int k : ks)
        if (k < 2 || k % 2)
            throw std::invalid_argument("hyperbolic densities need even k >= 2");
}

} // namespace detail

/// Stabilized densities alpha_q(S_k, H) of the requested model for each k.
inline DensityProfile density_profile(long long D, long long q, DensityModel model, const SemiIntegralHermitian &H,
                                      const std::vector<int> &ks, const DensityLimits &lim = {})
{
    if (ks.empty())
        throw std::invalid_argument("density_profile: no k values");
    const int n = H.degree();
    if (n < 1 || n > 2)
        throw std::invalid_argument("density_profile: rank must be 1 or 2");
    DensityProfile prof{q, canonical_key(H), model, {}, {}};
    const long long g = gamma(H);
    const int d = detail::ordq(g, q);
    const bool ramified = D % q == 0;
    auto store = [&](const std::vector<Rational> &vals, int Nstar) {
        for (std::size_t i = 0; i < ks.size(); ++i) {
            prof.alpha[ks[i]] = vals[i];
            prof.level[ks[i]] = Nstar;
        }
    };
    const std::string what = "density of " + prof.key + " at q=" + std::to_string(q);

    if (model == DensityModel::hyperbolic) {
        detail::require_even(ks);
        std::vector<detail::i64> raw;
        int start = std::max(1, d);
        if (!ramified && n == 2) {
            auto [a, b] = detail::unramified_jordan(H, q);
            raw = {static_cast<detail::i64>(big_pow(q, a).get_si()), static_cast<detail::i64>(big_pow(q, b).get_si()), 0, 0};
            start = b + 1;
        } else {
            for (long long v : H.diag())
                raw.push_back(v);
            for (const auto &t : H.upper()) {
                raw.push_back(t.x);
                raw.push_back(t.y);
            }
        }
        auto [vals, Nstar] = detail::stabilize(
            start, lim, [&](int N) { return detail::hyperbolic_alphas(D, q, N, n, raw, ks, lim); }, what);
        store(vals, Nstar);
        return prof;
    }

    if (n == 1) {
        const long long h = H.diag()[0];
        auto [vals, Nstar] = detail::stabilize(
            d + 1, lim, [&](int N) { return detail::rank1_identity_alphas(D, q, N, h, ks, lim); }, what);
        store(vals, Nstar);
        return prof;
    }

    if (!ramified) {
        auto [a, b] = detail::unramified_jordan(H, q);
        if (a == 0) {
            // X = (x, y) with x*x = 1 forces y into the orthogonal complement of x, which is 1_{k-1}.
            std::vector<int> km1;
            for (int k : ks)
                km1.push_back(k - 1);
            for (int k : km1)
                if (k < 1)
                    throw std::invalid_argument("density_profile: rank-2 identity densities need k >= 2");
            auto [unit, N1] = detail::stabilize(
                1, lim, [&](int N) { return detail::rank1_identity_alphas(D, q, N, 1, ks, lim); }, what);
            const long long qb = big_pow(q, static_cast<unsigned long>(b)).get_si();
            auto [rest, N2] = detail::stabilize(
                b + 1, lim, [&](int N) { return detail::rank1_identity_alphas(D, q, N, qb, km1, lim); }, what);
            std::vector<Rational> vals;
            for (std::size_t i = 0; i < ks.size(); ++i)
                vals.push_back(unit[i] * rest[i]);
            store(vals, std::max(N1, N2));
            return prof;
        }
        bool all_even = true;
        for (int k : ks)
            all_even = all_even && k % 2 == 0;
        if (all_even) {
            // 1_k is hyperbolic over an unramified O_q when k is even.
            auto hyp = density_profile(D, q, DensityModel::hyperbolic, H, ks, lim);
            hyp.model = DensityModel::identity;
            return hyp;
        }
    }

    auto [vals, Nstar] = detail::stabilize(
        std::max(1, d), lim,
        [&](int N) {
            std::vector<Rational> out;
            for (int k : ks)
                out.push_back(Rational(representation_count_direct(D, q, N, n, k, H, 1u << 12))
                              / Rational(big_pow(q, static_cast<unsigned long>(N) * (2 * k * n - n * n))));
            return out;
        },
        what);
    store(vals, Nstar);
    return prof;
}

/// alpha_q(1_k, H) = A_N / q^{N(2kn - n^2)} at a stabilized level N.
inline Rational density(long long D, long long q, int n, int k, const SemiIntegralHermitian &H,
                        const DensityLimits &lim = {})
{
    if (H.degree() != n)
        throw std::invalid_argument("density: H has degree " + std::to_string(H.degree()));
    return density_profile(D, q, DensityModel::identity, H, {k}, lim).alpha.at(k);
}

// ---------------------------------------------------------------------------
// Bridge calibration.

struct BridgeParameters
{
    long long D = 0;
    long long q = 0;
    DensityModel model = DensityModel::identity;
    bool twist = false;
    std::vector<std::string> evidence; // "n:key:k" for every verified point

    int chi_q() const { return QuadraticCharacter(-D)(q); }

    static Rational chi_power(int chi, int e) { return e == 0 ? Rational(1) : Rational(chi).pow(e); }

    Rational u(int k, int n) const
    {
        Rational acc(1);
        for (int i = 0; i < n; ++i) {
            const int e = model == DensityModel::identity ? k - i : i;
            acc *= Rational(1) - chi_power(chi_q(), e) * Rational(q).pow(i - k);
        }
        return acc;
    }
    Rational t(int k) const
    {
        Rational base = Rational(q).pow(-k);
        return twist ? chi_power(chi_q(), k) * base : base;
    }
    bool needs_even_k() const { return model == DensityModel::hyperbolic; }

    std::string name() const { return std::string(to_string(model)) + (twist ? "+twist" : ""); }
};

namespace detail {

inline long long coprime_cofactor(long long q)
{
    long long c = 2;
    while (c % q == 0)
        ++c;
    return c;
}

} // namespace detail

inline BridgeParameters calibrate_bridge(const ImaginaryQuadraticField &K, long long q, const DensityLimits &lim = {})
{
    const long long D = K.D();
    const long long c = detail::coprime_cofactor(q);
    const std::vector<long long> battery{1, c, q, c * q, q * q, q * q * q};
    std::vector<std::string> failures;

    const std::vector<std::pair<DensityModel, bool>> candidates{{DensityModel::identity, true},
                                                                {DensityModel::identity, false},
                                                                {DensityModel::hyperbolic, false},
                                                                {DensityModel::hyperbolic, true}};
    for (auto [model, twist] : candidates) {
        BridgeParameters bp{D, q, model, twist, {}};
        const std::vector<int> ks = model == DensityModel::identity ? std::vector<int>{1, 2, 3, 4}
                                                                    : std::vector<int>{2, 4, 6};
        std::string failure;
        try {
            for (long long h : battery) {
                auto H = SemiIntegralHermitian::diagonal(D, {h});
                auto prof = density_profile(D, q, model, H, ks, lim);
                const SiegelPolynomial F = fq_rank1(h, q);
                for (int k : ks) {
                    const Rational expect = bp.u(k, 1) * F.evaluate(bp.t(k));
                    if (prof.alpha.at(k) != expect) {
                        failure = bp.name() + " h=" + std::to_string(h) + " k=" + std::to_string(k) + ": density "
                                  + prof.alpha.at(k).to_string() + " vs bridge " + expect.to_string();
                        break;
                    }
                    bp.evidence.push_back("1:" + canonical_key(H) + ":" + std::to_string(k));
                }
                if (!failure.empty())
                    break;
            }
            if (failure.empty()) {
                // Rank-2 points whose F_q is forced by the functional equation.
                const std::vector<int> ks2 = model == DensityModel::identity ? std::vector<int>{5, 6}
                                                                             : std::vector<int>{6, 8};
                for (long long b : {1LL, q}) {
                    auto H = SemiIntegralHermitian::diagonal(D, {1, b});
                    const long long g = gamma(H);
                    const int d = detail::ordq(g, q);
                    auto forced = fe_forced(q, d, local_character(K, Place::at(q), Rational(g)), 2);
                    if (!forced)
                        continue;
                    auto prof = density_profile(D, q, model, H, ks2, lim);
                    for (int k : ks2) {
                        const Rational expect = bp.u(k, 2) * forced->evaluate(bp.t(k));
                        if (prof.alpha.at(k) != expect) {
                            failure = bp.name() + " rank-2 " + canonical_key(H) + " k=" + std::to_string(k)
                                      + ": density " + prof.alpha.at(k).to_string() + " vs bridge "
                                      + expect.to_string();
                            break;
                        }
                        bp.evidence.push_back("2:" + canonical_key(H) + ":" + std::to_string(k));
                    }
                    if (!failure.empty())
                        break;
                }
            }
        } catch (const SiegelError &e) {
            failure = bp.name() + ": " + e.what();
        }
        if (failure.empty())
            return bp;
        failures.push_back(failure);
    }
    std::string msg = "no bridge candidate fits at q=" + std::to_string(q) + " for D=" + std::to_string(D);
    for (const auto &f : failures)
        msg += "; " + f;
    throw BridgeCalibrationFailed(msg);
}

// ---------------------------------------------------------------------------
// Solving for F_q.

enum class FqRoute { trivial, functional_equation, density };

inline const char *to_string(FqRoute r)
{
    switch (r) {
    case FqRoute::trivial: return "trivial";
    case FqRoute::functional_equation: return "functional-equation";
    case FqRoute::density: return "density";
    }
    return "?";
}

struct FqInconsistent : SiegelError
{
    FqInconsistent(const std::string &w, SiegelPolynomial density_candidate, SiegelPolynomial reflected)
        : SiegelError("fq-inconsistent", w), candidate(std::move(density_candidate)), mirror(std::move(reflected))
    {
    }
    SiegelPolynomial candidate;
    SiegelPolynomial mirror;
};

struct NotComputable : SiegelError
{
    explicit NotComputable(const std::string &w) : SiegelError("not-computable", w) {}
};

struct FqResult
{
    SiegelPolynomial poly;
    FqRoute route = FqRoute::trivial;
    int d = 0;
    int xi = 1;
    std::string model; // bridge used by the density route
    std::map<int, int> levels;
};

namespace detail {

// Newton interpolation, returned in the monomial basis.
inline std::vector<Rational> interpolate(const std::vector<Rational> &xs, const std::vector<Rational> &ys)
{
    const std::size_t m = xs.size();
    std::vector<Rational> dd = ys;
    for (std::size_t j = 1; j < m; ++j)
        for (std::size_t i = m - 1; i >= j; --i) {
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - j]);
            if (i == j)
                break;
        }
    std::vector<Rational> poly(m);
    for (std::size_t i = m; i-- > 0;) {
        // poly = poly * (x - xs[i]) + dd[i]
        std::vector<Rational> next(m);
        for (std::size_t e = 0; e + 1 < m; ++e) {
            next[e + 1] += poly[e];
            next[e] -= poly[e] * xs[i];
        }
        next[0] += dd[i];
        poly = std::move(next);
    }
    return poly;
}

inline SiegelPolynomial reflect(const SiegelPolynomial &P, int d, int xi, int n)
{
    const int sign = (n - 1) % 2 == 0 ? 1 : xi;
    SiegelPolynomial R{P.q, std::vector<BigInt>(static_cast<std::size_t>(d) + 1)};
    for (int i = 0; i <= d; ++i) {
        const Rational v = Rational(sign) * Rational(P.q).pow(static_cast<long>(n) * (d - 2 * i))
                           * Rational(i <= P.degree() ? P.coeffs[i] : BigInt(0));
        R.coeffs[d - i] = v.is_integer() ? v.num() : BigInt(0);
    }
    return R;
}

} // namespace detail

struct SolverOptions
{
    DensityLimits limits;
    bool use_forced = true; // false exercises the density route even when FE decides
};

/// Thread-safe F_q solver with per-(q, H) and per-q bridge caches.
class SiegelSolver
{
public:
    explicit SiegelSolver(long long D, SolverOptions opt = {}) : K_(D), opt_(opt) {}

    const ImaginaryQuadraticField &field() const { return K_; }
    const SolverOptions &options() const { return opt_; }

    BridgeParameters bridge(long long q)
    {
        {
            std::shared_lock lock(mu_);
            if (auto it = bridges_.find(q); it != bridges_.end())
                return it->second;
        }
        BridgeParameters bp = calibrate_bridge(K_, q, opt_.limits);
        std::unique_lock lock(mu_);
        ++calibrations_;
        return bridges_.emplace(q, bp).first->second;
    }

    void preload_bridge(const BridgeParameters &bp)
    {
        std::unique_lock lock(mu_);
        bridges_.emplace(bp.q, bp);
    }

    std::vector<BridgeParameters> bridges() const
    {
        std::shared_lock lock(mu_);
        std::vector<BridgeParameters> out;
        for (const auto &[q, bp] : bridges_)
            out.push_back(bp);
        return out;
    }

    FqResult fq(const SemiIntegralHermitian &H, long long q)
    {
        const std::string key = cache_key(H, q);
        {
            std::shared_lock lock(mu_);
            if (auto it = fq_cache_.find(key); it != fq_cache_.end())
                return it->second;
        }
        FqResult r = solve(H, q);
        std::unique_lock lock(mu_);
        return fq_cache_.emplace(key, std::move(r)).first->second;
    }

    std::size_t density_runs() const
    {
        std::shared_lock lock(mu_);
        return density_runs_;
    }
    std::size_t calibrations() const
    {
        std::shared_lock lock(mu_);
        return calibrations_;
    }

private:
    // Over an unramified O_q a rank-2 H is determined up to equivalence by
    // its Jordan exponents, so those index the cache there.
    std::string cache_key(const SemiIntegralHermitian &H, long long q) const
    {
        if (H.degree() == 2 && K_.D() % q != 0) {
            auto [a, b] = detail::unramified_jordan(H, q);
            return std::to_string(q) + "|J" + std::to_string(a) + "," + std::to_string(b);
        }
        return std::to_string(q) + "|" + canonical_key(H);
    }

    FqResult solve(const SemiIntegralHermitian &H, long long q)
    {
        const int n = H.degree();
        if (n < 1 || n > 2)
            throw std::invalid_argument("fq_solve: rank must be 1 or 2");
        const long long g = gamma(H);
        FqResult r;
        r.d = detail::ordq(g, q);
        r.xi = local_character(K_, Place::at(q), Rational(g));
        r.poly.q = q;
        if (r.d == 0)
            return r;
        auto forced = fe_forced(q, r.d, r.xi, n);
        if (forced && opt_.use_forced) {
            r.poly = *forced;
            r.route = FqRoute::functional_equation;
            return r;
        }

        const BridgeParameters bp = bridge(q);
        r.route = FqRoute::density;
        r.model = bp.name();
        if (bp.model == DensityModel::identity && K_.D() % q == 0) {
            try {
                (void)detail::identity_coordinates(H, detail::make_shape(q, 1, n));
            } catch (const RamifiedNonintegral &e) {
                throw NotComputable(e.what());
            }
        }

        // d+1 interpolation nodes plus one extra node as an independent check.
        std::vector<int> ks;
        const bool consecutive = bp.model == DensityModel::identity
                                 && (n == 1 || (K_.D() % q != 0 && detail::unramified_jordan(H, q).first == 0));
        for (int i = 0; i <= r.d + 1; ++i)
            ks.push_back(consecutive ? 2 * n + 1 + i : 2 * n + 2 + 2 * i);

        DensityProfile prof;
        try {
            prof = density_profile(K_.D(), q, bp.model, H, ks, opt_.limits);
        } catch (const RamifiedNonintegral &e) {
            throw NotComputable(e.what());
        }
        {
            std::unique_lock lock(mu_);
            ++density_runs_;
        }
        r.levels = prof.level;

        std::vector<Rational> xs, ys;
        for (int i = 0; i <= r.d; ++i) {
            const int k = ks[static_cast<std::size_t>(i)];
            xs.push_back(bp.t(k));
            ys.push_back(prof.alpha.at(k) / bp.u(k, n));
        }
        const auto coeffs = detail::interpolate(xs, ys);

        SiegelPolynomial cand{q, {}};
        bool integral = true;
        for (const auto &c : coeffs) {
            integral = integral && c.is_integer();
            cand.coeffs.push_back(c.is_integer() ? c.num() : BigInt(0));
        }
        const int kx = ks.back();
        const bool extra_ok = prof.alpha.at(kx) == bp.u(kx, n) * cand.evaluate(bp.t(kx));
        const bool fe_ok = functional_equation_check(cand, q, r.d, r.xi, n);
        bool forced_ok = true;
        if (forced)
            forced_ok = cand == *forced;
        if (!integral || cand.coeffs.front() != 1 || !fe_ok || !forced_ok || !extra_ok) {
            std::string why = !integral ? "non-integral coefficients"
                              : cand.coeffs.front() != 1 ? "constant term is not 1"
                              : !fe_ok                    ? "functional equation fails"
                              : !forced_ok                ? "disagrees with the forced polynomial"
                                                          : "extra density node off the polynomial";
            throw FqInconsistent(canonical_key(H) + " at q=" + std::to_string(q) + ": " + why, cand,
                                 detail::reflect(cand, r.d, r.xi, n));
        }
        r.poly = cand;
        return r;
    }

    ImaginaryQuadraticField K_;
    SolverOptions opt_;
    mutable std::shared_mutex mu_;
    std::map<long long, BridgeParameters> bridges_;
    std::map<std::string, FqResult> fq_cache_;
    std::size_t density_runs_ = 0;
    std::size_t calibrations_ = 0;
};

inline FqResult fq_solve(const ImaginaryQuadraticField &K, long long q, const SemiIntegralHermitian &H,
                         SolverOptions opt = {})
{
    SiegelSolver solver(K.D(), opt);
    return solver.fq(H, q);
}

} // namespace heis
