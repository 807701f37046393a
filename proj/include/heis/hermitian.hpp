#pragma once

// The ring O_K = Z[omega], omega = (-D + sqrt(-D))/2, and semi-integral
// Hermitian matrices over it. Off-diagonal entries are stored as
// t_jl = sqrt(-D) * h_jl, which lies in O_K by definition of the lattice.

#include "arith.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace heis {

struct AlgebraicInteger
{
    long long x = 0;
    long long y = 0;

    bool is_zero() const { return x == 0 && y == 0; }
    friend bool operator==(const AlgebraicInteger &, const AlgebraicInteger &) = default;
    friend auto operator<=>(const AlgebraicInteger &, const AlgebraicInteger &) = default;
};

class IntegerRing
{
public:
    explicit IntegerRing(long long D) : D_(D), C_(D * (D + 1) / 4) {}

    long long D() const { return D_; }
    // omega^2 = -D omega - C
    long long omega_norm() const { return C_; }

    AlgebraicInteger add(AlgebraicInteger a, AlgebraicInteger b) const { return {a.x + b.x, a.y + b.y}; }
    AlgebraicInteger sub(AlgebraicInteger a, AlgebraicInteger b) const { return {a.x - b.x, a.y - b.y}; }
    AlgebraicInteger mul(AlgebraicInteger a, AlgebraicInteger b) const
    {
        return {a.x * b.x - C_ * a.y * b.y, a.x * b.y + a.y * b.x - D_ * a.y * b.y};
    }
    AlgebraicInteger conj(AlgebraicInteger a) const { return {a.x - D_ * a.y, -a.y}; }
    long long norm(AlgebraicInteger a) const { return a.x * a.x - D_ * a.x * a.y + C_ * a.y * a.y; }
    AlgebraicInteger sqrt_minus_d() const { return {D_, 2}; }

private:
    long long D_;
    long long C_;
};

// a + b sqrt(-D) with rational a, b.
struct FieldElement
{
    Rational a;
    Rational b;

    bool is_zero() const { return a.is_zero() && b.is_zero(); }
    friend bool operator==(const FieldElement &, const FieldElement &) = default;
};

class FieldArith
{
public:
    explicit FieldArith(long long D) : D_(D) {}

    FieldElement from(const AlgebraicInteger &t) const
    {
        return {Rational(t.x) - Rational(D_ * t.y, 2), Rational(t.y, 2)};
    }
    FieldElement add(const FieldElement &u, const FieldElement &v) const { return {u.a + v.a, u.b + v.b}; }
    FieldElement sub(const FieldElement &u, const FieldElement &v) const { return {u.a - v.a, u.b - v.b}; }
    FieldElement mul(const FieldElement &u, const FieldElement &v) const
    {
        return {u.a * v.a - Rational(D_) * u.b * v.b, u.a * v.b + u.b * v.a};
    }
    FieldElement conj(const FieldElement &u) const { return {u.a, -u.b}; }
    Rational norm(const FieldElement &u) const { return u.a * u.a + Rational(D_) * u.b * u.b; }
    FieldElement inverse(const FieldElement &u) const
    {
        Rational n = norm(u);
        return {u.a / n, -u.b / n};
    }
    // t / sqrt(-D) = b - (a/D) sqrt(-D)
    FieldElement div_sqrt_minus_d(const FieldElement &t) const { return {t.b, -t.a / Rational(D_)}; }

private:
    long long D_;
};

class SemiIntegralHermitian
{
public:
    SemiIntegralHermitian() = default;
    SemiIntegralHermitian(long long D, std::vector<long long> diag, std::vector<AlgebraicInteger> upper)
        : D_(D), diag_(std::move(diag)), upper_(std::move(upper))
    {
        const std::size_t m = diag_.size();
        if (upper_.size() != m * (m - (m ? 1 : 0)) / 2)
            throw std::invalid_argument("SemiIntegralHermitian: expected " + std::to_string(m * (m ? m - 1 : 0) / 2)
                                        + " off-diagonal entries");
    }

    static SemiIntegralHermitian zero(long long D, int m)
    {
        return {D, std::vector<long long>(m, 0), std::vector<AlgebraicInteger>(m * (m ? m - 1 : 0) / 2)};
    }
    static SemiIntegralHermitian diagonal(long long D, std::vector<long long> d)
    {
        const std::size_t m = d.size();
        return {D, std::move(d), std::vector<AlgebraicInteger>(m * (m ? m - 1 : 0) / 2)};
    }

    long long D() const { return D_; }
    int degree() const { return static_cast<int>(diag_.size()); }
    const std::vector<long long> &diag() const { return diag_; }
    const std::vector<AlgebraicInteger> &upper() const { return upper_; }

    // Position of (j, l), j < l, in the row-major strict upper triangle.
    std::size_t upper_index(int j, int l) const
    {
        const int m = degree();
        return static_cast<std::size_t>(j * m - j * (j + 1) / 2 + (l - j - 1));
    }
    const AlgebraicInteger &t(int j, int l) const { return upper_[upper_index(j, l)]; }

    FieldElement entry(int j, int l) const
    {
        FieldArith F(D_);
        if (j == l)
            return {Rational(diag_[j]), Rational(0)};
        if (j < l)
            return F.div_sqrt_minus_d(F.from(t(j, l)));
        return F.conj(F.div_sqrt_minus_d(F.from(t(l, j))));
    }

    bool is_zero() const
    {
        for (long long d : diag_)
            if (d)
                return false;
        for (const auto &t : upper_)
            if (!t.is_zero())
                return false;
        return true;
    }

    // Leading r x r block.
    SemiIntegralHermitian leading_block(int r) const
    {
        std::vector<long long> d(diag_.begin(), diag_.begin() + r);
        std::vector<AlgebraicInteger> u;
        for (int j = 0; j < r; ++j)
            for (int l = j + 1; l < r; ++l)
                u.push_back(t(j, l));
        return {D_, std::move(d), std::move(u)};
    }

    friend bool operator==(const SemiIntegralHermitian &, const SemiIntegralHermitian &) = default;

private:
    long long D_ = 4;
    std::vector<long long> diag_;
    std::vector<AlgebraicInteger> upper_;
};

namespace detail {
inline int elimination_rank(const SemiIntegralHermitian &H)
{
    const int r = H.degree();
    FieldArith F(H.D());
    std::vector<std::vector<FieldElement>> a(r, std::vector<FieldElement>(r));
    for (int j = 0; j < r; ++j)
        for (int l = 0; l < r; ++l)
            a[j][l] = H.entry(j, l);
    int rank = 0;
    for (int col = 0; col < r && rank < r; ++col) {
        int piv = rank;
        while (piv < r && a[piv][col].is_zero())
            ++piv;
        if (piv == r)
            continue;
        std::swap(a[piv], a[rank]);
        FieldElement inv = F.inverse(a[rank][col]);
        for (int row = rank + 1; row < r; ++row) {
            if (a[row][col].is_zero())
                continue;
            FieldElement f = F.mul(a[row][col], inv);
            for (int c = col; c < r; ++c)
                a[row][c] = F.sub(a[row][c], F.mul(f, a[rank][c]));
        }
        ++rank;
    }
    return rank;
}
} // namespace detail

// Gaussian elimination over K with row swaps.
inline Rational det_h(const SemiIntegralHermitian &H, int r = -1)
{
    if (r < 0)
        r = H.degree();
    if (r == 0)
        return Rational(1);
    FieldArith F(H.D());
    std::vector<std::vector<FieldElement>> a(r, std::vector<FieldElement>(r));
    for (int j = 0; j < r; ++j)
        for (int l = 0; l < r; ++l)
            a[j][l] = H.entry(j, l);
    FieldElement det{Rational(1), Rational(0)};
    int sign = 1;
    for (int col = 0; col < r; ++col) {
        int piv = col;
        while (piv < r && a[piv][col].is_zero())
            ++piv;
        if (piv == r)
            return Rational(0);
        if (piv != col) {
            std::swap(a[piv], a[col]);
            sign = -sign;
        }
        det = F.mul(det, a[col][col]);
        FieldElement inv = F.inverse(a[col][col]);
        for (int row = col + 1; row < r; ++row) {
            if (a[row][col].is_zero())
                continue;
            FieldElement f = F.mul(a[row][col], inv);
            for (int c = col; c < r; ++c)
                a[row][c] = F.sub(a[row][c], F.mul(f, a[col][c]));
        }
    }
    if (!det.b.is_zero())
        throw std::logic_error("det_h: non-real determinant of a Hermitian matrix");
    return sign > 0 ? det.a : -det.a;
}

inline int rank_h(const SemiIntegralHermitian &H) { return detail::elimination_rank(H); }

inline bool is_positive_definite(const SemiIntegralHermitian &H)
{
    for (int r = 1; r <= H.degree(); ++r)
        if (det_h(H, r).sign() <= 0)
            return false;
    return true;
}

/// gamma(H) = (-D)^{floor(m/2)} det H for nondegenerate H.
inline long long gamma(const SemiIntegralHermitian &H)
{
    Rational d = det_h(H);
    if (d.is_zero())
        throw std::invalid_argument("gamma: rank-deficient matrix");
    Rational g = Rational(-H.D()).pow(H.degree() / 2) * d;
    if (!g.is_integer())
        throw std::logic_error("gamma: non-integral value " + g.to_string());
    if (!g.num().fits_slong_p())
        throw std::overflow_error("gamma: value exceeds machine range");
    return g.num().get_si();
}

inline SemiIntegralHermitian embed_zero_block(const SemiIntegralHermitian &H)
{
    const int m = H.degree();
    std::vector<long long> d = H.diag();
    d.push_back(0);
    std::vector<AlgebraicInteger> u;
    for (int j = 0; j <= m; ++j)
        for (int l = j + 1; l <= m; ++l)
            u.push_back(l < m ? H.t(j, l) : AlgebraicInteger{});
    return {H.D(), std::move(d), std::move(u)};
}

/// Size r of the leading block when every row and column from r on is zero.
inline int padded_block_size(const SemiIntegralHermitian &H)
{
    int r = H.degree();
    auto row_zero = [&](int j) {
        if (H.diag()[j] != 0)
            return false;
        for (int l = 0; l < H.degree(); ++l)
            if (l != j && !H.t(std::min(j, l), std::max(j, l)).is_zero())
                return false;
        return true;
    };
    while (r > 0 && row_zero(r - 1))
        --r;
    return r;
}

inline std::vector<SemiIntegralHermitian> enumerate_positive(long long D, int m, long long max_diag)
{
    if (m < 1 || m > 2)
        throw std::invalid_argument("enumerate_positive: only degrees 1 and 2 are supported");
    std::vector<SemiIntegralHermitian> out;
    if (m == 1) {
        for (long long h = 1; h <= max_diag; ++h)
            out.push_back(SemiIntegralHermitian::diagonal(D, {h}));
        return out;
    }
    IntegerRing O(D);
    for (long long a = 1; a <= max_diag; ++a)
        for (long long b = a; b <= max_diag; ++b) {
            const long long bound = D * a * b; // norm(t) < D a b
            std::vector<AlgebraicInteger> ts;
            const long long ymax = static_cast<long long>(std::sqrt(4.0 * a * b)) + 1;
            const long long xr = static_cast<long long>(std::sqrt(static_cast<double>(bound))) + 2;
            for (long long y = -ymax; y <= ymax; ++y) {
                const long long centre = (D * y) / 2;
                for (long long x = centre - xr; x <= centre + xr; ++x)
                    if (O.norm({x, y}) < bound)
                        ts.push_back({x, y});
            }
            std::sort(ts.begin(), ts.end());
            for (const auto &t : ts)
                out.push_back(SemiIntegralHermitian(D, {a, b}, {t}));
        }
    return out;
}

inline std::string canonical_key(const SemiIntegralHermitian &H)
{
    const int m = H.degree();
    if (m == 0)
        return "0";
    std::ostringstream os;
    os << m << ';';
    for (int j = 0; j < m; ++j)
        os << (j ? "," : "") << H.diag()[j];
    for (const auto &t : H.upper())
        os << ';' << t.x << ',' << t.y;
    return os.str();
}

inline SemiIntegralHermitian parse_key(long long D, const std::string &key)
{
    auto fail = [&] { return std::invalid_argument("parse_key: malformed key '" + key + "'"); };
    std::vector<std::string> parts;
    std::stringstream ss(key);
    for (std::string item; std::getline(ss, item, ';');)
        parts.push_back(item);
    if (parts.empty())
        throw fail();
    auto to_ll = [&](const std::string &s) {
        std::size_t pos = 0;
        long long v = 0;
        try {
            v = std::stoll(s, &pos);
        } catch (const std::exception &) {
            throw fail();
        }
        if (pos != s.size())
            throw fail();
        return v;
    };
    auto split_commas = [&](const std::string &s) {
        std::vector<long long> v;
        std::stringstream in(s);
        for (std::string item; std::getline(in, item, ',');)
            v.push_back(to_ll(item));
        return v;
    };
    const long long m = to_ll(parts[0]);
    if (m < 0 || m > 8)
        throw fail();
    if (m == 0) {
        if (parts.size() != 1)
            throw fail();
        return SemiIntegralHermitian::zero(D, 0);
    }
    const std::size_t pairs = static_cast<std::size_t>(m * (m - 1) / 2);
    if (parts.size() != 2 + pairs)
        throw fail();
    auto diag = split_commas(parts[1]);
    if (diag.size() != static_cast<std::size_t>(m))
        throw fail();
    std::vector<AlgebraicInteger> upper;
    for (std::size_t i = 0; i < pairs; ++i) {
        auto xy = split_commas(parts[2 + i]);
        if (xy.size() != 2)
            throw fail();
        upper.push_back({xy[0], xy[1]});
    }
    return {D, std::move(diag), std::move(upper)};
}

} // namespace heis
