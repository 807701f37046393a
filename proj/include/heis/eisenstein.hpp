#pragma once

// Fourier coefficients of Hermitian Eisenstein series via the Euler product
//   a(E_k^(m), H) = 2^r prod_{i<r} (-B_{k-i,chi^i}/(k-i))^{-1} prod_{q | gamma} F_q(H, q^{k-2r}),
// coefficient tables, the Siegel and theta operators, and mod-p classifiers.

#include "siegel.hpp"

#include <json.hpp>

#include <atomic>
#include <exception>
#include <map>
#include <ostream>
#include <thread>

namespace heis {

/// -B_{n,chi^i}/n, with chi^i trivial (ordinary Bernoulli) for even i.
inline Rational bernoulli_factor(const ImaginaryQuadraticField &K, unsigned n, int i)
{
    const Rational B = i % 2 == 0 ? bernoulli(n) : generalized_bernoulli(n, K.chi());
    return -B / Rational(static_cast<long>(n));
}

/// 2^r prod_{i<r} (-B_{k-i,chi^i}/(k-i))^{-1}.
inline Rational bernoulli_prefactor(const ImaginaryQuadraticField &K, int k, int r)
{
    Rational acc = Rational(2).pow(r);
    for (int i = 0; i < r; ++i) {
        const Rational f = bernoulli_factor(K, static_cast<unsigned>(k - i), i);
        if (f.is_zero())
            throw std::domain_error("bernoulli_prefactor: vanishing Bernoulli factor at n=" + std::to_string(k - i));
        acc *= f.inverse();
    }
    return acc;
}

struct CoefficientResult
{
    bool computable = true;
    Rational value;
    std::string note; // reason when not computable
    int rank = 0;
    std::vector<FqResult> local; // F_q for q | gamma of the nondegenerate block
};

namespace detail {
inline void check_weight(int k, int m)
{
    if (k % 2 != 0 || k <= 2 * m)
        throw std::invalid_argument("weight " + std::to_string(k) + " must be even and exceed 2m = "
                                    + std::to_string(2 * m));
}
} // namespace detail

inline CoefficientResult eisenstein_coefficient(SiegelSolver &solver, int k, int m, const SemiIntegralHermitian &H)
{
    detail::check_weight(k, m);
    if (H.degree() != m)
        throw std::invalid_argument("eisenstein_coefficient: H has degree " + std::to_string(H.degree()));
    CoefficientResult res;
    const int r = padded_block_size(H);
    res.rank = r;
    if (r == 0) {
        res.value = Rational(1);
        return res;
    }
    const SemiIntegralHermitian block = H.leading_block(r);
    if (!is_positive_definite(block))
        throw std::invalid_argument("eisenstein_coefficient: " + canonical_key(H)
                                    + " is not a zero-padded positive definite block");
    const auto &K = solver.field();
    Rational value = bernoulli_prefactor(K, k, r);
    const long long g = gamma(block);
    try {
        for (auto [q, e] : factorize(g)) {
            FqResult f = solver.fq(block, q);
            value *= f.poly.evaluate(Rational(q).pow(k - 2 * r));
            res.local.push_back(std::move(f));
        }
    } catch (const SiegelError &e) {
        res.computable = false;
        res.note = e.what();
        return res;
    }
    res.value = value;
    return res;
}

// ---------------------------------------------------------------------------
// Normalization and the degree-(m+1) prefactor.

struct NormalizationData
{
    long long p = 0;
    int k = 0;
    long C_p = 0;
    long prefactor_valuation = 0; // ord_p of p^{-C_p} times the degree-(m+1) Bernoulli product
};

inline NormalizationData compute_cp(const ImaginaryQuadraticField &K, long long p, int m)
{
    if (K.D() % p == 0)
        throw std::invalid_argument("compute_cp: p divides D_K");
    const int k = m + static_cast<int>(p) - 1;
    auto product = [&](int terms) {
        Rational acc(1);
        for (int i = 0; i < terms; ++i) {
            const Rational f = bernoulli_factor(K, static_cast<unsigned>(k - i), i);
            if (f.is_zero())
                throw std::domain_error("compute_cp: vanishing Bernoulli factor");
            acc *= f.inverse();
        }
        return acc;
    };
    NormalizationData nd;
    nd.p = p;
    nd.k = k;
    nd.C_p = *ordp(product(m), static_cast<long>(p)).value;
    nd.prefactor_valuation = *ordp(product(m + 1), static_cast<long>(p)).value - nd.C_p;
    return nd;
}

/// Hypotheses of the main theorem: p prime, p odd, p not dividing D_K,
/// p > m + 3 and m = 2 mod 4. Returns the unmet ones.
inline std::vector<std::string> main_theorem_gaps(const ImaginaryQuadraticField &K, long long p, int m)
{
    std::vector<std::string> gaps;
    if (!is_prime(p))
        gaps.push_back(std::to_string(p) + " is not prime");
    if (m % 4 != 2)
        gaps.push_back("m = " + std::to_string(m) + " is not 2 mod 4");
    if (!(p > m + 3))
        gaps.push_back("p > m+3 fails");
    if (K.D() % p == 0)
        gaps.push_back("p | D_K");
    return gaps;
}

inline long prefactor_valuation_next_degree(const ImaginaryQuadraticField &K, long long p, int m)
{
    auto gaps = main_theorem_gaps(K, p, m);
    if (!gaps.empty())
        throw std::invalid_argument("prefactor_valuation_next_degree: " + gaps.front());
    return compute_cp(K, p, m).prefactor_valuation;
}

// ---------------------------------------------------------------------------
// Coefficient tables.

enum class EntryStatus { computed, not_computable };

inline const char *to_string(EntryStatus s) { return s == EntryStatus::computed ? "computed" : "not-computable"; }

struct TableEntry
{
    Rational value;
    EntryStatus status = EntryStatus::computed;
    std::string note;
    std::vector<SiegelPolynomial> local; // F_q for q | gamma of the nondegenerate block

    friend bool operator==(const TableEntry &, const TableEntry &) = default;
};

struct FourierTable
{
    long long D = 4;
    int k = 0;
    int m = 0;
    long long max_diag = 0;
    std::map<std::string, TableEntry> entries; // ordered by canonical key

    const TableEntry &at(const std::string &key) const
    {
        auto it = entries.find(key);
        if (it == entries.end())
            throw std::out_of_range("FourierTable: no entry " + key);
        return it->second;
    }
    bool contains(const std::string &key) const { return entries.count(key) != 0; }
    SemiIntegralHermitian matrix(const std::string &key) const { return parse_key(D, key); }
};

/// Runs fn(i) for i in [0, count) on a small worker pool.
template <class Fn>
void parallel_for(std::size_t count, Fn &&fn, unsigned threads = std::thread::hardware_concurrency())
{
    threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(count)));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < count;) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mu);
                if (!failure)
                    failure = std::current_exception();
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(worker);
    }
    if (failure)
        std::rethrow_exception(failure);
}

/// Matrices indexing a degree-m table: the zero matrix, the positive scan,
/// and zero-padded copies of the degree-(m-1) index set.
inline std::vector<SemiIntegralHermitian> table_domain(long long D, int m, long long max_diag)
{
    if (m < 0 || m > 2)
        throw std::invalid_argument("build_table: degree must be 0, 1 or 2");
    std::vector<SemiIntegralHermitian> out{SemiIntegralHermitian::zero(D, m)};
    if (m == 0)
        return out;
    for (auto &H : enumerate_positive(D, m, max_diag))
        out.push_back(std::move(H));
    for (const auto &H : table_domain(D, m - 1, max_diag)) {
        auto padded = embed_zero_block(H);
        if (!padded.is_zero())
            out.push_back(std::move(padded));
    }
    return out;
}

inline FourierTable build_table(SiegelSolver &solver, int k, int m, long long max_diag)
{
    detail::check_weight(k, m);
    const long long D = solver.field().D();
    const auto domain = table_domain(D, m, max_diag);
    std::vector<TableEntry> results(domain.size());
    parallel_for(domain.size(), [&](std::size_t i) {
        auto c = eisenstein_coefficient(solver, k, m, domain[i]);
        if (!c.computable) {
            results[i] = TableEntry{Rational(0), EntryStatus::not_computable, c.note, {}};
            return;
        }
        results[i] = TableEntry{c.value, EntryStatus::computed, {}, {}};
        for (const auto &f : c.local)
            results[i].local.push_back(f.poly);
    });
    FourierTable T{D, k, m, max_diag, {}};
    for (std::size_t i = 0; i < domain.size(); ++i)
        T.entries.emplace(canonical_key(domain[i]), std::move(results[i]));
    return T;
}

inline FourierTable siegel_phi(const FourierTable &T, const std::vector<std::string> &required = {})
{
    if (T.m < 1)
        throw std::invalid_argument("siegel_phi: degree-0 table");
    FourierTable out{T.D, T.k, T.m - 1, T.max_diag, {}};
    for (const auto &[key, e] : T.entries) {
        const auto H = parse_key(T.D, key);
        if (padded_block_size(H) < T.m)
            out.entries.emplace(canonical_key(H.leading_block(T.m - 1)), e);
    }
    const std::string zero = canonical_key(SemiIntegralHermitian::zero(T.D, T.m - 1));
    if (!out.contains(zero))
        throw std::out_of_range("siegel_phi: padded zero matrix missing");
    for (const auto &key : required)
        if (!out.contains(key))
            throw std::out_of_range("siegel_phi: padded entry for " + key + " missing");
    return out;
}

inline FourierTable theta_op(const FourierTable &T)
{
    FourierTable out = T;
    for (auto &[key, e] : out.entries)
        if (e.status == EntryStatus::computed)
            e.value *= det_h(parse_key(T.D, key));
    return out;
}

// ---------------------------------------------------------------------------
// Mod-p classification.

struct Classification
{
    bool singular = true;
    bool theta_kernel = true;
    bool essential = false;
    bool p_integral = true;
    std::size_t positive_entries = 0;
    std::size_t not_computable = 0;
    std::vector<std::string> witnesses;   // gamma = -p, nonzero mod p
    std::vector<std::string> non_integral; // keys with ord_p < 0

    // "singular/kernel within computable subset" when entries were skipped.
    std::string scope() const
    {
        if (!p_integral)
            return "not-p-integral";
        return not_computable ? "within-computable-subset" : "within-bound";
    }
};

inline Classification classify_mod_p(const FourierTable &T, long long p)
{
    Classification c;
    for (const auto &[key, e] : T.entries) {
        const auto H = parse_key(T.D, key);
        if (H.degree() == 0 || !is_positive_definite(H))
            continue;
        ++c.positive_entries;
        if (e.status != EntryStatus::computed) {
            ++c.not_computable;
            continue;
        }
        const auto res = congruent_mod_p(e.value, Rational(0), static_cast<long>(p));
        if (res == Congruence::not_p_integral) {
            c.p_integral = false;
            c.non_integral.push_back(key);
            continue;
        }
        const bool zero_mod_p = res == Congruence::congruent;
        const long long g = gamma(H);
        if (!zero_mod_p) {
            c.singular = false;
            if (g % p != 0)
                c.theta_kernel = false;
            if (g == -p)
                c.witnesses.push_back(key);
        }
    }
    c.essential = c.theta_kernel && !c.singular;
    return c;
}

// ---------------------------------------------------------------------------
// Export: one record per entry in canonical-key order.

inline nlohmann::ordered_json entry_json(const std::string &key, const TableEntry &e)
{
    nlohmann::ordered_json j;
    j["key"] = key;
    j["value"] = e.status == EntryStatus::computed ? e.value.to_string() : std::string();
    j["status"] = to_string(e.status);
    if (!e.note.empty())
        j["note"] = e.note;
    return j;
}

inline void export_jsonl(const FourierTable &T, std::ostream &os)
{
    for (const auto &[key, e] : T.entries)
        os << entry_json(key, e).dump() << '\n';
}

inline void export_csv(const FourierTable &T, std::ostream &os)
{
    os << "key,numerator,denominator,status\n";
    for (const auto &[key, e] : T.entries) {
        os << '"' << key << "\",";
        if (e.status == EntryStatus::computed)
            os << e.value.num().get_str() << ',' << e.value.den().get_str();
        else
            os << ',';
        os << ',' << to_string(e.status) << '\n';
    }
}

} // namespace heis
