#pragma once

#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include "endo.hpp"

namespace crossprod
{

/// A dynamical system (A, alpha) shared by the elements of M(A). Holds a lazy
/// cache of the projections alpha^n(1).
class System
{
public:
    System() = default;
    explicit System(Endomorphism alpha) : d_(std::make_shared<Data>())
    {
        d_->alpha = std::move(alpha);
        d_->units.push_back(AlgElement::identity(d_->alpha.algebra()));
    }

    const Endomorphism& alpha() const
    {
        return d_->alpha;
    }
    const FdAlgebra& algebra() const
    {
        return d_->alpha.algebra();
    }
    bool valid() const
    {
        return d_ != nullptr;
    }

    /// alpha^n(1)
    const AlgElement& unit_power(int n) const
    {
        std::lock_guard<std::mutex> lock(d_->mu);
        while (static_cast<int>(d_->units.size()) <= n)
            d_->units.push_back(d_->alpha(d_->units.back()));
        return d_->units[n];
    }

    AlgElement apply_power(const AlgElement& a, int n) const
    {
        AlgElement x = a;
        for (int k = 0; k < n; ++k)
            x = d_->alpha(x);
        return x;
    }

    bool same(const System& o) const
    {
        return d_ == o.d_ || (d_ && o.d_ && d_->alpha == o.d_->alpha);
    }

private:
    struct Data
    {
        Endomorphism alpha;
        std::deque<AlgElement> units; // deque keeps references stable
        std::mutex mu;
    };
    std::shared_ptr<Data> d_;
};

/// One k-diagonal of an element of M(A). rows[n] is the entry a_n^{(k)},
/// sitting at (n, n+k) for k >= 0 and at (n+|k|, n) for k < 0.
struct DiagonalPart
{
    int k = 0;
    std::map<int, AlgElement> rows;

    int max_row() const
    {
        return rows.empty() ? -1 : rows.rbegin()->first;
    }
};

/// A finitely supported matrix over A with a_{i,j} in alpha^i(1) A alpha^j(1).
/// Entries are compressed on insertion and pruned below the tolerance.
class MatElement
{
public:
    using Index = std::pair<int, int>;

    MatElement() = default;
    explicit MatElement(System sys) : sys_(std::move(sys)) {}

    static MatElement embed(const System& sys, const AlgElement& a)
    {
        MatElement m(sys);
        m.set(0, 0, a);
        return m;
    }
    /// u = alpha(1) at (0,1)
    static MatElement u(const System& sys)
    {
        return u_power(sys, 1);
    }
    /// u^k = alpha^k(1) at (0,k)
    static MatElement u_power(const System& sys, int k)
    {
        MatElement m(sys);
        m.set(0, k, AlgElement::identity(sys.algebra()));
        return m;
    }

    const System& system() const
    {
        return sys_;
    }
    const FdAlgebra& algebra() const
    {
        return sys_.algebra();
    }
    const std::map<Index, AlgElement>& entries() const
    {
        return entries_;
    }
    bool is_zero() const
    {
        return entries_.empty();
    }
    std::size_t size() const
    {
        return entries_.size();
    }

    const AlgElement* find(int i, int j) const
    {
        auto it = entries_.find({i, j});
        return it == entries_.end() ? nullptr : &it->second;
    }
    AlgElement at(int i, int j) const
    {
        const AlgElement* p = find(i, j);
        return p ? *p : AlgElement::zero(algebra());
    }

    /// Store alpha^i(1) x alpha^j(1) at (i,j).
    void set(int i, int j, const AlgElement& x)
    {
        if (i < 0 || j < 0)
            throw UsageError("matrix indices must be nonnegative");
        if (!(x.algebra() == algebra()))
            throw UsageError("entry does not belong to the system's algebra");
        AlgElement c = sys_.unit_power(i) * x * sys_.unit_power(j);
        if (c.max_abs() < global_tolerance().prune)
            entries_.erase({i, j});
        else
            entries_[{i, j}] = std::move(c);
    }

    /// Add to (i,j) an element already known to be compressed.
    void accumulate(int i, int j, const AlgElement& x)
    {
        auto it = entries_.find({i, j});
        if (it == entries_.end())
            entries_.emplace(Index{i, j}, x);
        else
            it->second += x;
    }

    /// Drop entries that cancelled to (numerical) zero.
    void prune()
    {
        const double eps = global_tolerance().prune;
        for (auto it = entries_.begin(); it != entries_.end();)
        {
            if (it->second.max_abs() < eps)
                it = entries_.erase(it);
            else
                ++it;
        }
    }

    int max_index() const
    {
        int r = -1;
        for (const auto& [ij, _] : entries_)
            r = std::max({r, ij.first, ij.second});
        return r;
    }
    int max_row() const
    {
        int r = -1;
        for (const auto& [ij, _] : entries_)
            r = std::max(r, ij.first);
        return r;
    }
    int max_col() const
    {
        int r = -1;
        for (const auto& [ij, _] : entries_)
            r = std::max(r, ij.second);
        return r;
    }
    /// Smallest and largest k with a nonzero k-diagonal.
    std::pair<int, int> diagonal_range() const
    {
        int lo = 0, hi = 0;
        bool first = true;
        for (const auto& [ij, _] : entries_)
        {
            int k = ij.second - ij.first;
            lo = first ? k : std::min(lo, k);
            hi = first ? k : std::max(hi, k);
            first = false;
        }
        return {lo, hi};
    }

    void require_same(const MatElement& o) const
    {
        if (!sys_.same(o.sys_))
            throw UsageError("elements belong to different systems");
    }

    MatElement& operator+=(const MatElement& o)
    {
        require_same(o);
        for (const auto& [ij, x] : o.entries_)
            accumulate(ij.first, ij.second, x);
        prune();
        return *this;
    }
    MatElement& operator-=(const MatElement& o)
    {
        require_same(o);
        for (const auto& [ij, x] : o.entries_)
            accumulate(ij.first, ij.second, -x);
        prune();
        return *this;
    }
    MatElement& operator*=(Complex s)
    {
        for (auto& [_, x] : entries_)
            x *= s;
        prune();
        return *this;
    }
    friend MatElement operator+(MatElement a, const MatElement& b)
    {
        return a += b;
    }
    friend MatElement operator-(MatElement a, const MatElement& b)
    {
        return a -= b;
    }
    friend MatElement operator*(Complex s, MatElement a)
    {
        return a *= s;
    }

    /// Largest entrywise difference (max over entries of the max block-matrix entry).
    double max_abs_diff(const MatElement& o) const
    {
        MatElement d = *this;
        for (const auto& [ij, x] : o.entries_)
            d.accumulate(ij.first, ij.second, -x);
        double m = 0;
        for (const auto& [_, x] : d.entries_)
            m = std::max(m, x.max_abs());
        return m;
    }

private:
    System sys_;
    std::map<Index, AlgElement> entries_;
};

inline MatElement add(const MatElement& a, const MatElement& b)
{
    return a + b;
}
inline MatElement scale(Complex s, const MatElement& a)
{
    return s * a;
}

inline MatElement adjoint(const MatElement& a)
{
    MatElement r(a.system());
    for (const auto& [ij, x] : a.entries())
        r.accumulate(ij.second, ij.first, x.adjoint());
    return r;
}

/// Lambda(a)_{i,j} = alpha(a_{i-1,j-1}).
inline MatElement lambda_shift(const MatElement& a)
{
    MatElement r(a.system());
    const Endomorphism& al = a.system().alpha();
    for (const auto& [ij, x] : a.entries())
        r.accumulate(ij.first + 1, ij.second + 1, al(x));
    r.prune();
    return r;
}

/// Ordinary matrix product (a b)_{m,n} = sum_l a_{m,l} b_{l,n}.
inline MatElement standard_product(const MatElement& a, const MatElement& b)
{
    a.require_same(b);
    MatElement r(a.system());
    for (const auto& [ij, x] : a.entries())
        for (const auto& [kl, y] : b.entries())
            if (ij.second == kl.first)
                r.accumulate(ij.first, kl.second, x * y);
    r.prune();
    return r;
}

namespace detail
{
// alpha^j of one entry, computed incrementally and kept for reuse.
class PowerCache
{
public:
    explicit PowerCache(const Endomorphism& al) : al_(al) {}

    const AlgElement& get(const AlgElement* key, int j)
    {
        auto& v = cache_[key];
        if (v.empty())
            v.push_back(*key);
        while (static_cast<int>(v.size()) <= j)
            v.push_back(al_(v.back()));
        return v[j];
    }

private:
    const Endomorphism& al_;
    std::map<const AlgElement*, std::vector<AlgElement>> cache_;
};
} // namespace detail

/// The convolution a * b = a . sum_{j>=0} Lambda^j(b) + sum_{j>=1} Lambda^j(a) . b.
///
/// Evaluated pairwise: a_{m,i} against b_{s,t} contributes a_{m,i} alpha^{i-s}(b_{s,t})
/// at (m, t+i-s) when i >= s, and alpha^{s-i}(a_{m,i}) b_{s,t} at (m+s-i, t) when s > i.
inline MatElement star(const MatElement& a, const MatElement& b)
{
    a.require_same(b);
    MatElement r(a.system());
    detail::PowerCache pa(a.system().alpha()), pb(a.system().alpha());
    for (const auto& [mi, x] : a.entries())
        for (const auto& [st, y] : b.entries())
        {
            const int m = mi.first, i = mi.second, s = st.first, t = st.second;
            if (i >= s)
                r.accumulate(m, t + i - s, x * pb.get(&y, i - s));
            else
                r.accumulate(m + s - i, t, pa.get(&x, s - i) * y);
        }
    r.prune();
    return r;
}

/// The n-fold star power, n >= 1.
inline MatElement star_power(const MatElement& a, int n)
{
    if (n < 1)
        throw DomainError("star_power needs a positive exponent");
    MatElement r = a;
    for (int k = 1; k < n; ++k)
        r = star(r, a);
    return r;
}

inline DiagonalPart diagonal(const MatElement& a, int k)
{
    DiagonalPart d;
    d.k = k;
    for (const auto& [ij, x] : a.entries())
        if (ij.second - ij.first == k)
            d.rows.emplace(std::min(ij.first, ij.second), x);
    return d;
}

/// All nonzero diagonals of a, keyed by k.
inline std::map<int, DiagonalPart> diagonals(const MatElement& a)
{
    std::map<int, DiagonalPart> r;
    for (const auto& [ij, x] : a.entries())
    {
        const int k = ij.second - ij.first;
        auto& d = r[k];
        d.k = k;
        d.rows.emplace(std::min(ij.first, ij.second), x);
    }
    return r;
}

/// Place a diagonal back into M(A).
inline MatElement from_diagonal(const System& sys, const DiagonalPart& d)
{
    MatElement r(sys);
    for (const auto& [n, x] : d.rows)
    {
        if (d.k >= 0)
            r.set(n, n + d.k, x);
        else
            r.set(n - d.k, n, x);
    }
    return r;
}

/// The Fourier coefficient map N_k: the k-diagonal re-indexed onto the main diagonal.
inline DiagonalPart n_k(const MatElement& a, int k)
{
    DiagonalPart d = diagonal(a, k);
    d.k = 0;
    return d;
}

inline MatElement n_k_element(const MatElement& a, int k)
{
    return from_diagonal(a.system(), n_k(a, k));
}

/// Restriction to the main diagonal.
inline MatElement main_diagonal(const MatElement& a)
{
    return from_diagonal(a.system(), diagonal(a, 0));
}

/// Gauge action: the k-diagonal is multiplied by z^k.
inline MatElement gauge(const MatElement& a, Complex z)
{
    if (std::abs(std::abs(z) - 1.0) > 1e-12)
        throw DomainError("gauge parameter must have modulus one");
    MatElement r(a.system());
    for (const auto& [ij, x] : a.entries())
        r.accumulate(ij.first, ij.second, std::pow(z, ij.second - ij.first) * x);
    return r;
}

/// The system (A/S, alpha_S) for an alpha-invariant block ideal S.
inline System quotient_system(const System& sys, const BlockIdeal& s)
{
    return System(quotient_endomorphism(sys.alpha(), s));
}

/// Entrywise quotient map onto M(A/S), landing in the given quotient system.
inline MatElement pushforward(const MatElement& a, const BlockIdeal& s, const System& target)
{
    if (!invariant(a.system().alpha(), s))
        throw DomainError("pushforward needs an alpha-invariant ideal");
    Quotient q = quotient(s);
    if (!(target.algebra() == q.algebra))
        throw UsageError("target system does not match the quotient algebra");
    MatElement r(target);
    if (q.degenerate())
        return r;
    for (const auto& [ij, x] : a.entries())
        r.set(ij.first, ij.second, q(x));
    return r;
}

inline MatElement pushforward(const MatElement& a, const BlockIdeal& s)
{
    return pushforward(a, s, quotient_system(a.system(), s));
}

/// Random element with the given support box, entries Gaussian.
template <class Rng>
MatElement random_mat_element(const System& sys, Rng& rng, int rows, int cols, double density = 1.0)
{
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    MatElement r(sys);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            if (coin(rng) < density)
                r.set(i, j, random_element(sys.algebra(), rng));
    return r;
}

/// Random k-diagonal with rows 0..n-1.
template <class Rng>
DiagonalPart random_diagonal(const System& sys, Rng& rng, int k, int n)
{
    MatElement m(sys);
    for (int r = 0; r < n; ++r)
    {
        if (k >= 0)
            m.set(r, r + k, random_element(sys.algebra(), rng));
        else
            m.set(r - k, r, random_element(sys.algebra(), rng));
    }
    return diagonal(m, k);
}

} // namespace crossprod
