#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "algebra.hpp"

namespace crossprod
{

/// A *-endomorphism of a block algebra in canonical multiplicity form:
///
///   alpha(a)_c = V_c (a_0^{(m_c0)} + a_1^{(m_c1)} + ... + 0_{z_c}) V_c^*
///
/// where a_b^{(m)} repeats the block a_b m times along the diagonal.
/// Every *-homomorphism between block algebras is unitarily of this form.
class Endomorphism
{
public:
    Endomorphism() = default;

    /// multiplicity[c][b]: how often source block b sits inside target block c.
    /// Unitaries and pads are optional; a missing pad is inferred from the dimension balance.
    Endomorphism(FdAlgebra alg, std::vector<std::vector<int>> multiplicity, std::vector<Matrix> unitaries = {},
                 std::vector<int> pad = {})
        : alg_(std::move(alg)), mult_(std::move(multiplicity)), unitaries_(std::move(unitaries)), pad_(std::move(pad))
    {
        const int B = alg_.num_blocks();
        if (static_cast<int>(mult_.size()) != B)
            throw UsageError("multiplicity matrix must have one row per block");
        for (const auto& row : mult_)
        {
            if (static_cast<int>(row.size()) != B)
                throw UsageError("multiplicity matrix must be square");
            for (int m : row)
                if (m < 0)
                    throw UsageError("multiplicities must be nonnegative");
        }
        if (pad_.empty())
        {
            pad_.resize(B);
            for (int c = 0; c < B; ++c)
                pad_[c] = alg_.block_dim(c) - used(c);
        }
        if (static_cast<int>(pad_.size()) != B)
            throw UsageError("pad must have one entry per block");
        for (int c = 0; c < B; ++c)
        {
            if (pad_[c] < 0 || used(c) + pad_[c] != alg_.block_dim(c))
                throw UsageError("dimension balance violated for target block " + std::to_string(c) + ": " +
                                 std::to_string(used(c)) + " + pad " + std::to_string(pad_[c]) +
                                 " != " + std::to_string(alg_.block_dim(c)));
        }
        if (unitaries_.empty())
        {
            for (int c = 0; c < B; ++c)
                unitaries_.push_back(Matrix::Identity(alg_.block_dim(c), alg_.block_dim(c)));
        }
        if (static_cast<int>(unitaries_.size()) != B)
            throw UsageError("unitaries must have one entry per block");
        trivial_.resize(B);
        for (int c = 0; c < B; ++c)
        {
            const int n = alg_.block_dim(c);
            if (unitaries_[c].rows() != n || unitaries_[c].cols() != n)
                throw UsageError("unitary for block " + std::to_string(c) + " has wrong size");
            if (!is_unitary(unitaries_[c], 1e-9))
                throw UsageError("matrix for block " + std::to_string(c) + " is not unitary");
            trivial_[c] = unitaries_[c].isIdentity(0.0);
        }
    }

    static Endomorphism identity(const FdAlgebra& alg)
    {
        const int B = alg.num_blocks();
        std::vector<std::vector<int>> m(B, std::vector<int>(B, 0));
        for (int b = 0; b < B; ++b)
            m[b][b] = 1;
        return Endomorphism(alg, m);
    }

    /// Admit an arbitrary *-homomorphism given as a function. The homomorphism
    /// identities are verified on the matrix units and the canonical form is
    /// recovered from ranks of the images of minimal projections.
    static Endomorphism from_map(const FdAlgebra& alg, const std::function<AlgElement(const AlgElement&)>& f,
                                 double tol = 1e-10)
    {
        const int B = alg.num_blocks();
        // images[b][i][j] = f(E_ij of block b)
        std::vector<std::vector<std::vector<AlgElement>>> img(B);
        for (int b = 0; b < B; ++b)
        {
            const int n = alg.block_dim(b);
            img[b].assign(n, std::vector<AlgElement>(n));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                {
                    img[b][i][j] = f(AlgElement::matrix_unit(alg, b, i, j));
                    if (!(img[b][i][j].algebra() == alg))
                        throw UsageError("map does not land in the same algebra");
                }
        }
        for (int b = 0; b < B; ++b)
            for (int d = 0; d < B; ++d)
            {
                const int n = alg.block_dim(b), p = alg.block_dim(d);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                    {
                        if (d == b && !img[b][i][j].adjoint().is_approx(img[b][j][i], tol))
                            throw DomainError("map is not *-preserving on matrix units");
                        for (int k = 0; k < p; ++k)
                            for (int l = 0; l < p; ++l)
                            {
                                AlgElement prod = img[b][i][j] * img[d][k][l];
                                AlgElement want =
                                    (d == b && j == k) ? img[b][i][l] : AlgElement::zero(alg);
                                if (!prod.is_approx(want, tol))
                                    throw DomainError("map is not multiplicative on matrix units");
                            }
                    }
            }

        std::vector<std::vector<int>> mult(B, std::vector<int>(B, 0));
        std::vector<Matrix> unit;
        std::vector<int> pad(B, 0);
        for (int c = 0; c < B; ++c)
        {
            const int nc = alg.block_dim(c);
            Matrix v(nc, 0);
            auto append = [&v](const Matrix& cols) {
                Matrix w(v.rows(), v.cols() + cols.cols());
                w << v, cols;
                v = std::move(w);
            };
            Matrix image_of_one = Matrix::Zero(nc, nc);
            for (int b = 0; b < B; ++b)
            {
                const Matrix& p = img[b][0][0].block(c);
                const Matrix r = range_basis(p, 1e-8);
                mult[c][b] = static_cast<int>(r.cols());
                for (Eigen::Index s = 0; s < r.cols(); ++s)
                {
                    Matrix cols(nc, alg.block_dim(b));
                    for (int i = 0; i < alg.block_dim(b); ++i)
                        cols.col(i) = img[b][i][0].block(c) * r.col(s);
                    append(cols);
                }
                for (int i = 0; i < alg.block_dim(b); ++i)
                    image_of_one += img[b][i][i].block(c);
            }
            const Matrix comp = range_basis(Matrix::Identity(nc, nc) - image_of_one, 1e-8);
            pad[c] = static_cast<int>(comp.cols());
            append(comp);
            if (v.cols() != nc)
                throw DomainError("could not recover a canonical form for target block " + std::to_string(c));
            unit.push_back(v);
        }
        Endomorphism e(alg, mult, unit, pad);
        for (int b = 0; b < B; ++b)
            for (int i = 0; i < alg.block_dim(b); ++i)
                for (int j = 0; j < alg.block_dim(b); ++j)
                    if (!e(AlgElement::matrix_unit(alg, b, i, j)).is_approx(img[b][i][j], 1e-8))
                        throw DomainError("recovered canonical form disagrees with the map");
        return e;
    }

    const FdAlgebra& algebra() const
    {
        return alg_;
    }
    int num_blocks() const
    {
        return alg_.num_blocks();
    }
    int multiplicity(int c, int b) const
    {
        return mult_.at(c).at(b);
    }
    const std::vector<std::vector<int>>& multiplicities() const
    {
        return mult_;
    }
    const Matrix& unitary(int c) const
    {
        return unitaries_.at(c);
    }
    const std::vector<Matrix>& unitaries() const
    {
        return unitaries_;
    }
    int pad(int c) const
    {
        return pad_.at(c);
    }
    const std::vector<int>& pads() const
    {
        return pad_;
    }
    bool has_nontrivial_unitaries() const
    {
        for (bool t : trivial_)
            if (!t)
                return true;
        return false;
    }
    bool unital() const
    {
        for (int z : pad_)
            if (z != 0)
                return false;
        return true;
    }

    AlgElement operator()(const AlgElement& a) const
    {
        if (!(a.algebra() == alg_))
            throw UsageError("element does not belong to the endomorphism's algebra");
        const int B = alg_.num_blocks();
        std::vector<Matrix> out;
        out.reserve(B);
        for (int c = 0; c < B; ++c)
        {
            const int nc = alg_.block_dim(c);
            Matrix m = Matrix::Zero(nc, nc);
            int off = 0;
            for (int b = 0; b < B; ++b)
            {
                const int nb = alg_.block_dim(b);
                for (int r = 0; r < mult_[c][b]; ++r)
                {
                    m.block(off, off, nb, nb) = a.block(b);
                    off += nb;
                }
            }
            if (!trivial_[c])
                m = unitaries_[c] * m * unitaries_[c].adjoint();
            out.push_back(std::move(m));
        }
        return AlgElement(alg_, std::move(out));
    }

    /// (*this) o inner.
    Endomorphism compose(const Endomorphism& inner) const
    {
        if (!(inner.alg_ == alg_))
            throw UsageError("cannot compose endomorphisms of different algebras");
        const int B = alg_.num_blocks();
        std::vector<std::vector<int>> mult(B, std::vector<int>(B, 0));
        std::vector<int> pad(B, 0);
        std::vector<Matrix> unit;
        for (int c = 0; c < B; ++c)
        {
            for (int d = 0; d < B; ++d)
                for (int b = 0; b < B; ++b)
                    mult[c][d] += mult_[c][b] * inner.mult_[b][d];
            pad[c] = pad_[c];
            for (int b = 0; b < B; ++b)
                pad[c] += mult_[c][b] * inner.pad_[b];

            const int nc = alg_.block_dim(c);
            // D = V_c (W_b repeated per slot + identity on the outer pad)
            Matrix inner_unitaries = Matrix::Identity(nc, nc);
            // actual layout: slots (pos, d) in the order they appear, then zeros
            struct Slot
            {
                int pos;
                int d;
            };
            std::vector<Slot> slots;
            std::vector<int> zero_pos;
            int off = 0;
            for (int b = 0; b < B; ++b)
            {
                const int nb = alg_.block_dim(b);
                for (int r = 0; r < mult_[c][b]; ++r)
                {
                    inner_unitaries.block(off, off, nb, nb) = inner.unitaries_[b];
                    int in = off;
                    for (int d = 0; d < B; ++d)
                        for (int s = 0; s < inner.mult_[b][d]; ++s)
                        {
                            slots.push_back({in, d});
                            in += alg_.block_dim(d);
                        }
                    for (int z = 0; z < inner.pad_[b]; ++z)
                        zero_pos.push_back(in++);
                    off += nb;
                }
            }
            for (int z = 0; z < pad_[c]; ++z)
                zero_pos.push_back(off++);

            // Q maps canonical positions to actual positions.
            Matrix q = Matrix::Zero(nc, nc);
            int canon = 0;
            for (int d = 0; d < B; ++d)
                for (const Slot& s : slots)
                    if (s.d == d)
                        for (int i = 0; i < alg_.block_dim(d); ++i)
                            q(s.pos + i, canon++) = 1.0;
            for (int p : zero_pos)
                q(p, canon++) = 1.0;
            unit.push_back(unitaries_[c] * inner_unitaries * q);
        }
        return Endomorphism(alg_, mult, unit, pad);
    }

    Endomorphism power(int n) const
    {
        if (n < 0)
            throw DomainError("negative power of an endomorphism");
        Endomorphism r = identity(alg_);
        for (int k = 0; k < n; ++k)
            r = compose(r);
        return r;
    }

    friend bool operator==(const Endomorphism& a, const Endomorphism& b)
    {
        if (!(a.alg_ == b.alg_) || a.mult_ != b.mult_ || a.pad_ != b.pad_)
            return false;
        for (std::size_t c = 0; c < a.unitaries_.size(); ++c)
            if (!a.unitaries_[c].isApprox(b.unitaries_[c], 1e-14) &&
                (a.unitaries_[c] - b.unitaries_[c]).norm() > 1e-14)
                return false;
        return true;
    }

private:
    int used(int c) const
    {
        int s = 0;
        for (int b = 0; b < alg_.num_blocks(); ++b)
            s += mult_[c][b] * alg_.block_dim(b);
        return s;
    }

    FdAlgebra alg_;
    std::vector<std::vector<int>> mult_;
    std::vector<Matrix> unitaries_;
    std::vector<int> pad_;
    std::vector<bool> trivial_;
};

/// alpha^n(1).
inline AlgElement image_unit(const Endomorphism& alpha, int n)
{
    AlgElement x = AlgElement::identity(alpha.algebra());
    for (int k = 0; k < n; ++k)
        x = alpha(x);
    return x;
}

/// ker(alpha): blocks whose multiplicity column vanishes.
inline BlockIdeal kernel_ideal(const Endomorphism& alpha)
{
    const int B = alpha.num_blocks();
    std::vector<int> m;
    for (int b = 0; b < B; ++b)
    {
        bool zero = true;
        for (int c = 0; c < B; ++c)
            if (alpha.multiplicity(c, b) > 0)
                zero = false;
        if (zero)
            m.push_back(b);
    }
    return BlockIdeal(alpha.algebra(), m);
}

/// alpha^{-1}(S): blocks all of whose targets lie in S.
inline BlockIdeal preimage_ideal(const Endomorphism& alpha, const BlockIdeal& s)
{
    s.require_same(alpha.algebra());
    const int B = alpha.num_blocks();
    std::vector<int> m;
    for (int b = 0; b < B; ++b)
    {
        bool inside = true;
        for (int c = 0; c < B; ++c)
            if (alpha.multiplicity(c, b) > 0 && !s.has(c))
                inside = false;
        if (inside)
            m.push_back(b);
    }
    return BlockIdeal(alpha.algebra(), m);
}

/// alpha(S) is contained in S.
inline bool invariant(const Endomorphism& alpha, const BlockIdeal& s)
{
    return s.subset_of(preimage_ideal(alpha, s));
}

/// The endomorphism induced on A/S by an alpha-invariant ideal S.
inline Endomorphism quotient_endomorphism(const Endomorphism& alpha, const BlockIdeal& s)
{
    if (!invariant(alpha, s))
        throw DomainError("ideal is not invariant under the endomorphism");
    Quotient q = quotient(s);
    if (q.degenerate())
        return Endomorphism(FdAlgebra::zero(), {}, {}, {});
    const int K = static_cast<int>(q.kept.size());
    std::vector<std::vector<int>> m(K, std::vector<int>(K, 0));
    std::vector<Matrix> u;
    std::vector<int> pad;
    for (int i = 0; i < K; ++i)
    {
        const int c = q.kept[i];
        for (int j = 0; j < K; ++j)
            m[i][j] = alpha.multiplicity(c, q.kept[j]);
        u.push_back(alpha.unitary(c));
        pad.push_back(alpha.pad(c));
    }
    return Endomorphism(q.algebra, m, u, pad);
}

/// The partial map on the (finite, discrete) spectrum dual to a partially
/// reversible endomorphism. map[c] = b means the irreducible representation of
/// block c composed with alpha is the irreducible representation of block b.
struct DualSystem
{
    std::vector<int> partial_map; // -1 where undefined

    std::vector<int> domain() const
    {
        std::vector<int> r;
        for (int c = 0; c < static_cast<int>(partial_map.size()); ++c)
            if (partial_map[c] >= 0)
                r.push_back(c);
        return r;
    }
    std::vector<int> range() const
    {
        std::vector<int> r;
        for (int v : partial_map)
            if (v >= 0)
                r.push_back(v);
        std::sort(r.begin(), r.end());
        r.erase(std::unique(r.begin(), r.end()), r.end());
        return r;
    }
};

inline DualSystem dual_partial_map(const Endomorphism& alpha)
{
    const int B = alpha.num_blocks();
    DualSystem d;
    d.partial_map.assign(B, -1);
    for (int c = 0; c < B; ++c)
    {
        int nonzero = 0;
        for (int b = 0; b < B; ++b)
        {
            const int m = alpha.multiplicity(c, b);
            if (m == 0)
                continue;
            if (m != 1 || ++nonzero > 1)
                throw DomainError("multiplicity row " + std::to_string(c) +
                                  " is not of partially reversible 0/1 type; use the coefficient-algebra "
                                  "workflow (coefficient_algebra on a representation) instead");
            d.partial_map[c] = b;
        }
    }
    return d;
}

/// Points lying on a cycle of the partial map.
inline std::vector<int> periodic_points(const DualSystem& d)
{
    const int n = static_cast<int>(d.partial_map.size());
    std::vector<int> r;
    for (int start = 0; start < n; ++start)
    {
        int x = start;
        for (int step = 0; step < n; ++step)
        {
            x = d.partial_map[x];
            if (x < 0)
                break;
            if (x == start)
            {
                r.push_back(start);
                break;
            }
        }
    }
    return r;
}

/// On a finite discrete spectrum every set has nonempty interior unless it is
/// empty, so topological freeness means no periodic points at all.
inline bool topologically_free(const DualSystem& d)
{
    return periodic_points(d).empty();
}

} // namespace crossprod
