#pragma once

#include <algorithm>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"

namespace crossprod
{

/// A finite-dimensional C*-algebra M_{n_1} + ... + M_{n_B}.
///
/// The zero algebra (no blocks) only arises as a quotient by the full ideal
/// and is created through FdAlgebra::zero().
class FdAlgebra
{
public:
    FdAlgebra() = default;

    explicit FdAlgebra(std::vector<int> block_dims) : dims_(std::move(block_dims))
    {
        if (dims_.empty())
            throw UsageError("algebra must have at least one block");
        for (int d : dims_)
            if (d < 1)
                throw UsageError("block dimensions must be positive");
    }

    static FdAlgebra zero()
    {
        return FdAlgebra(Tag{});
    }

    int num_blocks() const
    {
        return static_cast<int>(dims_.size());
    }
    int block_dim(int b) const
    {
        return dims_.at(b);
    }
    const std::vector<int>& block_dims() const
    {
        return dims_;
    }
    bool is_zero() const
    {
        return dims_.empty();
    }

    /// Dimension of the identity block representation.
    int total_dim() const
    {
        int s = 0;
        for (int d : dims_)
            s += d;
        return s;
    }
    /// Linear dimension, sum of n_b^2.
    int linear_dim() const
    {
        int s = 0;
        for (int d : dims_)
            s += d * d;
        return s;
    }

    friend bool operator==(const FdAlgebra&, const FdAlgebra&) = default;

private:
    struct Tag
    {
    };
    explicit FdAlgebra(Tag) {}

    std::vector<int> dims_;
};

inline std::string describe(const FdAlgebra& a)
{
    if (a.is_zero())
        return "0";
    std::ostringstream os;
    for (int b = 0; b < a.num_blocks(); ++b)
    {
        if (b)
            os << " + ";
        if (a.block_dim(b) == 1)
            os << "C";
        else
            os << "M" << a.block_dim(b);
    }
    return os.str();
}

/// An element of an FdAlgebra: one square matrix per block.
class AlgElement
{
public:
    AlgElement() = default;

    AlgElement(FdAlgebra alg, std::vector<Matrix> blocks) : alg_(std::move(alg)), blocks_(std::move(blocks))
    {
        if (static_cast<int>(blocks_.size()) != alg_.num_blocks())
            throw UsageError("element has " + std::to_string(blocks_.size()) + " blocks, algebra has " +
                             std::to_string(alg_.num_blocks()));
        for (int b = 0; b < alg_.num_blocks(); ++b)
        {
            const int n = alg_.block_dim(b);
            if (blocks_[b].rows() != n || blocks_[b].cols() != n)
                throw UsageError("block " + std::to_string(b) + " must be " + std::to_string(n) + "x" +
                                 std::to_string(n));
        }
    }

    static AlgElement zero(const FdAlgebra& alg)
    {
        std::vector<Matrix> bl;
        for (int d : alg.block_dims())
            bl.push_back(Matrix::Zero(d, d));
        return AlgElement(alg, std::move(bl));
    }

    static AlgElement identity(const FdAlgebra& alg)
    {
        std::vector<Matrix> bl;
        for (int d : alg.block_dims())
            bl.push_back(Matrix::Identity(d, d));
        return AlgElement(alg, std::move(bl));
    }

    /// The unit of block b (central projection).
    static AlgElement block_unit(const FdAlgebra& alg, int b)
    {
        AlgElement e = zero(alg);
        e.blocks_.at(b).setIdentity();
        return e;
    }

    /// Matrix unit E_ij of block b.
    static AlgElement matrix_unit(const FdAlgebra& alg, int b, int i, int j)
    {
        AlgElement e = zero(alg);
        e.blocks_.at(b)(i, j) = 1.0;
        return e;
    }

    /// Commuting scalars, one per block (useful for C^n).
    static AlgElement diagonal(const FdAlgebra& alg, const std::vector<Complex>& scalars)
    {
        if (static_cast<int>(scalars.size()) != alg.num_blocks())
            throw UsageError("one scalar per block expected");
        std::vector<Matrix> bl;
        for (int b = 0; b < alg.num_blocks(); ++b)
            bl.push_back(scalars[b] * Matrix::Identity(alg.block_dim(b), alg.block_dim(b)));
        return AlgElement(alg, std::move(bl));
    }

    const FdAlgebra& algebra() const
    {
        return alg_;
    }
    const std::vector<Matrix>& blocks() const
    {
        return blocks_;
    }
    const Matrix& block(int b) const
    {
        return blocks_.at(b);
    }
    Matrix& block(int b)
    {
        return blocks_.at(b);
    }

    /// C*-norm: max over blocks of the spectral norm.
    double norm() const
    {
        double m = 0;
        for (const auto& x : blocks_)
            m = std::max(m, spectral_norm(x));
        return m;
    }

    /// Frobenius-type size, cheap; used for pruning.
    double max_abs() const
    {
        double m = 0;
        for (const auto& x : blocks_)
            if (x.size())
                m = std::max(m, x.cwiseAbs().maxCoeff());
        return m;
    }

    AlgElement adjoint() const
    {
        AlgElement r = *this;
        for (auto& x : r.blocks_)
            x = x.adjoint().eval();
        return r;
    }

    AlgElement& operator+=(const AlgElement& o)
    {
        require_same(o);
        for (std::size_t b = 0; b < blocks_.size(); ++b)
            blocks_[b] += o.blocks_[b];
        return *this;
    }
    AlgElement& operator-=(const AlgElement& o)
    {
        require_same(o);
        for (std::size_t b = 0; b < blocks_.size(); ++b)
            blocks_[b] -= o.blocks_[b];
        return *this;
    }
    AlgElement& operator*=(Complex s)
    {
        for (auto& x : blocks_)
            x *= s;
        return *this;
    }

    friend AlgElement operator+(AlgElement a, const AlgElement& b)
    {
        return a += b;
    }
    friend AlgElement operator-(AlgElement a, const AlgElement& b)
    {
        return a -= b;
    }
    friend AlgElement operator-(AlgElement a)
    {
        return a *= -1.0;
    }
    friend AlgElement operator*(Complex s, AlgElement a)
    {
        return a *= s;
    }
    friend AlgElement operator*(const AlgElement& a, const AlgElement& b)
    {
        a.require_same(b);
        AlgElement r = a;
        for (std::size_t k = 0; k < r.blocks_.size(); ++k)
            r.blocks_[k] = a.blocks_[k] * b.blocks_[k];
        return r;
    }

    /// Block-diagonal matrix of the identity block representation.
    Matrix as_matrix() const
    {
        const int n = alg_.total_dim();
        Matrix m = Matrix::Zero(n, n);
        int off = 0;
        for (const auto& x : blocks_)
        {
            m.block(off, off, x.rows(), x.cols()) = x;
            off += static_cast<int>(x.rows());
        }
        return m;
    }

    bool is_approx(const AlgElement& o, double tol) const
    {
        return alg_ == o.alg_ && (*this - o).norm() <= tol;
    }

    void require_same(const AlgElement& o) const
    {
        if (!(alg_ == o.alg_))
            throw UsageError("elements belong to different algebras");
    }

private:
    FdAlgebra alg_;
    std::vector<Matrix> blocks_;
};

/// A closed two-sided ideal: a set of blocks.
class BlockIdeal
{
public:
    BlockIdeal() = default;

    BlockIdeal(FdAlgebra alg, const std::vector<int>& members) : alg_(std::move(alg)), mask_(alg_.num_blocks(), false)
    {
        for (int b : members)
        {
            if (b < 0 || b >= alg_.num_blocks())
                throw UsageError("ideal member " + std::to_string(b) + " out of range");
            mask_[b] = true;
        }
    }

    static BlockIdeal empty(const FdAlgebra& alg)
    {
        return BlockIdeal(alg, {});
    }
    static BlockIdeal full(const FdAlgebra& alg)
    {
        BlockIdeal s(alg, {});
        s.mask_.assign(alg.num_blocks(), true);
        return s;
    }
    static BlockIdeal from_mask(const FdAlgebra& alg, std::vector<bool> mask)
    {
        if (static_cast<int>(mask.size()) != alg.num_blocks())
            throw UsageError("ideal mask size does not match algebra");
        BlockIdeal s(alg, {});
        s.mask_ = std::move(mask);
        return s;
    }

    const FdAlgebra& algebra() const
    {
        return alg_;
    }
    bool has(int b) const
    {
        return mask_.at(b);
    }
    const std::vector<bool>& mask() const
    {
        return mask_;
    }
    std::vector<int> members() const
    {
        std::vector<int> r;
        for (int b = 0; b < static_cast<int>(mask_.size()); ++b)
            if (mask_[b])
                r.push_back(b);
        return r;
    }
    int size() const
    {
        return static_cast<int>(std::count(mask_.begin(), mask_.end(), true));
    }
    bool is_empty() const
    {
        return size() == 0;
    }
    bool is_full() const
    {
        return size() == alg_.num_blocks();
    }

    /// a lies in the ideal iff it vanishes outside the member blocks.
    bool contains(const AlgElement& a, double tol) const
    {
        require_same(a.algebra());
        for (int b = 0; b < alg_.num_blocks(); ++b)
            if (!mask_[b] && spectral_norm(a.block(b)) > tol)
                return false;
        return true;
    }

    bool subset_of(const BlockIdeal& o) const
    {
        require_same(o.alg_);
        for (std::size_t b = 0; b < mask_.size(); ++b)
            if (mask_[b] && !o.mask_[b])
                return false;
        return true;
    }

    BlockIdeal intersect(const BlockIdeal& o) const
    {
        require_same(o.alg_);
        BlockIdeal r = *this;
        for (std::size_t b = 0; b < mask_.size(); ++b)
            r.mask_[b] = mask_[b] && o.mask_[b];
        return r;
    }

    BlockIdeal join(const BlockIdeal& o) const
    {
        require_same(o.alg_);
        BlockIdeal r = *this;
        for (std::size_t b = 0; b < mask_.size(); ++b)
            r.mask_[b] = mask_[b] || o.mask_[b];
        return r;
    }

    bool orthogonal_to(const BlockIdeal& o) const
    {
        return intersect(o).is_empty();
    }

    /// Central projection onto the member blocks.
    AlgElement unit() const
    {
        AlgElement e = AlgElement::zero(alg_);
        for (int b = 0; b < alg_.num_blocks(); ++b)
            if (mask_[b])
                e.block(b).setIdentity();
        return e;
    }

    friend bool operator==(const BlockIdeal&, const BlockIdeal&) = default;

    void require_same(const FdAlgebra& a) const
    {
        if (!(alg_ == a))
            throw UsageError("ideal and element belong to different algebras");
    }

private:
    FdAlgebra alg_;
    std::vector<bool> mask_;
};

/// d(a, S) = inf over s in S of ||a - s||, which for a block ideal is the
/// largest block norm outside S.
inline double distance_to_ideal(const AlgElement& a, const BlockIdeal& s)
{
    s.require_same(a.algebra());
    double m = 0;
    for (int b = 0; b < a.algebra().num_blocks(); ++b)
        if (!s.has(b))
            m = std::max(m, spectral_norm(a.block(b)));
    return m;
}

/// The largest ideal orthogonal to S.
inline BlockIdeal annihilator(const BlockIdeal& s)
{
    std::vector<bool> m = s.mask();
    m.flip();
    return BlockIdeal::from_mask(s.algebra(), std::move(m));
}

/// The quotient A/S together with the quotient map.
struct Quotient
{
    FdAlgebra algebra;
    /// kept[i] = block of the parent algebra that becomes block i of the quotient.
    std::vector<int> kept;
    FdAlgebra parent;

    bool degenerate() const
    {
        return algebra.is_zero();
    }

    AlgElement operator()(const AlgElement& a) const
    {
        if (!(a.algebra() == parent))
            throw UsageError("element does not belong to the quotiented algebra");
        std::vector<Matrix> bl;
        for (int b : kept)
            bl.push_back(a.block(b));
        return AlgElement(algebra, std::move(bl));
    }

    /// Canonical lift: zero on the ideal's blocks.
    AlgElement lift(const AlgElement& x) const
    {
        AlgElement a = AlgElement::zero(parent);
        for (std::size_t i = 0; i < kept.size(); ++i)
            a.block(kept[i]) = x.block(static_cast<int>(i));
        return a;
    }

    /// Image of an ideal of the parent algebra.
    BlockIdeal image(const BlockIdeal& s) const
    {
        std::vector<int> m;
        for (std::size_t i = 0; i < kept.size(); ++i)
            if (s.has(kept[i]))
                m.push_back(static_cast<int>(i));
        return BlockIdeal(algebra, m);
    }
};

inline Quotient quotient(const BlockIdeal& s)
{
    Quotient q;
    q.parent = s.algebra();
    std::vector<int> dims;
    for (int b = 0; b < s.algebra().num_blocks(); ++b)
        if (!s.has(b))
        {
            q.kept.push_back(b);
            dims.push_back(s.algebra().block_dim(b));
        }
    q.algebra = dims.empty() ? FdAlgebra::zero() : FdAlgebra(dims);
    return q;
}

/// Gaussian random element, mostly for tests and examples.
template <class Rng>
AlgElement random_element(const FdAlgebra& alg, Rng& rng, double scale = 1.0)
{
    std::normal_distribution<double> g(0.0, scale);
    std::vector<Matrix> bl;
    for (int d : alg.block_dims())
    {
        Matrix m(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                m(i, j) = Complex(g(rng), g(rng));
        bl.push_back(std::move(m));
    }
    return AlgElement(alg, std::move(bl));
}

} // namespace crossprod
