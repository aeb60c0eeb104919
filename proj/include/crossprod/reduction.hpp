#pragma once

#include <string>
#include <vector>

#include "norms.hpp"

namespace crossprod
{

struct ReductionResult
{
    /// J_0 = 0, J_1, ... up to the first term that repeats
    std::vector<BlockIdeal> chain;
    BlockIdeal j_infinity;
    BlockIdeal i_infinity;
    System reduced_system; // (A/J_inf, alpha_inf); invalid when degenerate
    BlockIdeal reduced_ideal; // q(J)
    Quotient q;
    bool degenerate = false;

    /// member sets of the chain
    std::vector<std::vector<int>> chain_members() const
    {
        std::vector<std::vector<int>> r;
        for (const auto& s : chain)
            r.push_back(s.members());
        return r;
    }
};

/// ker alpha^n for n = 0, 1, ... until it stops growing (at most B+1 terms).
inline std::vector<BlockIdeal> kernel_chain(const Endomorphism& al)
{
    const FdAlgebra& A = al.algebra();
    std::vector<BlockIdeal> r{BlockIdeal::empty(A)};
    // ker alpha^{n+1} = alpha^{-1}(ker alpha^n)
    for (;;)
    {
        BlockIdeal next = preimage_ideal(al, r.back());
        if (next == r.back())
            break;
        r.push_back(next);
    }
    return r;
}

/// I_inf as the union of ker alpha^n.
inline BlockIdeal i_infinity(const Endomorphism& al)
{
    return kernel_chain(al).back();
}

/// I_inf as {b : alpha^n(e_b) -> 0}, evaluated numerically. Each alpha^n(e_b) is a
/// projection, so the limit is decided once n reaches the number of blocks.
inline BlockIdeal i_infinity_numeric(const Endomorphism& al, double tol = 1e-9)
{
    const FdAlgebra& A = al.algebra();
    std::vector<int> m;
    for (int b = 0; b < A.num_blocks(); ++b)
    {
        AlgElement x = AlgElement::block_unit(A, b);
        for (int n = 0; n < A.num_blocks(); ++n)
            x = al(x);
        if (x.norm() <= tol)
            m.push_back(b);
    }
    return BlockIdeal(A, m);
}

/// J_n = ker alpha^n intersected with alpha^{-k}(J), k < n.
inline BlockIdeal closed_form_term(const Endomorphism& al, const BlockIdeal& J, int n)
{
    BlockIdeal ker = BlockIdeal::empty(al.algebra());
    BlockIdeal r = BlockIdeal::full(al.algebra());
    BlockIdeal pre = J; // alpha^{-k}(J)
    for (int k = 0; k < n; ++k)
    {
        ker = preimage_ideal(al, ker);
        r = r.intersect(pre);
        pre = preimage_ideal(al, pre);
    }
    return r.intersect(ker);
}

/// The largest alpha-invariant ideal inside J: the intersection of alpha^{-n}(J).
inline BlockIdeal invariant_core(const Endomorphism& al, const BlockIdeal& J)
{
    BlockIdeal r = J;
    for (;;)
    {
        BlockIdeal next = r.intersect(preimage_ideal(al, r));
        if (next == r)
            return r;
        r = next;
    }
}

/// The reduction of (A, alpha, J) to an orthogonal triple.
///
/// The chain J_{n+1} = J cap alpha^{-1}(J_n) is computed recursively and checked
/// against the closed form at every step.
inline ReductionResult reduce(const System& sys, const BlockIdeal& J)
{
    const Endomorphism& al = sys.alpha();
    const FdAlgebra& A = sys.algebra();
    J.require_same(A);
    ReductionResult r;
    r.chain.push_back(BlockIdeal::empty(A));
    for (int n = 1;; ++n)
    {
        BlockIdeal next = J.intersect(preimage_ideal(al, r.chain.back()));
        if (!(next == closed_form_term(al, J, n)))
            throw std::logic_error("reduction chain disagrees with its closed form at step " + std::to_string(n));
        if (next == r.chain.back())
            break;
        r.chain.push_back(next);
    }
    r.i_infinity = i_infinity(al);
    r.j_infinity = r.i_infinity.intersect(invariant_core(al, J));
    if (!(r.j_infinity == r.chain.back()))
        throw std::logic_error("J_infinity disagrees with the stabilized chain");
    r.q = quotient(r.j_infinity);
    r.degenerate = r.q.degenerate();
    if (!r.degenerate)
    {
        r.reduced_system = quotient_system(sys, r.j_infinity);
        r.reduced_ideal = r.q.image(J);
    }
    return r;
}

/// Both chains, step by step.
struct CorrespondenceCheck
{
    std::vector<BlockIdeal> correspondence_chain;
    std::vector<BlockIdeal> closed_form_chain;
    int steps = 0;
    bool match = false;
    bool within_bound = false; // stabilized within B steps
};

namespace detail
{
inline Vector flatten(const AlgElement& a)
{
    Vector v(a.algebra().linear_dim());
    int o = 0;
    for (const Matrix& m : a.blocks())
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            for (Eigen::Index i = 0; i < m.rows(); ++i)
                v(o++) = m(i, j);
    return v;
}
} // namespace detail

/// Recompute the reduction chain from the system correspondence X = alpha(1)A:
/// J_{n+1} = {a in J : phi(a) X in X J_n} with phi(a)x = alpha(a)x, where XJ_n
/// is the span of the products x i. Membership is decided by least squares.
inline CorrespondenceCheck correspondence_cross_check(const System& sys, const BlockIdeal& J, double tol = 1e-9)
{
    const Endomorphism& al = sys.alpha();
    const FdAlgebra& A = sys.algebra();
    const auto X = correspondence_basis(al);
    const auto units = detail::matrix_units(A);
    CorrespondenceCheck c;
    c.correspondence_chain.push_back(BlockIdeal::empty(A));
    c.closed_form_chain.push_back(BlockIdeal::empty(A));
    c.match = true;
    for (int n = 1; n <= A.num_blocks() + 1; ++n)
    {
        const BlockIdeal& prev = c.correspondence_chain.back();
        detail::MatrixSpan span(1e-10);
        for (const auto& x : X)
            for (int b : prev.members())
                for (const auto& e : units[b])
                {
                    Vector v = detail::flatten(x * e);
                    span.add(Eigen::Map<const Matrix>(v.data(), v.size(), 1));
                }
        std::vector<int> members;
        for (int b : J.members())
        {
            const AlgElement eb = AlgElement::block_unit(A, b);
            const AlgElement phi = al(eb);
            bool inside = true;
            for (const auto& x : X)
            {
                Vector v = detail::flatten(phi * x);
                if (span.residual(Eigen::Map<const Matrix>(v.data(), v.size(), 1)) > tol)
                {
                    inside = false;
                    break;
                }
            }
            if (inside)
                members.push_back(b);
        }
        BlockIdeal next(A, members);
        BlockIdeal closed = closed_form_term(al, J, n);
        if (!(next == closed))
            c.match = false;
        const bool stable = next == prev;
        c.correspondence_chain.push_back(next);
        c.closed_form_chain.push_back(closed);
        if (stable)
        {
            c.steps = n - 1;
            break;
        }
        c.steps = n;
    }
    c.within_bound = c.steps <= A.num_blocks();
    return c;
}

struct StaceyReport
{
    ReductionResult reduction;
    bool kernel_union_matches = false; // J_inf = union of ker alpha^n
    bool degenerate = false;
    bool reduced_injective = false;
};

/// Reduction with J = A, the case of the unital crossed product of Stacey type.
inline StaceyReport stacey_reduce(const System& sys)
{
    StaceyReport s;
    s.reduction = reduce(sys, BlockIdeal::full(sys.algebra()));
    s.kernel_union_matches = s.reduction.j_infinity == i_infinity(sys.alpha());
    s.degenerate = s.reduction.degenerate;
    s.reduced_injective = s.degenerate || kernel_ideal(s.reduction.reduced_system.alpha()).is_empty();
    return s;
}

/// The seminorm for an arbitrary J: pass to the reduced triple.
inline double reduced_seminorm(const System& sys, const BlockIdeal& J, const MatElement& a)
{
    ReductionResult r = reduce(sys, J);
    if (r.degenerate)
        return 0.0;
    NormContext ctx(r.reduced_system, r.reduced_ideal);
    return seminorm(ctx, pushforward(a, r.j_infinity, r.reduced_system));
}

} // namespace crossprod
