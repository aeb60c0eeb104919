#pragma once

#include <string>
#include <vector>

#include "reduction.hpp"

namespace crossprod
{

/// A *-homomorphism between block algebras that sends whole blocks to whole
/// blocks: target block t receives source block source_of[t] (or 0 if -1).
struct BlockMap
{
    FdAlgebra source;
    FdAlgebra target;
    std::vector<int> source_of;

    AlgElement operator()(const AlgElement& a) const
    {
        if (!(a.algebra() == source))
            throw UsageError("element does not belong to the source of the block map");
        AlgElement r = AlgElement::zero(target);
        for (int t = 0; t < target.num_blocks(); ++t)
            if (source_of[t] >= 0)
                r.block(t) = a.block(source_of[t]);
        return r;
    }

    bool injective() const
    {
        std::vector<bool> hit(source.num_blocks(), false);
        for (int s : source_of)
            if (s >= 0)
                hit[s] = true;
        for (bool h : hit)
            if (!h)
                return false;
        return true;
    }
    bool surjective() const
    {
        return std::none_of(source_of.begin(), source_of.end(), [](int s) { return s < 0; });
    }
    bool isomorphism() const
    {
        if (source.num_blocks() != target.num_blocks() || !surjective())
            return false;
        std::vector<bool> hit(source.num_blocks(), false);
        for (int s : source_of)
        {
            if (hit[s])
                return false;
            hit[s] = true;
        }
        return true;
    }

    /// Consistency of block sizes.
    void validate() const
    {
        if (static_cast<int>(source_of.size()) != target.num_blocks())
            throw UsageError("block map needs one source per target block");
        for (int t = 0; t < target.num_blocks(); ++t)
            if (source_of[t] >= 0 && source.block_dim(source_of[t]) != target.block_dim(t))
                throw UsageError("block map joins blocks of different sizes");
    }
};

/// The canonical system (A_J, alpha_J): A_J = A/I + A/J with the A/I blocks first,
/// alpha_J(a + b) = (alpha(a) mod I) + (alpha(a) mod J), computed for the
/// reduced triple.
struct CanonicalSystem
{
    bool degenerate = false;
    ReductionResult reduction;
    System base;       // the (reduced) system the construction starts from
    BlockIdeal base_J; // the (reduced) ideal
    System system;     // (A_J, alpha_J)
    BlockMap embed;    // base algebra -> A_J
    std::vector<int> part1; // base blocks outside ker alpha, in order
    std::vector<int> part2; // base blocks outside J, in order
    BlockIdeal kernel;      // ker alpha_J, the second part
    AlgElement kernel_unit;

    const FdAlgebra& algebra() const
    {
        return system.algebra();
    }
    const Endomorphism& endo() const
    {
        return system.alpha();
    }
};

inline CanonicalSystem build_canonical(const System& sys, const BlockIdeal& J)
{
    CanonicalSystem cs;
    cs.reduction = reduce(sys, J);
    if (cs.reduction.degenerate)
    {
        cs.degenerate = true;
        return cs;
    }
    cs.base = cs.reduction.reduced_system;
    cs.base_J = cs.reduction.reduced_ideal;
    const Endomorphism& al = cs.base.alpha();
    const FdAlgebra& A = cs.base.algebra();
    const BlockIdeal I = kernel_ideal(al);
    for (int b = 0; b < A.num_blocks(); ++b)
    {
        if (!I.has(b))
            cs.part1.push_back(b);
        if (!cs.base_J.has(b))
            cs.part2.push_back(b);
    }
    std::vector<int> rows = cs.part1;
    rows.insert(rows.end(), cs.part2.begin(), cs.part2.end());
    const int P = static_cast<int>(cs.part1.size());
    const int T = static_cast<int>(rows.size());

    std::vector<int> dims;
    for (int b : rows)
        dims.push_back(A.block_dim(b));
    FdAlgebra AJ(dims);
    std::vector<std::vector<int>> m(T, std::vector<int>(T, 0));
    std::vector<Matrix> u;
    std::vector<int> pad;
    for (int t = 0; t < T; ++t)
    {
        for (int s = 0; s < P; ++s)
            m[t][s] = al.multiplicity(rows[t], cs.part1[s]);
        u.push_back(al.unitary(rows[t]));
        pad.push_back(al.pad(rows[t]));
    }
    cs.system = System(Endomorphism(AJ, m, u, pad));
    cs.embed = BlockMap{A, AJ, rows};
    cs.embed.validate();
    std::vector<int> k;
    for (int t = P; t < T; ++t)
        k.push_back(t);
    cs.kernel = BlockIdeal(AJ, k);
    cs.kernel_unit = cs.kernel.unit();
    return cs;
}

/// Residuals and structural facts about a canonical system.
struct CanonicalCheck
{
    bool kernel_is_second_part = false;
    double extension = 0; // alpha_J(embed a) - embed(alpha(a)) on matrix units
    double range = 0;     // alpha_J(A_J) inside embed(A)
    bool embed_injective = false;
};

inline CanonicalCheck check_canonical(const CanonicalSystem& cs)
{
    CanonicalCheck c;
    if (cs.degenerate)
        return c;
    c.kernel_is_second_part = kernel_ideal(cs.endo()) == cs.kernel;
    c.embed_injective = cs.embed.injective();
    const auto units = detail::matrix_units(cs.base.algebra());
    for (const auto& blk : units)
        for (const AlgElement& e : blk)
            c.extension =
                std::max(c.extension, (cs.endo()(cs.embed(e)) - cs.embed(cs.base.alpha()(e))).max_abs());
    // alpha_J(x) = embed(alpha(a)) where a is the A/I part of x
    const auto junits = detail::matrix_units(cs.algebra());
    for (const auto& blk : junits)
        for (const AlgElement& e : blk)
        {
            AlgElement a = AlgElement::zero(cs.base.algebra());
            for (std::size_t s = 0; s < cs.part1.size(); ++s)
                a.block(cs.part1[s]) = e.block(static_cast<int>(s));
            c.range = std::max(c.range, (cs.endo()(e) - cs.embed(cs.base.alpha()(a))).max_abs());
        }
    return c;
}

/// The pullback A_omega of A' and A'/J' over A'/(ker alpha')^perp, realized as
/// all blocks of A' followed by one extra block for every block of
/// (ker alpha')^perp outside J'.
struct KatsuraPullback
{
    bool degenerate = false;
    System base; // (A', alpha'), the reduced system
    BlockIdeal base_J;
    System system; // (A_omega, alpha_omega)
    std::vector<int> extra; // base blocks duplicated at the end
    BlockMap iota1;         // A' -> A_omega
    BlockMap iota2;         // A_omega -> A_J
};

inline KatsuraPullback build_katsura(const CanonicalSystem& cs)
{
    KatsuraPullback k;
    if (cs.degenerate)
    {
        k.degenerate = true;
        return k;
    }
    k.base = cs.base;
    k.base_J = cs.base_J;
    const Endomorphism& al = k.base.alpha();
    const FdAlgebra& A = k.base.algebra();
    const int B = A.num_blocks();
    const BlockIdeal K = annihilator(kernel_ideal(al));
    for (int b = 0; b < B; ++b)
        if (K.has(b) && !k.base_J.has(b))
            k.extra.push_back(b);

    std::vector<int> rows; // base block behind each block of A_omega
    for (int b = 0; b < B; ++b)
        rows.push_back(b);
    rows.insert(rows.end(), k.extra.begin(), k.extra.end());
    const int T = static_cast<int>(rows.size());
    std::vector<int> dims;
    for (int b : rows)
        dims.push_back(A.block_dim(b));
    FdAlgebra AW(dims);
    std::vector<std::vector<int>> m(T, std::vector<int>(T, 0));
    std::vector<Matrix> u;
    std::vector<int> pad;
    for (int t = 0; t < T; ++t)
    {
        for (int s = 0; s < B; ++s)
            m[t][s] = al.multiplicity(rows[t], s);
        u.push_back(al.unitary(rows[t]));
        pad.push_back(al.pad(rows[t]));
    }
    k.system = System(Endomorphism(AW, m, u, pad));
    k.iota1 = BlockMap{A, AW, rows};
    k.iota1.validate();

    // iota2: first part of A_J from the A' blocks, second part from the extra
    // block when there is one, otherwise from the A' block.
    std::vector<int> src;
    for (int b : cs.part1)
        src.push_back(b);
    for (int b : cs.part2)
    {
        auto it = std::find(k.extra.begin(), k.extra.end(), b);
        src.push_back(it == k.extra.end() ? b : B + static_cast<int>(it - k.extra.begin()));
    }
    k.iota2 = BlockMap{AW, cs.algebra(), src};
    k.iota2.validate();
    return k;
}

inline KatsuraPullback build_katsura(const System& sys, const BlockIdeal& J)
{
    return build_katsura(build_canonical(sys, J));
}

struct KatsuraComparison
{
    bool iota1_injective = false;
    bool iota2_injective = false;
    bool iota1_isomorphism = false;
    bool iota2_isomorphism = false;
    bool j_is_annihilator = false; // J' = (ker alpha')^perp
    bool criterion_holds = false;  // iota1 iso iff J' = (ker alpha')^perp
    double diagram = 0;            // largest residual of the commuting squares
    double composite = 0;          // iota2 o iota1 - embed
};

inline KatsuraComparison compare(const KatsuraPullback& k, const CanonicalSystem& cs)
{
    KatsuraComparison c;
    if (k.degenerate || cs.degenerate)
        return c;
    c.iota1_injective = k.iota1.injective();
    c.iota2_injective = k.iota2.injective();
    c.iota1_isomorphism = k.iota1.isomorphism();
    c.iota2_isomorphism = k.iota2.isomorphism();
    c.j_is_annihilator = k.base_J == annihilator(kernel_ideal(k.base.alpha()));
    c.criterion_holds = c.iota1_isomorphism == c.j_is_annihilator;
    for (const auto& blk : detail::matrix_units(k.base.algebra()))
        for (const AlgElement& e : blk)
        {
            c.diagram = std::max(c.diagram, (k.system.alpha()(k.iota1(e)) - k.iota1(k.base.alpha()(e))).max_abs());
            c.composite = std::max(c.composite, (k.iota2(k.iota1(e)) - cs.embed(e)).max_abs());
        }
    for (const auto& blk : detail::matrix_units(k.system.algebra()))
        for (const AlgElement& e : blk)
            c.diagram = std::max(c.diagram, (cs.endo()(k.iota2(e)) - k.iota2(k.system.alpha()(e))).max_abs());
    return c;
}

/// Extend a representation (pi, U) of the base system to A_J by
/// a + b -> U*U pi(a) + (1 - U*U) pi(b). Returns images of the matrix units of A_J.
inline std::vector<std::vector<Matrix>> extend_to_canonical(const CanonicalSystem& cs, const Representation& rep)
{
    const Matrix uu = rep.U.adjoint() * rep.U;
    const Matrix co = Matrix::Identity(rep.dim, rep.dim) - uu;
    const FdAlgebra& A = cs.base.algebra();
    std::vector<std::vector<Matrix>> r;
    const int P = static_cast<int>(cs.part1.size());
    for (int t = 0; t < cs.algebra().num_blocks(); ++t)
    {
        const int b = cs.embed.source_of[t];
        const int n = A.block_dim(b);
        std::vector<Matrix> imgs;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                imgs.push_back((t < P ? uu : co) * rep.units[b][i * n + j]);
        r.push_back(std::move(imgs));
    }
    return r;
}

/// The four conditions of the covariance characterization for a representation
/// of a canonical system: covariance for (ker alpha_J)^perp, U*U in pi(A_J),
/// U*U in pi(Z(A_J)), U*U the unit of pi((ker alpha_J)^perp).
struct CovarianceEquivalence
{
    bool covariant = false;
    bool in_algebra = false;
    bool in_center = false;
    bool is_unit = false;
    bool consistent() const
    {
        return covariant == in_algebra && in_algebra == in_center && in_center == is_unit;
    }
};

inline CovarianceEquivalence covariance_equivalence(const CanonicalSystem& cs, const Representation& rep,
                                                    double tol = 1e-9)
{
    CovarianceEquivalence e;
    const BlockIdeal target = annihilator(cs.kernel);
    const KernelReport kr = kernel_report(rep, tol);
    // compare modulo ker pi
    auto strip = [&](const BlockIdeal& s) {
        std::vector<int> m;
        for (int b : s.members())
            if (!kr.ker_pi.has(b))
                m.push_back(b);
        return m;
    };
    e.covariant = strip(kr.J) == strip(target);
    const Matrix uu = rep.compress(rep.U.adjoint() * rep.U);
    detail::MatrixSpan all, center;
    for (int b = 0; b < cs.algebra().num_blocks(); ++b)
    {
        for (const Matrix& m : rep.units[b])
            all.add(rep.compress(m));
        center.add(rep.compress(rep.pi_unit(b)));
    }
    const double scale = std::max(1.0, uu.norm());
    e.in_algebra = all.residual(uu) <= tol * scale;
    e.in_center = center.residual(uu) <= tol * scale;
    e.is_unit = spectral_norm(uu - rep.compress(rep.pi(target.unit()))) <= tol;
    return e;
}

} // namespace crossprod
