#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "canonical.hpp"

namespace crossprod::io
{

using json = nlohmann::json;

/// A schema violation, located by a JSON pointer into the offending document.
class SchemaError : public UsageError
{
public:
    SchemaError(const std::string& pointer, const std::string& what)
        : UsageError(what + " at " + (pointer.empty() ? "/" : pointer)), pointer_(pointer.empty() ? "/" : pointer)
    {
    }
    const std::string& pointer() const
    {
        return pointer_;
    }

private:
    std::string pointer_;
};

/// Twelve significant digits.
inline double round12(double x)
{
    if (!std::isfinite(x))
        return x;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    double r = std::strtod(buf, nullptr);
    return r == 0.0 ? 0.0 : r; // no negative zero
}

inline json number(double x)
{
    return round12(x);
}

inline json load_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw UsageError("cannot open " + path);
    try
    {
        return json::parse(in);
    }
    catch (const json::parse_error& e)
    {
        throw SchemaError("", std::string("malformed JSON in ") + path + ": " + e.what());
    }
}

namespace detail
{
inline std::string ptr(const std::string& base, const std::string& key)
{
    return base + "/" + key;
}
inline std::string ptr(const std::string& base, std::size_t i)
{
    return base + "/" + std::to_string(i);
}

inline const json& field(const json& j, const std::string& key, const std::string& at)
{
    if (!j.is_object())
        throw SchemaError(at, "expected an object");
    auto it = j.find(key);
    if (it == j.end())
        throw SchemaError(ptr(at, key), "missing field");
    return *it;
}

inline int integer(const json& j, const std::string& at)
{
    if (!j.is_number_integer())
        throw SchemaError(at, "expected an integer");
    return j.get<int>();
}

inline std::vector<int> int_list(const json& j, const std::string& at)
{
    if (!j.is_array())
        throw SchemaError(at, "expected an array of integers");
    std::vector<int> r;
    for (std::size_t i = 0; i < j.size(); ++i)
        r.push_back(integer(j[i], ptr(at, i)));
    return r;
}
} // namespace detail

/// A complex scalar: a number or a pair [re, im].
inline Complex parse_complex(const json& j, const std::string& at)
{
    if (j.is_number())
        return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw SchemaError(at, "expected a number or a [re, im] pair");
}

/// A row-major matrix: a list of rows. Checks the size when given.
inline Matrix parse_matrix(const json& j, const std::string& at, int rows = -1, int cols = -1)
{
    if (!j.is_array())
        throw SchemaError(at, "expected a matrix (list of rows)");
    const int r = static_cast<int>(j.size());
    if (rows >= 0 && r != rows)
        throw SchemaError(at, "expected " + std::to_string(rows) + " rows, got " + std::to_string(r));
    int c = cols;
    Matrix m;
    for (int i = 0; i < r; ++i)
    {
        const json& row = j[i];
        const std::string rp = detail::ptr(at, i);
        if (!row.is_array())
            throw SchemaError(rp, "expected a row");
        if (c < 0)
            c = static_cast<int>(row.size());
        if (static_cast<int>(row.size()) != c)
            throw SchemaError(rp, "expected " + std::to_string(c) + " entries, got " + std::to_string(row.size()));
        if (i == 0)
            m.resize(r, c);
        for (int k = 0; k < c; ++k)
            m(i, k) = parse_complex(row[k], detail::ptr(rp, k));
    }
    if (r == 0)
        m.resize(0, std::max(c, 0));
    return m;
}

inline json complex_to_json(Complex z)
{
    return json::array({number(z.real()), number(z.imag())});
}

inline json matrix_to_json(const Matrix& m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
    {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k)
            row.push_back(complex_to_json(m(i, k)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json element_blocks_to_json(const AlgElement& a)
{
    json r = json::array();
    for (const Matrix& m : a.blocks())
        r.push_back(matrix_to_json(m));
    return r;
}

inline AlgElement parse_alg_element(const FdAlgebra& A, const json& j, const std::string& at)
{
    if (!j.is_array() || static_cast<int>(j.size()) != A.num_blocks())
        throw SchemaError(at, "expected one matrix per block (" + std::to_string(A.num_blocks()) + ")");
    std::vector<Matrix> bl;
    for (int b = 0; b < A.num_blocks(); ++b)
        bl.push_back(parse_matrix(j[b], detail::ptr(at, b), A.block_dim(b), A.block_dim(b)));
    return AlgElement(A, std::move(bl));
}

inline json ideal_to_json(const BlockIdeal& s)
{
    return s.members();
}

inline BlockIdeal parse_ideal(const FdAlgebra& A, const json& j, const std::string& at)
{
    const auto m = detail::int_list(j, at);
    for (std::size_t i = 0; i < m.size(); ++i)
        if (m[i] < 0 || m[i] >= A.num_blocks())
            throw SchemaError(detail::ptr(at, i), "block index " + std::to_string(m[i]) + " out of range");
    return BlockIdeal(A, m);
}

struct SystemFile
{
    System system;
    BlockIdeal J; // empty ideal when absent
    bool has_J = false;
};

/// {"algebra": {"blocks": [...]}, "endomorphism": {"multiplicity": [[...]],
///  "unitaries": optional, "pad": optional}, "ideal_J": optional}
/// A top-level "blocks" is accepted in place of "algebra".
inline SystemFile parse_system(const json& j)
{
    if (!j.is_object())
        throw SchemaError("", "system file must be an object");
    std::vector<int> dims;
    if (j.contains("algebra"))
        dims = detail::int_list(detail::field(j["algebra"], "blocks", "/algebra"), "/algebra/blocks");
    else if (j.contains("blocks"))
        dims = detail::int_list(j["blocks"], "/blocks");
    else
        throw SchemaError("/algebra", "missing field");
    if (dims.empty())
        throw SchemaError("/algebra/blocks", "at least one block is required");
    for (std::size_t i = 0; i < dims.size(); ++i)
        if (dims[i] < 1)
            throw SchemaError("/algebra/blocks/" + std::to_string(i), "block dimensions must be positive");
    FdAlgebra A(dims);
    const int B = A.num_blocks();

    const json& e = detail::field(j, "endomorphism", "");
    const json& mj = detail::field(e, "multiplicity", "/endomorphism");
    if (!mj.is_array() || static_cast<int>(mj.size()) != B)
        throw SchemaError("/endomorphism/multiplicity", "expected a " + std::to_string(B) + "x" +
                                                            std::to_string(B) + " matrix");
    std::vector<std::vector<int>> m;
    for (int c = 0; c < B; ++c)
    {
        const std::string at = "/endomorphism/multiplicity/" + std::to_string(c);
        auto row = detail::int_list(mj[c], at);
        if (static_cast<int>(row.size()) != B)
            throw SchemaError(at, "expected " + std::to_string(B) + " entries");
        for (std::size_t b = 0; b < row.size(); ++b)
            if (row[b] < 0)
                throw SchemaError(at + "/" + std::to_string(b), "multiplicities must be nonnegative");
        m.push_back(std::move(row));
    }
    std::vector<Matrix> u;
    if (e.contains("unitaries") && !e["unitaries"].is_null())
    {
        const json& uj = e["unitaries"];
        if (!uj.is_array() || static_cast<int>(uj.size()) != B)
            throw SchemaError("/endomorphism/unitaries", "expected one unitary per block");
        for (int c = 0; c < B; ++c)
        {
            const std::string at = "/endomorphism/unitaries/" + std::to_string(c);
            if (uj[c].is_null())
                u.push_back(Matrix::Identity(A.block_dim(c), A.block_dim(c)));
            else
                u.push_back(parse_matrix(uj[c], at, A.block_dim(c), A.block_dim(c)));
            if (!is_unitary(u.back(), 1e-9))
                throw SchemaError(at, "matrix is not unitary");
        }
    }
    std::vector<int> pad;
    if (e.contains("pad") && !e["pad"].is_null())
    {
        pad = detail::int_list(e["pad"], "/endomorphism/pad");
        if (static_cast<int>(pad.size()) != B)
            throw SchemaError("/endomorphism/pad", "expected one entry per block");
    }
    // dimension balance, reported against the offending row
    for (int c = 0; c < B; ++c)
    {
        int used = 0;
        for (int b = 0; b < B; ++b)
            used += m[c][b] * A.block_dim(b);
        const int z = pad.empty() ? A.block_dim(c) - used : pad[c];
        if (z < 0 || used + z != A.block_dim(c))
            throw SchemaError("/endomorphism/multiplicity/" + std::to_string(c),
                              "dimension balance violated: " + std::to_string(used) + " + pad " + std::to_string(z) +
                                  " != " + std::to_string(A.block_dim(c)));
    }
    SystemFile f;
    f.system = System(Endomorphism(A, m, u, pad));
    f.J = BlockIdeal::empty(A);
    if (j.contains("ideal_J") && !j["ideal_J"].is_null())
    {
        f.J = parse_ideal(A, j["ideal_J"], "/ideal_J");
        f.has_J = true;
    }
    return f;
}

inline json system_to_json(const Endomorphism& al, const std::optional<BlockIdeal>& J = std::nullopt)
{
    json j;
    j["algebra"]["blocks"] = al.algebra().block_dims();
    j["endomorphism"]["multiplicity"] = al.multiplicities();
    if (al.has_nontrivial_unitaries())
    {
        json u = json::array();
        for (const Matrix& m : al.unitaries())
            u.push_back(matrix_to_json(m));
        j["endomorphism"]["unitaries"] = std::move(u);
    }
    j["endomorphism"]["pad"] = al.pads();
    if (J)
        j["ideal_J"] = J->members();
    return j;
}

/// {"entries": [{"row": i, "col": j, "blocks": [matrix, ...]}]}
inline MatElement parse_element(const System& sys, const json& j)
{
    const json& ej = detail::field(j, "entries", "");
    if (!ej.is_array())
        throw SchemaError("/entries", "expected an array");
    MatElement a(sys);
    for (std::size_t n = 0; n < ej.size(); ++n)
    {
        const std::string at = "/entries/" + std::to_string(n);
        const int r = detail::integer(detail::field(ej[n], "row", at), at + "/row");
        const int c = detail::integer(detail::field(ej[n], "col", at), at + "/col");
        if (r < 0)
            throw SchemaError(at + "/row", "index must be nonnegative");
        if (c < 0)
            throw SchemaError(at + "/col", "index must be nonnegative");
        AlgElement x = parse_alg_element(sys.algebra(), detail::field(ej[n], "blocks", at), at + "/blocks");
        AlgElement prev = a.at(r, c);
        a.set(r, c, prev + x);
    }
    return a;
}

inline json element_to_json(const MatElement& a)
{
    json entries = json::array();
    for (const auto& [ij, x] : a.entries())
        entries.push_back({{"row", ij.first}, {"col", ij.second}, {"blocks", element_blocks_to_json(x)}});
    return {{"entries", entries}};
}

/// {"pi_blocks": [[matrix per matrix unit, row-major] per block], "U": matrix,
///  "window_levels": optional int, "level_dims": optional list}
///
/// With level_dims the basis is split into consecutive levels and the window is
/// the span of levels 0..window_levels-1. Without them the window is everything.
inline Representation parse_representation(const System& sys, const json& j)
{
    const FdAlgebra& A = sys.algebra();
    const Matrix U = parse_matrix(detail::field(j, "U", ""), "/U");
    const int d = static_cast<int>(U.rows());
    if (U.cols() != d)
        throw SchemaError("/U", "U must be square");
    const json& pj = detail::field(j, "pi_blocks", "");
    if (!pj.is_array() || static_cast<int>(pj.size()) != A.num_blocks())
        throw SchemaError("/pi_blocks", "expected one list of matrix-unit images per block");
    std::vector<std::vector<Matrix>> units;
    for (int b = 0; b < A.num_blocks(); ++b)
    {
        const std::string at = "/pi_blocks/" + std::to_string(b);
        const int n = A.block_dim(b);
        if (!pj[b].is_array() || static_cast<int>(pj[b].size()) != n * n)
            throw SchemaError(at, "expected " + std::to_string(n * n) + " matrix-unit images");
        std::vector<Matrix> imgs;
        for (int k = 0; k < n * n; ++k)
            imgs.push_back(parse_matrix(pj[b][k], at + "/" + std::to_string(k), d, d));
        units.push_back(std::move(imgs));
    }
    std::vector<int> level_of(d, 0);
    int levels = -1;
    std::optional<Matrix> window;
    if (j.contains("level_dims"))
    {
        auto ld = detail::int_list(j["level_dims"], "/level_dims");
        int s = 0;
        for (std::size_t n = 0; n < ld.size(); ++n)
        {
            if (ld[n] < 0)
                throw SchemaError("/level_dims/" + std::to_string(n), "dimensions must be nonnegative");
            for (int i = 0; i < ld[n] && s + i < d; ++i)
                level_of[s + i] = static_cast<int>(n);
            s += ld[n];
        }
        if (s != d)
            throw SchemaError("/level_dims", "level dimensions must add up to " + std::to_string(d));
        levels = static_cast<int>(ld.size()) - 1;
    }
    if (j.contains("window_levels"))
    {
        const int w = detail::integer(j["window_levels"], "/window_levels");
        if (!j.contains("level_dims"))
            throw SchemaError("/window_levels", "window_levels needs level_dims");
        if (w < 0 || w > levels + 1)
            throw SchemaError("/window_levels", "out of range");
        Matrix W = Matrix::Zero(d, d);
        for (int i = 0; i < d; ++i)
            if (level_of[i] < w)
                W(i, i) = 1.0;
        window = W;
        levels = w;
    }
    Representation r;
    try
    {
        r = make_representation(sys, std::move(units), U, window);
    }
    catch (const UsageError& e)
    {
        throw SchemaError("", e.what());
    }
    r.level_of = level_of;
    r.levels = window ? levels : -1;
    return r;
}

inline json representation_to_json(const Representation& rep)
{
    json j;
    json pb = json::array();
    for (const auto& blk : rep.units)
    {
        json imgs = json::array();
        for (const Matrix& m : blk)
            imgs.push_back(matrix_to_json(m));
        pb.push_back(std::move(imgs));
    }
    j["pi_blocks"] = std::move(pb);
    j["U"] = matrix_to_json(rep.U);
    if (!rep.exact())
    {
        std::vector<int> ld;
        for (int l : rep.level_of)
        {
            if (l >= static_cast<int>(ld.size()))
                ld.resize(l + 1, 0);
            ++ld[l];
        }
        j["level_dims"] = ld;
        j["window_levels"] = rep.levels;
    }
    return j;
}

} // namespace crossprod::io
