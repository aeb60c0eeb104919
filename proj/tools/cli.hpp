#pragma once

#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <crossprod/crossprod.hpp>

namespace crossprod::cli
{

using io::json;
using io::number;

enum ExitCode
{
    ok = 0,
    validation = 2,
    resource = 3,
};

/// A resource error that still carries a partial report.
class PartialResult : public ResourceError
{
public:
    PartialResult(const std::string& what, json partial) : ResourceError(what), partial(std::move(partial)) {}
    json partial;
};

struct Options
{
    std::string command;
    std::string system;
    std::vector<std::string> elements;
    std::string rep;
    int truncation = -1;
    bool json_out = false;
    double tol = -1;
    int k = 0;
    int kmax = 8;
    int nmax = -1;
    std::size_t budget = 20000;
    std::string ideal;
};

namespace detail
{

inline json labels(const FdAlgebra& A)
{
    json r = json::array();
    for (int b = 0; b < A.num_blocks(); ++b)
        r.push_back("b" + std::to_string(b + 1));
    return r;
}

inline io::SystemFile load_system(const Options& o)
{
    if (o.system.empty())
        throw UsageError("--system is required for this command");
    io::SystemFile f = io::parse_system(io::load_file(o.system));
    if (!o.ideal.empty())
    {
        const FdAlgebra& A = f.system.algebra();
        if (o.ideal == "none")
            f.J = BlockIdeal::empty(A);
        else if (o.ideal == "all")
            f.J = BlockIdeal::full(A);
        else
        {
            std::vector<int> m;
            std::stringstream ss(o.ideal);
            std::string tok;
            while (std::getline(ss, tok, ','))
            {
                int b = 0;
                try
                {
                    b = std::stoi(tok);
                }
                catch (const std::exception&)
                {
                    throw UsageError("--ideal expects comma-separated block indices, 'none' or 'all'");
                }
                if (b < 0 || b >= A.num_blocks())
                    throw UsageError("--ideal: block index " + tok + " out of range");
                m.push_back(b);
            }
            f.J = BlockIdeal(A, m);
        }
        f.has_J = true;
    }
    return f;
}

inline std::vector<MatElement> load_elements(const Options& o, const System& sys, std::size_t at_least)
{
    if (o.elements.size() < at_least)
        throw UsageError("this command needs " + std::to_string(at_least) + " --element file(s)");
    std::vector<MatElement> r;
    for (const auto& path : o.elements)
        r.push_back(io::parse_element(sys, io::load_file(path)));
    return r;
}

inline json reduction_json(const ReductionResult& r, const System& sys, const BlockIdeal& J)
{
    json j;
    j["labels"] = labels(sys.algebra());
    j["ideal_J"] = J.members();
    j["chain"] = r.chain_members();
    j["j_infinity"] = r.j_infinity.members();
    j["i_infinity"] = r.i_infinity.members();
    j["degenerate"] = r.degenerate;
    j["kept_blocks"] = r.q.kept;
    if (r.degenerate)
        j["reduced"] = nullptr;
    else
        j["reduced"] = io::system_to_json(r.reduced_system.alpha(), r.reduced_ideal);
    const CorrespondenceCheck c = correspondence_cross_check(sys, J);
    j["correspondence_check"] = c.match && c.within_bound;
    return j;
}

/// The triple on which norms are evaluated: the given one if J is orthogonal to
/// ker alpha, the reduced one otherwise.
struct NormSetting
{
    std::optional<NormContext> ctx;
    std::optional<BlockIdeal> j_infinity;
    bool reduced = false;
    bool degenerate = false;

    MatElement bring(const MatElement& a) const
    {
        if (!reduced)
            return a;
        return pushforward(a, *j_infinity, ctx->system());
    }
};

inline NormSetting norm_setting(const io::SystemFile& f)
{
    NormSetting s;
    const BlockIdeal I = kernel_ideal(f.system.alpha());
    if (f.J.orthogonal_to(I))
    {
        s.ctx.emplace(f.system, f.J);
        return s;
    }
    ReductionResult r = reduce(f.system, f.J);
    s.reduced = true;
    s.j_infinity = r.j_infinity;
    if (r.degenerate)
    {
        s.degenerate = true;
        return s;
    }
    s.ctx.emplace(r.reduced_system, r.reduced_ideal);
    return s;
}

inline json per_diagonal_json(const std::map<int, double>& per)
{
    json j = json::object();
    for (const auto& [k, v] : per)
        j[std::to_string(k)] = number(v);
    return j;
}

inline json kernel_report_json(const KernelReport& k)
{
    json j;
    j["I"] = k.I.members();
    j["J"] = k.J.members();
    j["ker_pi"] = k.ker_pi.members();
    j["ker_pi_alpha"] = k.ker_pi_alpha.members();
    j["I_equals_ker_pi_alpha"] = k.i_is_ker_pi_alpha;
    j["I_cap_J_equals_ker_pi"] = k.intersection_is_ker_pi;
    j["faithful"] = k.faithful;
    if (!k.warning.empty())
        j["warning"] = k.warning;
    return j;
}

inline json canonical_json(const CanonicalSystem& cs)
{
    json j;
    if (cs.degenerate)
    {
        j["degenerate"] = true;
        return j;
    }
    j = io::system_to_json(cs.endo(), annihilator(cs.kernel));
    json rep;
    rep["degenerate"] = false;
    rep["labels"] = labels(cs.algebra());
    rep["reduced_by"] = cs.reduction.j_infinity.members();
    rep["first_part"] = cs.part1;
    rep["second_part"] = cs.part2;
    rep["embed_source_of"] = cs.embed.source_of;
    rep["kernel"] = cs.kernel.members();
    rep["kernel_unit"] = io::element_blocks_to_json(cs.kernel_unit);
    const CanonicalCheck c = check_canonical(cs);
    rep["checks"] = {{"kernel_is_second_part", c.kernel_is_second_part},
                     {"embed_injective", c.embed_injective},
                     {"extension_residual", number(c.extension)},
                     {"range_residual", number(c.range)}};
    j["report"] = rep;
    return j;
}

// Aligned two-column rendering of a report.
inline void print_table(std::ostream& out, const json& j, const std::string& prefix = "")
{
    std::vector<std::pair<std::string, std::string>> rows;
    std::function<void(const json&, const std::string&)> walk = [&](const json& v, const std::string& key) {
        if (v.is_object() && !v.empty() && v.size() <= 16 && !key.empty() && key.size() < 40)
        {
            for (auto it = v.begin(); it != v.end(); ++it)
                walk(it.value(), key + "." + it.key());
            return;
        }
        std::string s = v.dump();
        if (s.size() > 100)
            s = s.substr(0, 97) + "...";
        rows.emplace_back(key, s);
    };
    for (auto it = j.begin(); it != j.end(); ++it)
        walk(it.value(), prefix + it.key());
    std::size_t w = 0;
    for (const auto& r : rows)
        w = std::max(w, r.first.size());
    for (const auto& [k, v] : rows)
        out << std::left << std::setw(static_cast<int>(w) + 2) << k << v << '\n';
}

} // namespace detail

inline json execute(const Options& o)
{
    using namespace detail;
    const std::string& cmd = o.command;
    json out;

    if (cmd == "info")
    {
        io::SystemFile f = load_system(o);
        const Endomorphism& al = f.system.alpha();
        const BlockIdeal I = kernel_ideal(al);
        out["labels"] = labels(al.algebra());
        out["blocks"] = al.algebra().block_dims();
        out["algebra"] = describe(al.algebra());
        out["multiplicity"] = al.multiplicities();
        out["pad"] = al.pads();
        out["unital"] = al.unital();
        out["kernel"] = I.members();
        out["kernel_annihilator"] = annihilator(I).members();
        out["alpha_one"] = io::element_blocks_to_json(image_unit(al, 1));
        out["i_infinity"] = i_infinity(al).members();
        out["ideal_J"] = f.J.members();
        out["J_orthogonal_to_kernel"] = f.J.orthogonal_to(I);
        out["J_invariant"] = invariant(al, f.J);
        return out;
    }
    if (cmd == "reduce" || cmd == "stacey")
    {
        io::SystemFile f = load_system(o);
        const BlockIdeal J = cmd == "stacey" ? BlockIdeal::full(f.system.algebra()) : f.J;
        out = reduction_json(reduce(f.system, J), f.system, J);
        if (cmd == "stacey")
        {
            StaceyReport s = stacey_reduce(f.system);
            out["kernel_union_matches"] = s.kernel_union_matches;
            out["reduced_injective"] = s.reduced_injective;
        }
        return out;
    }
    if (cmd == "canonical")
    {
        io::SystemFile f = load_system(o);
        return canonical_json(build_canonical(f.system, f.J));
    }
    if (cmd == "katsura")
    {
        io::SystemFile f = load_system(o);
        CanonicalSystem cs = build_canonical(f.system, f.J);
        KatsuraPullback k = build_katsura(cs);
        if (k.degenerate)
            return {{"degenerate", true}};
        out = io::system_to_json(k.system.alpha());
        KatsuraComparison c = compare(k, cs);
        json rep;
        rep["degenerate"] = false;
        rep["labels"] = labels(k.system.algebra());
        rep["extra_blocks"] = k.extra;
        rep["iota1_source_of"] = k.iota1.source_of;
        rep["iota2_source_of"] = k.iota2.source_of;
        rep["canonical"] = canonical_json(cs);
        rep["comparison"] = {{"iota1_injective", c.iota1_injective},
                             {"iota2_injective", c.iota2_injective},
                             {"iota1_isomorphism", c.iota1_isomorphism},
                             {"iota2_isomorphism", c.iota2_isomorphism},
                             {"J_is_kernel_annihilator", c.j_is_annihilator},
                             {"criterion_holds", c.criterion_holds},
                             {"diagram_residual", number(c.diagram)},
                             {"composite_residual", number(c.composite)}};
        out["report"] = rep;
        return out;
    }
    if (cmd == "norm" || cmd == "seminorm" || cmd == "estimate")
    {
        io::SystemFile f = load_system(o);
        auto els = load_elements(o, f.system, 1);
        MatElement a = els.front();
        for (std::size_t i = 1; i < els.size(); ++i)
            a += els[i];
        NormSetting s = norm_setting(f);
        out["reduced"] = s.reduced;
        if (s.degenerate)
        {
            out["value"] = 0.0;
            out["per_diagonal"] = json::object();
            out["bounds"] = {{"lower", 0.0}, {"upper", 0.0}};
            out["degenerate"] = true;
            return out;
        }
        const MatElement x = s.bring(a);
        const auto per = per_diagonal_norms(*s.ctx, x);
        double lower = 0, upper = 0;
        for (const auto& [k, v] : per)
        {
            lower = std::max(lower, v);
            upper += v;
        }
        out["per_diagonal"] = per_diagonal_json(per);
        out["bounds"] = {{"lower", number(lower)}, {"upper", number(upper)}};
        if (cmd == "seminorm")
        {
            out["value"] = number(upper);
            return out;
        }
        if (cmd == "norm" && per.size() <= 1)
        {
            out["value"] = number(lower);
            out["exact"] = true;
            return out;
        }
        NormEstimate partial;
        try
        {
            NormEstimate e = norm_estimate(*s.ctx, x, o.kmax, o.budget, &partial);
            json seq = json::array();
            for (double r : e.sequence)
                seq.push_back(number(r));
            out["sequence"] = seq;
            out["value"] = number(e.sequence.back());
            out["exact"] = false;
            out["complete"] = true;
        }
        catch (const ResourceError& err)
        {
            json seq = json::array();
            for (double r : partial.sequence)
                seq.push_back(number(r));
            out["sequence"] = seq;
            out["complete"] = false;
            out["error"] = err.what();
            throw PartialResult(err.what(), out);
        }
        return out;
    }
    if (cmd == "star")
    {
        io::SystemFile f = load_system(o);
        auto els = load_elements(o, f.system, 2);
        MatElement a = els.front();
        for (std::size_t i = 1; i < els.size(); ++i)
            a = star(a, els[i]);
        return io::element_to_json(a);
    }
    if (cmd == "nk")
    {
        io::SystemFile f = load_system(o);
        auto els = load_elements(o, f.system, 1);
        out = io::element_to_json(n_k_element(els.front(), o.k));
        out["k"] = o.k;
        NormSetting s = norm_setting(f);
        if (!s.degenerate)
            out["diagonal_norm"] = number(diagonal_norm(*s.ctx, diagonal(s.bring(els.front()), o.k)));
        return out;
    }
    if (cmd == "dual")
    {
        io::SystemFile f = load_system(o);
        DualSystem d = dual_partial_map(f.system.alpha());
        json pm = json::array();
        for (int v : d.partial_map)
            pm.push_back(v < 0 ? json(nullptr) : json(v));
        out["labels"] = labels(f.system.algebra());
        out["partial_map"] = pm;
        out["domain"] = d.domain();
        out["range"] = d.range();
        out["periodic_points"] = periodic_points(d);
        out["topologically_free"] = topologically_free(d);
        return out;
    }
    if (cmd == "check-rep")
    {
        io::SystemFile f = load_system(o);
        Representation rep;
        if (!o.rep.empty())
            rep = io::parse_representation(f.system, io::load_file(o.rep));
        else if (o.truncation >= 0)
            rep = toeplitz_truncation(f.system, o.truncation);
        else
            throw UsageError("check-rep needs --rep FILE or --truncation M");
        const double tol = o.tol > 0 ? o.tol : 1e-9;
        RepresentationCheck c = check_representation(rep);
        out["dim"] = rep.dim;
        out["exact"] = rep.exact();
        if (!rep.exact())
            out["window_levels"] = rep.levels;
        out["residuals"] = {{"homomorphism", number(c.homomorphism)},
                            {"covariance", number(c.covariance)},
                            {"partial_isometry", number(c.partial_isometry)}};
        out["valid"] = c.ok(1e-12 + tol * 1e-3, std::max(1e-10, tol * 0.1));
        out["kernel_report"] = kernel_report_json(kernel_report(rep, tol));
        BridgeReport br = correspondence_bridge(rep, tol);
        out["correspondence"] = {{"right_action", number(br.right_action)},
                                 {"inner_product", number(br.inner_product)},
                                 {"left_action", number(br.left_action)},
                                 {"phi_theta", number(br.phi_theta)},
                                 {"reconstruction", number(br.reconstruction)},
                                 {"ideal", br.correspondence_ideal.members()},
                                 {"ideal_matches_covariance", br.correspondence_ideal == br.covariance_ideal},
                                 {"ok", br.ok(tol)}};
        const int nmax = o.nmax >= 0 ? o.nmax : (rep.exact() ? 2 : std::max(0, rep.levels - 1));
        CoefficientReport cr = coefficient_algebra(rep, nmax);
        out["coefficient_algebra"] = {{"n_max", nmax},
                                      {"dim", cr.dim},
                                      {"pi_dim", cr.pi_dim},
                                      {"u_b_ustar", number(cr.u_b_ustar)},
                                      {"ustar_b_u", number(cr.ustar_b_u)},
                                      {"uu_in_b", number(cr.uu_in_b)},
                                      {"uu_central", number(cr.uu_central)},
                                      {"transfer_alpha", number(cr.transfer_alpha)},
                                      {"transfer_module", number(cr.transfer_module)},
                                      {"ok", cr.ok(tol)}};
        return out;
    }
    throw UsageError("unknown command '" + cmd + "'");
}

/// Parse arguments, dispatch, print. Returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Crossed products by endomorphisms of finite-dimensional C*-algebras"};
    Options o;
    app.add_option("command", o.command,
                   "info | reduce | stacey | canonical | katsura | norm | seminorm | star | nk | estimate | "
                   "check-rep | dual")
        ->required();
    app.add_option("--system", o.system, "system file");
    app.add_option("--element", o.elements, "element file (repeatable)");
    app.add_option("--rep", o.rep, "representation file");
    app.add_option("--truncation", o.truncation, "Toeplitz truncation level M");
    app.add_flag("--json", o.json_out, "emit one JSON document");
    app.add_option("--tol", o.tol, "comparison tolerance");
    app.add_option("--ideal", o.ideal, "override J: comma-separated block indices, 'none' or 'all'");
    app.add_option("--k", o.k, "diagonal index for nk");
    app.add_option("--kmax", o.kmax, "estimator length")->check(CLI::PositiveNumber);
    app.add_option("--nmax", o.nmax, "coefficient algebra depth");
    app.add_option("--budget", o.budget, "entry budget of the estimator's star powers")->check(CLI::PositiveNumber);
    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        out << app.help();
        return ExitCode::ok;
    }
    catch (const CLI::ParseError& e)
    {
        err << "error: " << e.what() << '\n';
        return ExitCode::validation;
    }
    if (o.tol > 0)
        global_tolerance().compare = o.tol;

    auto emit = [&](const json& j) {
        if (o.json_out)
            out << j.dump(2) << '\n';
        else
            detail::print_table(out, j);
    };
    try
    {
        emit(execute(o));
        return ExitCode::ok;
    }
    catch (const io::SchemaError& e)
    {
        if (o.json_out)
            out << json{{"error", e.what()}, {"pointer", e.pointer()}}.dump(2) << '\n';
        err << "error: " << e.what() << '\n';
        return ExitCode::validation;
    }
    catch (const PartialResult& e)
    {
        emit(e.partial);
        err << "error: " << e.what() << '\n';
        return ExitCode::resource;
    }
    catch (const ResourceError& e)
    {
        if (o.json_out)
            out << json{{"error", e.what()}}.dump(2) << '\n';
        err << "error: " << e.what() << '\n';
        return ExitCode::resource;
    }
    catch (const std::invalid_argument& e)
    {
        err << "error: " << e.what() << '\n';
        return ExitCode::validation;
    }
    catch (const std::domain_error& e)
    {
        err << "error: " << e.what() << '\n';
        return ExitCode::validation;
    }
}

} // namespace crossprod::cli
