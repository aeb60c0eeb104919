#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include <cli.hpp>

using crossprod::cli::run;
using json = nlohmann::json;

namespace
{

struct Result
{
    int code;
    std::string out;
    std::string err;
    json doc() const
    {
        return json::parse(out);
    }
};

Result cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "crossprod");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string sample(const std::string& name)
{
    return std::string(CROSSPROD_SAMPLES) + "/" + name;
}

std::string temp_file(const std::string& name, const std::string& body)
{
    auto p = std::filesystem::temp_directory_path() / ("crossprod_test_" + name);
    std::ofstream(p) << body;
    return p.string();
}

} // namespace

TEST(Cli, ReduceSys1)
{
    Result r = cli({"reduce", "--system", sample("sys1.json"), "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    json j = r.doc();
    EXPECT_EQ(j["chain"], json::parse("[[],[0],[0,1]]"));
    EXPECT_EQ(j["j_infinity"], json::parse("[0,1]"));
    EXPECT_EQ(j["degenerate"], false);
    EXPECT_EQ(j["correspondence_check"], true);
    EXPECT_EQ(j["labels"], json::parse(R"(["b1","b2","b3"])"));
    EXPECT_EQ(j["reduced"]["algebra"]["blocks"], json::parse("[1]"));
}

TEST(Cli, StaceyPreset)
{
    Result r = cli({"stacey", "--system", sample("sys1.json"), "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.doc()["j_infinity"], json::parse("[0,1]"));
}

TEST(Cli, NormOfRelationKilledElement)
{
    Result with = cli({"norm", "--system", sample("sys2.json"), "--element", sample("sys2_killed.json"), "--json"});
    ASSERT_EQ(with.code, 0) << with.err;
    EXPECT_EQ(with.doc()["value"], 0.0);
    Result without = cli({"norm", "--system", sample("sys2.json"), "--element", sample("sys2_killed.json"),
                          "--ideal", "none", "--json"});
    ASSERT_EQ(without.code, 0) << without.err;
    json j = without.doc();
    EXPECT_EQ(j["value"], 1.0);
    EXPECT_EQ(j["per_diagonal"]["0"], 1.0);
    EXPECT_EQ(j["bounds"]["lower"], 1.0);
    EXPECT_EQ(j["bounds"]["upper"], 1.0);
}

TEST(Cli, SeminormAddsDiagonals)
{
    Result r = cli({"seminorm", "--system", sample("sys2.json"), "--element", sample("sys2_killed.json"),
                    "--element", sample("u.json"), "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    json j = r.doc();
    EXPECT_EQ(j["value"], 1.0);
    EXPECT_EQ(j["per_diagonal"]["0"], 0.0);
    EXPECT_EQ(j["per_diagonal"]["1"], 1.0);
}

TEST(Cli, InfoAndTable)
{
    Result r = cli({"info", "--system", sample("sys1.json"), "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    json j = r.doc();
    EXPECT_EQ(j["blocks"], json::parse("[1,1,1]"));
    EXPECT_EQ(j["kernel"], json::parse("[0]"));
    EXPECT_EQ(j["kernel_annihilator"], json::parse("[1,2]"));
    EXPECT_TRUE(j.contains("alpha_one"));

    Result t = cli({"info", "--system", sample("sys1.json")});
    ASSERT_EQ(t.code, 0);
    EXPECT_TRUE(std::regex_search(t.out, std::regex("\nkernel_annihilator +\\[1,2\\]\n"))) << t.out;
}

TEST(Cli, CanonicalRoundTrip)
{
    Result r = cli({"canonical", "--system", sample("sys1.json"), "--ideal", "1,2", "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    json j = r.doc();
    EXPECT_EQ(j["endomorphism"]["multiplicity"], json::parse("[[0,1,0],[0,1,0],[1,0,0]]"));
    EXPECT_EQ(j["report"]["kernel"], json::parse("[2]"));

    const std::string file = temp_file("canonical.json", r.out);
    Result again = cli({"canonical", "--system", file, "--json"});
    ASSERT_EQ(again.code, 0) << again.err;
    json k = again.doc();
    EXPECT_EQ(k["algebra"], j["algebra"]);
    EXPECT_EQ(k["endomorphism"], j["endomorphism"]);
    EXPECT_EQ(k["ideal_J"], j["ideal_J"]);
    EXPECT_EQ(k["report"]["checks"], j["report"]["checks"]);
    EXPECT_EQ(k["report"]["kernel"], j["report"]["kernel"]);
}

TEST(Cli, KatsuraAndDual)
{
    Result k = cli({"katsura", "--system", sample("sys2.json"), "--ideal", "none", "--json"});
    ASSERT_EQ(k.code, 0) << k.err;
    EXPECT_EQ(k.doc()["algebra"]["blocks"].size(), 3u);

    Result d = cli({"dual", "--system", sample("sys1.json"), "--json"});
    ASSERT_EQ(d.code, 0) << d.err;
    EXPECT_EQ(d.doc()["partial_map"], json::parse("[1,2,2]"));
    EXPECT_EQ(d.doc()["topologically_free"], false);

    Result bad = cli({"dual", "--system", sample("m2.json")});
    EXPECT_EQ(bad.code, 2);
    EXPECT_NE(bad.err.find("coefficient"), std::string::npos) << bad.err;
}

TEST(Cli, StarAndNk)
{
    Result s = cli({"star", "--system", sample("sys2.json"), "--element", sample("u.json"), "--element",
                    sample("u.json"), "--json"});
    ASSERT_EQ(s.code, 0) << s.err;
    EXPECT_TRUE(s.doc().contains("entries"));
    Result n = cli({"nk", "--system", sample("sys2.json"), "--element", sample("u.json"), "--k", "1", "--json"});
    ASSERT_EQ(n.code, 0) << n.err;
}

TEST(Cli, CheckRep)
{
    Result r = cli({"check-rep", "--system", sample("swap.json"), "--rep", sample("swap_rep.json"), "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    json j = r.doc();
    EXPECT_EQ(j["valid"], true);
    EXPECT_EQ(j["kernel_report"]["J"], json::parse("[0,1]"));
    EXPECT_EQ(j["kernel_report"]["I"], json::parse("[]"));

    Result t = cli({"check-rep", "--system", sample("sys2.json"), "--truncation", "3", "--json"});
    ASSERT_EQ(t.code, 0) << t.err;
    EXPECT_EQ(t.doc()["kernel_report"]["J"], json::parse("[]"));
}

TEST(Cli, OutputIsByteStable)
{
    for (const char* cmd : {"reduce", "canonical", "katsura", "info"})
    {
        Result a = cli({cmd, "--system", sample("m2.json"), "--json"});
        Result b = cli({cmd, "--system", sample("m2.json"), "--json"});
        EXPECT_EQ(a.code, 0) << a.err;
        EXPECT_EQ(a.out, b.out);
    }
}

TEST(Cli, ValidationErrors)
{
    EXPECT_EQ(cli({"info", "--system", sample("missing.json")}).code, 2);
    EXPECT_EQ(cli({"frobnicate", "--system", sample("sys1.json")}).code, 2);
    EXPECT_EQ(cli({"info"}).code, 2);

    const std::string unbalanced =
        temp_file("unbalanced.json", R"({"algebra": {"blocks": [1, 1]}, "endomorphism": {"multiplicity": [[1, 1], [0, 0]]}})");
    Result r = cli({"info", "--system", unbalanced, "--json"});
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(r.doc()["pointer"], "/endomorphism/multiplicity/0");

    const std::string bad_ideal =
        temp_file("bad_ideal.json", R"({"algebra": {"blocks": [1]}, "endomorphism": {"multiplicity": [[1]]}, "ideal_J": [3]})");
    Result i = cli({"info", "--system", bad_ideal, "--json"});
    EXPECT_EQ(i.code, 2);
    EXPECT_EQ(i.doc()["pointer"], "/ideal_J/0");

    const std::string junk = temp_file("junk.json", "{not json");
    EXPECT_EQ(cli({"info", "--system", junk}).code, 2);

    // non-orthogonal J is reduced, not rejected
    const std::string u3 = temp_file("u3.json", R"({"entries": [{"row": 0, "col": 1, "blocks": [[[1]], [[1]], [[1]]]}]})");
    Result n = cli({"norm", "--system", sample("sys1.json"), "--element", u3, "--json"});
    EXPECT_EQ(n.code, 0) << n.err;
    EXPECT_EQ(n.doc()["reduced"], true);
}

TEST(Cli, ResourceErrorCarriesPartialResult)
{
    // a dense element; its star powers soon exceed a small budget
    std::string body = R"({"entries": [)";
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            body += (i + j ? "," : "") + std::string(R"({"row": )") + std::to_string(i) + R"(, "col": )" +
                    std::to_string(j) + R"(, "blocks": [[[1]], [[0.5]], [[0.25]]]})";
    body += "]}";
    const std::string file = temp_file("dense.json", body);
    Result r = cli({"estimate", "--system", sample("sys1.json"), "--ideal", "none", "--element", file, "--kmax",
                    "10", "--budget", "100", "--json"});
    EXPECT_EQ(r.code, 3) << r.err;
    json j = r.doc();
    EXPECT_EQ(j["complete"], false);
    EXPECT_FALSE(j["sequence"].empty());
}
