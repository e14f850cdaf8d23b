#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <string>

#include "toposq/io.hpp"
#include "toposq/toposq.hpp"

using namespace toposq;
using io::json;

namespace {

struct Run {
    int status = -1;
    std::string out;
};

// Runs the CLI with stderr folded into the captured output.
Run cli(const std::string& args) {
    const std::string cmd = std::string(TOPOSQ_CLI) + " " + args + " 2>&1";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::string sample(const std::string& name) { return std::string(TOPOSQ_SAMPLES) + "/" + name; }

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST(CliContexts, Examples) {
    const auto p2 = cli("contexts " + sample("p2.json"));
    EXPECT_EQ(p2.status, 0);
    EXPECT_TRUE(contains(p2.out, "2 contexts, 1 edge\n"));
    const auto trivial = cli("contexts " + sample("trivial2.json"));
    EXPECT_EQ(trivial.status, 0);
    EXPECT_TRUE(contains(trivial.out, "1 context,"));
    const auto clash = cli("contexts " + sample("clash.json"));
    EXPECT_EQ(clash.status, 3);
    EXPECT_TRUE(contains(clash.out, "commutator norm"));
    EXPECT_EQ(cli("contexts /nonexistent.json").status, 2);
}

TEST(CliContexts, IncludeTrivialFlagIsTheDefaultForFilesThatDoNotSay) {
    // Poset files without include_trivial follow the flag.
    const std::string path = ::testing::TempDir() + "cz_only.json";
    {
        std::FILE* f = std::fopen(path.c_str(), "w");
        ASSERT_NE(f, nullptr);
        std::fputs(R"({"seeds": [{"name": "Cz", "generators": [{"dim": 2, "rows": [[1, 0], [0, -1]]}]}]})", f);
        std::fclose(f);
    }
    EXPECT_TRUE(contains(cli("contexts " + path).out, "2 contexts"));
    EXPECT_TRUE(contains(cli("--no-include-trivial contexts " + path).out, "1 context,"));
}

TEST(CliDas, GoldenOperator) {
    const auto r = cli("das " + sample("golden.json") + " " + sample("p2.json") + " --context Cz --json");
    ASSERT_EQ(r.status, 0) << r.out;
    const auto j = json::parse(r.out);
    const Matrix outer = io::parse_matrix(j.at("outer"));
    const Matrix inner = io::parse_matrix(j.at("inner"));
    const double phi = (1 + std::sqrt(5.0)) / 2;
    EXPECT_LE(max_norm(outer - phi * Matrix::Identity(2, 2)), 1e-6);
    EXPECT_LE(max_norm(inner - (1 - phi) * Matrix::Identity(2, 2)), 1e-6);
    EXPECT_EQ(j.at("characters").size(), 2u);
}

TEST(CliDas, MemberOperatorIsFixed) {
    const auto r = cli("das " + sample("sigma_z.json") + " " + sample("p2.json") + " --context Cz --json");
    ASSERT_EQ(r.status, 0) << r.out;
    const auto j = json::parse(r.out);
    const Matrix a = HermitianOperator::diagonal({1, -1}).matrix();
    EXPECT_LE(max_norm(io::parse_matrix(j.at("outer")) - a), 1e-12);
    EXPECT_LE(max_norm(io::parse_matrix(j.at("inner")) - a), 1e-12);
    const auto only_outer = json::parse(cli("das " + sample("sigma_z.json") + " " + sample("p2.json") +
                                            " --context Cz --mode outer --json").out);
    EXPECT_FALSE(only_outer.contains("inner"));
}

TEST(CliDas, UnknownContext) {
    const auto r = cli("das " + sample("golden.json") + " " + sample("p2.json") + " --context Cx");
    EXPECT_EQ(r.status, 4);
    EXPECT_TRUE(contains(r.out, "Cx"));
}

TEST(CliTruth, CovariantExample) {
    const auto r = cli("truth " + sample("e1.json") + " " + sample("sz_cov2.json") + " " + sample("p2.json") +
                       " --approach cov --base trivial --json");
    ASSERT_EQ(r.status, 0) << r.out;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j.at("kind"), "cosieve");
    EXPECT_EQ(j.at("members"), json({"Cz"}));
    const auto p2 = io::parse_poset(io::parse_json_text(
                                        R"({"seeds": [{"name": "Cz", "generators": [{"dim": 2, "rows": [[1, 0], [0, -1]]}]}]})"),
                                    true, Tolerance());
    EXPECT_EQ(io::parse_sieve(j, p2).members, (std::vector<std::size_t>{1}));
}

TEST(CliTruth, TopPropositionGivesFullSieves) {
    const auto cov = json::parse(cli("truth " + sample("e1.json") + " " + sample("sz_top_cov2.json") + " " +
                                     sample("p2.json") + " --approach cov --base trivial --json")
                                     .out);
    EXPECT_EQ(cov.at("members"), json({"trivial", "Cz"}));
    const auto contra = json::parse(cli("truth " + sample("mixed.json") + " " + sample("sz_contra.json") + " " +
                                        sample("p2.json") + " --approach contra --base Cz --json")
                                        .out);
    // δ^o of the window projection is 1 only at C·1, so the mixed state makes it true there alone.
    EXPECT_EQ(contra.at("kind"), "sieve");
    EXPECT_EQ(contra.at("members"), json({"trivial"}));
    const auto vector = json::parse(cli("truth " + sample("e1.json") + " " + sample("sz_contra.json") + " " +
                                        sample("p2.json") + " --approach contra --base Cz --json")
                                        .out);
    EXPECT_EQ(vector.at("members"), json({"trivial", "Cz"}));
}

TEST(CliTruth, ApproachMismatch) {
    const auto r = cli("truth " + sample("e1.json") + " " + sample("sz_cov2.json") + " " + sample("p2.json") +
                       " --approach contra --base Cz");
    EXPECT_EQ(r.status, 5);
    EXPECT_EQ(cli("truth " + sample("e1.json") + " " + sample("sz_contra.json") + " " + sample("p2.json") +
                  " --approach cov --base Cz")
                  .status,
              5);
}

TEST(CliProp, OutputParsesBack) {
    const auto r = cli("prop " + sample("sz_cov2.json") + " " + sample("p2.json") + " --json");
    ASSERT_EQ(r.status, 0) << r.out;
    const SpectralBundle b(io::parse_poset(io::parse_json_text(
                                               R"({"seeds": [{"name": "Cz", "generators": [{"dim": 2, "rows": [[1, 0], [0, -1]]}]}]})"),
                                           true, Tolerance()));
    const auto u = io::parse_bundle_open(json::parse(r.out), b);
    EXPECT_EQ(u, elementary_prop_cov2(HermitianOperator::diagonal({1, -1}), {0, 2}, b));
}

TEST(CliFrame, RegularityAndNegation) {
    const auto with = cli("frame " + sample("p2.json") + " --json");
    ASSERT_EQ(with.status, 0) << with.out;
    const auto j = json::parse(with.out);
    EXPECT_EQ(j.at("opens"), 5);
    EXPECT_EQ(j.at("regular"), false);
    EXPECT_TRUE(j.contains("witness"));
    const auto without = json::parse(cli("frame " + sample("m2_two.json") + " --json").out);
    EXPECT_EQ(without.at("regular"), true);
    EXPECT_EQ(without.at("opens"), 16);
    const auto neg = json::parse(cli("frame " + sample("p2.json") + " --open " + sample("p2_open.json") + " --json").out);
    EXPECT_EQ(neg.at("negation").at("fibers"), json({{"trivial", json::array()}, {"Cz", json::array()}}));
    EXPECT_EQ(cli("frame " + sample("p2.json") + " --variant costar --open " + sample("p2_open.json")).status, 5);
}

TEST(CliCheck, SuitesAndUsage) {
    const auto ks = cli("check ks");
    EXPECT_EQ(ks.status, 0);
    EXPECT_TRUE(contains(ks.out, "0 global sections"));
    const auto pairing = cli("check pairing");
    EXPECT_EQ(pairing.status, 0) << pairing.out;
    EXPECT_FALSE(contains(pairing.out, "[FAIL]"));
    EXPECT_EQ(cli("check bogus").status, 2);
    EXPECT_EQ(cli("").status, 2);
    EXPECT_EQ(cli("contexts").status, 2);
    EXPECT_EQ(cli("--tol 1 contexts " + sample("p2.json")).status, 2);
    EXPECT_EQ(cli("--help").status, 0);
}

TEST(CliDeterminism, SameSeedSameBytes) {
    const auto a = cli("--seed 7 check pairing --json");
    const auto b = cli("--seed 7 check pairing --json");
    EXPECT_EQ(a.out, b.out);
    const auto c = cli("contexts " + sample("m3_four.json") + " --json");
    EXPECT_EQ(c.out, cli("contexts " + sample("m3_four.json") + " --json").out);
}

TEST(CliRoundTrip, EmittedPosetParsesBack) {
    const auto r = cli("contexts " + sample("m3_four.json") + " --json");
    ASSERT_EQ(r.status, 0);
    const auto p = io::parse_poset(json::parse(r.out), false, Tolerance());
    EXPECT_EQ(p.size(), 4u);
    EXPECT_TRUE(p.include_trivial());
    EXPECT_TRUE(p.find_name("rot23").has_value());
}
