#include "heis/verify.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace heis;
namespace fs = std::filesystem;

namespace {

// Fresh directory under the system temp dir, removed on destruction.
struct TempDir
{
    fs::path path;
    explicit TempDir(const std::string &tag)
    {
        path = fs::temp_directory_path() / ("heis-" + tag + "-" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path &p)
{
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string jsonl(const FourierTable &T)
{
    std::ostringstream os;
    export_jsonl(T, os);
    return os.str();
}

RunConfig small(long long D = 4, long long p = 7)
{
    RunConfig c;
    c.disc = D;
    c.prime = p;
    c.max_diag = 2;
    return c;
}

} // namespace

TEST(Config, ParseWithComments)
{
    std::istringstream in("# scenario\n"
                          "disc = 3\n"
                          "prime=11   # trailing comment\n"
                          "\n"
                          "max_diag = 3\n"
                          "cache_dir = /tmp/x y\n"
                          "format = csv\n");
    const auto c = RunConfig::parse(in, RunConfig{});
    EXPECT_EQ(c.disc, 3);
    EXPECT_EQ(c.prime, 11);
    EXPECT_EQ(c.max_diag, 3);
    EXPECT_EQ(c.degree, 2);
    EXPECT_EQ(c.cache_dir, "/tmp/x y");
    EXPECT_EQ(c.format, "csv");
    EXPECT_NO_THROW(c.validate());
}

TEST(Config, BaseValuesSurviveAndLaterLinesWin)
{
    RunConfig base;
    base.max_h = 50;
    std::istringstream in("prime = 11\nprime = 13\n");
    const auto c = RunConfig::parse(in, base);
    EXPECT_EQ(c.prime, 13);
    EXPECT_EQ(c.max_h, 50);
}

TEST(Config, Rejections)
{
    auto parse = [](const std::string &text) {
        std::istringstream in(text);
        return RunConfig::parse(in, RunConfig{});
    };
    EXPECT_THROW(parse("colour = red\n"), std::invalid_argument);
    EXPECT_THROW(parse("prime = 7x\n"), std::invalid_argument);
    EXPECT_THROW(parse("prime\n"), std::invalid_argument);
    EXPECT_THROW(parse("max_diag = \n"), std::invalid_argument);
    EXPECT_THROW(parse("prime = 9\n").validate(), std::invalid_argument);
    EXPECT_THROW(parse("disc = 12\n").validate(), std::invalid_argument);
    EXPECT_THROW(parse("format = xml\n").validate(), std::invalid_argument);
    EXPECT_THROW(parse("max_level = 0\n").validate(), std::invalid_argument);
    EXPECT_THROW(RunConfig::load("/nonexistent/heis.conf", RunConfig{}), std::invalid_argument);
}

TEST(Config, LoadFromFile)
{
    TempDir dir("config");
    std::ofstream(dir.path / "run.conf") << "disc = 8\nmax_level = 9\ncap_group_size = 4096\n";
    const auto c = RunConfig::load(dir.path / "run.conf", RunConfig{});
    EXPECT_EQ(c.disc, 8);
    EXPECT_EQ(c.limits().max_level, 9);
    EXPECT_EQ(c.limits().cap_group_size, 4096u);
}

TEST(Report, ConsistencyAndExitCodes)
{
    VerificationReport r;
    r.scanned = 3;
    r.congruent = 2;
    r.not_computable = 1;
    r.conclude({});
    EXPECT_EQ(r.verdict, Verdict::verified);
    EXPECT_TRUE(r.consistent());
    EXPECT_EQ(r.exit_code(), 0);

    r.conclude({"kummer"});
    EXPECT_EQ(r.verdict, Verdict::inconclusive);
    EXPECT_EQ(r.reason, "scalar check failed: kummer");
    EXPECT_EQ(r.exit_code(), 3);

    r.congruent = 1;
    r.violations.push_back({"2;1,1;0,0", "1/1"});
    r.conclude({"kummer"});
    EXPECT_EQ(r.verdict, Verdict::falsified);
    EXPECT_TRUE(r.consistent());
    EXPECT_EQ(r.exit_code(), 2);

    r.verdict = Verdict::verified;
    EXPECT_FALSE(r.consistent());
}

TEST(Report, JsonShape)
{
    VerificationReport r;
    r.scenario = "demo";
    r.timings["total_seconds"] = 0.5;
    r.conclude({});
    const auto j = r.to_json();
    EXPECT_EQ(j["verdict"], "verified-within-bound");
    EXPECT_EQ(j["counts"]["scanned"], 0);
    EXPECT_EQ(j["version"], kVersion);
    EXPECT_TRUE(j.contains("timings"));
    EXPECT_FALSE(r.to_json(false).contains("timings"));
    EXPECT_STREQ(to_string(Verdict::falsified), "FALSIFIED");
}

TEST(Cache, TableRoundTripIsByteIdentical)
{
    TempDir dir("table");
    std::ostringstream log;
    const Cache cache(dir.path, &log);

    SiegelSolver first(4);
    const auto miss = obtain_table(first, cache, 8, 2, 2);
    EXPECT_FALSE(miss.cache_hit);
    EXPECT_GT(first.density_runs(), 0u);
    const fs::path file = dir.path / (Cache::table_address(4, 8, 2, 2, DensityLimits{}) + ".cache");
    ASSERT_TRUE(fs::exists(file));
    EXPECT_EQ(slurp(file).rfind("heis-cache format=1 address=table-D4-k8-m2-b2-cap1048576-lv12\n", 0), 0u);

    SiegelSolver second(4);
    const auto hit = obtain_table(second, cache, 8, 2, 2);
    EXPECT_TRUE(hit.cache_hit);
    EXPECT_EQ(second.density_runs(), 0u);
    EXPECT_EQ(jsonl(hit.table), jsonl(miss.table));
    EXPECT_EQ(hit.table.entries, miss.table.entries);
    EXPECT_NE(log.str().find("cache: hit table-D4-k8-m2-b2"), std::string::npos);
}

TEST(Cache, StaleFormatAndCorruptionRecompute)
{
    TempDir dir("stale");
    std::ostringstream log;
    const Cache cache(dir.path, &log);
    SiegelSolver solver(4);
    const auto fresh = obtain_table(solver, cache, 8, 1, 10);
    const fs::path file = dir.path / (Cache::table_address(4, 8, 1, 10, DensityLimits{}) + ".cache");
    const std::string good = slurp(file);

    auto rerun = [&](const std::string &contents) {
        std::ofstream(file, std::ios::trunc) << contents;
        SiegelSolver s(4);
        return obtain_table(s, cache, 8, 1, 10);
    };

    std::string older = good;
    older.replace(older.find("format=1"), 8, "format=0");
    auto r = rerun(older);
    EXPECT_FALSE(r.cache_hit);
    EXPECT_EQ(jsonl(r.table), jsonl(fresh.table));
    EXPECT_NE(log.str().find("stale or foreign header"), std::string::npos);
    EXPECT_EQ(slurp(file), good); // rewritten

    r = rerun(good.substr(0, good.rfind("end count=")));
    EXPECT_FALSE(r.cache_hit);
    EXPECT_NE(log.str().find("truncated or miscounted"), std::string::npos);

    std::string garbled = good;
    garbled.replace(garbled.find("480/1"), 5, "48x/1");
    r = rerun(garbled);
    EXPECT_FALSE(r.cache_hit);
    EXPECT_NE(log.str().find("unreadable record"), std::string::npos);
    EXPECT_EQ(jsonl(r.table), jsonl(fresh.table));

    EXPECT_TRUE(rerun(good).cache_hit);
}

TEST(Cache, BridgesRoundTrip)
{
    TempDir dir("bridge");
    std::ostringstream log;
    const Cache cache(dir.path, &log);
    SiegelSolver solver(4);
    const auto b2 = solver.bridge(2);
    const auto b7 = solver.bridge(7);
    save_bridges(solver, cache);

    SiegelSolver reuse(4);
    preload_bridges(reuse, cache, {2, 3, 7});
    EXPECT_EQ(reuse.bridges().size(), 2u);
    const auto c2 = reuse.bridge(2);
    EXPECT_EQ(reuse.calibrations(), 0u);
    EXPECT_EQ(c2.model, b2.model);
    EXPECT_EQ(c2.twist, b2.twist);
    EXPECT_EQ(c2.evidence, b2.evidence);
    EXPECT_EQ(reuse.bridge(7).name(), b7.name());

    std::ofstream(dir.path / (Cache::bridge_address(4, 7) + ".cache"), std::ios::trunc)
        << "heis-cache format=1 address=bridge-D4-q7\n{\"D\":4,\"q\":7,\"model\":\"cubic\",\"twist\":true,"
           "\"evidence\":[]}\nend count=1\n";
    EXPECT_FALSE(cache.load_bridge(4, 7).has_value());
    EXPECT_FALSE(cache.load_bridge(4, 5).has_value());
}

TEST(Cache, DisabledWithoutDirectory)
{
    const Cache cache("");
    EXPECT_FALSE(cache.enabled());
    SiegelSolver solver(4);
    EXPECT_FALSE(obtain_table(solver, cache, 8, 1, 3).cache_hit);
    EXPECT_FALSE(cache.load_table(4, 8, 1, 3, DensityLimits{}).has_value());
}

TEST(Scenario, VerifyMainGaussian)
{
    std::ostringstream log;
    const auto r = cmd_verify_main(small(), &log);
    EXPECT_EQ(r.verdict, Verdict::verified) << r.reason;
    EXPECT_TRUE(r.consistent());
    EXPECT_GT(r.scanned, 0u);
    EXPECT_EQ(r.not_computable, 0u);
    EXPECT_EQ(r.scalars["C_p"], 0);
    EXPECT_EQ(r.scalars["prefactor_valuation"], 1);
    EXPECT_EQ(r.scalars["fq_property_failures"], 0);
    EXPECT_GT(r.scalars["fq_vanishing_checked"].get<int>(), 0);
    EXPECT_NE(std::find(r.witnesses.begin(), r.witnesses.end(), "2;1,2;2,1"), r.witnesses.end());
    EXPECT_EQ(r.scalars["classification"]["essential"], true);
}

TEST(Scenario, VerifyMainGates)
{
    std::ostringstream log;
    auto r = cmd_verify_main(small(4, 5), &log);
    EXPECT_EQ(r.verdict, Verdict::inconclusive);
    EXPECT_EQ(r.reason, "hypotheses unmet: p > m+3 fails");
    EXPECT_EQ(r.exit_code(), 3);
    EXPECT_EQ(r.scanned, 0u);

    r = cmd_verify_main(small(7, 7), &log);
    EXPECT_EQ(r.reason, "hypotheses unmet: p | D_K");

    auto c = small(4, 11);
    c.degree = 6;
    r = cmd_verify_main(c, &log);
    EXPECT_EQ(r.verdict, Verdict::inconclusive);
    EXPECT_NE(r.reason.find("beyond the enumerator"), std::string::npos);
    EXPECT_TRUE(r.scalars.contains("C_p"));

    c.prime = 9;
    EXPECT_THROW(cmd_verify_main(c, &log), std::invalid_argument);
}

TEST(Scenario, VerifyExample)
{
    std::ostringstream log;
    auto c = small();
    const auto r = cmd_verify_example(c, &log);
    EXPECT_EQ(r.verdict, Verdict::verified) << r.reason;
    EXPECT_TRUE(r.consistent());
    EXPECT_EQ(r.scalars["degree1_triggers"], 51);
    EXPECT_EQ(r.scalars["degree1_converse_holds"], true);

    c.prime = 11;
    c.max_diag = 1;
    const auto r11 = cmd_verify_example(c, &log);
    EXPECT_EQ(r11.verdict, Verdict::verified) << r11.reason;
    EXPECT_EQ(r11.scalars["degree1_triggers"], 9);

    c.prime = 13; // 13 splits in Q(i)
    const auto split = cmd_verify_example(c, &log);
    EXPECT_EQ(split.verdict, Verdict::inconclusive);
    EXPECT_EQ(split.reason, "hypotheses unmet: chi_K(p) = 1, not -1");
    EXPECT_EQ(cmd_verify_example(small(4, 5), &log).reason, "hypotheses unmet: p > 5 fails; chi_K(p) = 1, not -1");
}

TEST(Scenario, Scalars)
{
    ScalarRanges R;
    R.bernoulli_max = 20;
    R.prime_max = 31;
    R.disc_max = 60;
    R.hilbert_t = 10;
    const auto r = cmd_scalars(R);
    EXPECT_EQ(r.verdict, Verdict::verified);
    EXPECT_TRUE(r.consistent());
    EXPECT_TRUE(r.violations.empty());
    for (const char *name : {"bernoulli_recurrence", "von_staudt_clausen", "kummer", "b1chi_class_number",
                             "kummer_twisted", "hilbert_product_formula", "hilbert_symmetry", "hilbert_bilinearity"})
        EXPECT_GT(r.scalars[name]["pass"].get<int>(), 0) << name;
}

TEST(Scenario, Fq)
{
    std::ostringstream log;
    RunConfig c;
    EXPECT_EQ(cmd_fq(c, "2;1,1;0,0", 2, &log), "2; 1,0,-16 (route: functional-equation)");
    EXPECT_EQ(cmd_fq(c, "1;4", 2, &log).rfind("2; 1,2,4 (route: ", 0), 0u);
    EXPECT_EQ(cmd_fq(c, "2;1,2;2,1", 7, &log), "7; 1,-49 (route: functional-equation)");
    EXPECT_THROW(cmd_fq(c, "2;1,1;0,0", 4, &log), std::invalid_argument);
    EXPECT_THROW(cmd_fq(c, "2;1,-1;0,0", 2, &log), std::invalid_argument);
    c.max_level = 1;
    EXPECT_EQ(cmd_fq(c, "1;8", 2, &log).rfind("not-computable: ", 0), 0u);
}
