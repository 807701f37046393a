// heis: command-line front end for coefficient tables and congruence checks.

#include "heis/verify.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace {

struct Overrides
{
    std::string config;
    std::optional<long long> disc, prime, max_diag, max_h;
    std::optional<int> degree, weight, max_level;
    std::optional<std::uint64_t> cap;
    std::optional<std::string> cache_dir, format;

    void attach(CLI::App &app)
    {
        app.add_option("--config", config, "key=value configuration file")->check(CLI::ExistingFile);
        app.add_option("--disc", disc, "field discriminant D_K (positive)");
        app.add_option("--prime", prime, "the prime p");
        app.add_option("--degree", degree, "degree m");
        app.add_option("--weight", weight, "weight k for export-table (default p+1)");
        app.add_option("--max-diag", max_diag, "bound on diagonal entries");
        app.add_option("--max-h", max_h, "degree-1 bound");
        app.add_option("--cap-group-size", cap, "largest residue group for densities");
        app.add_option("--max-level", max_level, "largest modulus exponent for densities");
        app.add_option("--cache-dir", cache_dir, "directory for cached tables and calibrations");
        app.add_option("--format", format, "export format: json or csv");
    }

    heis::RunConfig resolve() const
    {
        heis::RunConfig c;
        if (!config.empty())
            c = heis::RunConfig::load(config, c);
        auto put = [](auto &dst, const auto &src) {
            if (src)
                dst = *src;
        };
        put(c.disc, disc);
        put(c.prime, prime);
        put(c.degree, degree);
        put(c.weight, weight);
        put(c.max_diag, max_diag);
        put(c.max_h, max_h);
        put(c.cap_group_size, cap);
        put(c.max_level, max_level);
        put(c.cache_dir, cache_dir);
        put(c.format, format);
        c.validate();
        return c;
    }
};

int emit(const heis::VerificationReport &rep, bool timings)
{
    std::cout << rep.to_json(timings).dump(2) << '\n';
    return rep.exit_code();
}

int export_table(const heis::RunConfig &cfg, const std::string &output)
{
    const int m = cfg.degree;
    const int k = cfg.weight ? cfg.weight : static_cast<int>(cfg.prime) + 1; // the weight of both scenarios
    const long long bound = m == 1 ? cfg.max_h : cfg.max_diag;
    const heis::Cache cache(cfg.cache_dir);
    heis::SiegelSolver solver(cfg.disc, heis::SolverOptions{cfg.limits(), true});
    heis::preload_bridges(solver, cache, {2, 3, 5, 7});
    const auto run = heis::obtain_table(solver, cache, k, m, bound);

    std::ofstream file;
    if (!output.empty()) {
        file.open(output);
        if (!file)
            throw std::runtime_error("cannot write " + output);
    }
    std::ostream &os = output.empty() ? std::cout : file;
    if (cfg.format == "csv")
        heis::export_csv(run.table, os);
    else
        heis::export_jsonl(run.table, os);
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Hermitian Eisenstein coefficients and mod-p congruence checks"};
    app.set_version_flag("--version", heis::kVersion);
    app.require_subcommand(1);
    Overrides ov;
    bool no_timings = false;
    std::string key, output;
    long long q = 0;

    auto *vm = app.add_subcommand("verify-main", "theta-kernel congruence for the normalized degree-m series");
    auto *ve = app.add_subcommand("verify-example", "the example family: chi_K(p) = -1, h_K prime to p");
    auto *fq = app.add_subcommand("fq", "print the local polynomial F_q(H, X)");
    fq->add_option("key", key, "canonical key, e.g. \"2;1,1;0,0\"")->required();
    fq->add_option("q", q, "prime")->required();
    auto *sc = app.add_subcommand("scalars", "Bernoulli, Kummer, class-number and Hilbert-symbol identities");
    auto *ex = app.add_subcommand("export-table", "coefficient table as JSON lines or CSV");
    ex->add_option("-o,--output", output, "write to a file instead of stdout");
    for (auto *sub : {vm, ve, fq, sc, ex}) {
        ov.attach(*sub);
        sub->add_flag("--no-timings", no_timings, "omit timings from reports");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e);
    }

    try {
        const heis::RunConfig cfg = ov.resolve();
        if (*vm)
            return emit(heis::cmd_verify_main(cfg), !no_timings);
        if (*ve)
            return emit(heis::cmd_verify_example(cfg), !no_timings);
        if (*sc)
            return emit(heis::cmd_scalars(), !no_timings);
        if (*fq) {
            std::cout << heis::cmd_fq(cfg, key, q) << '\n';
            return 0;
        }
        return export_table(cfg, output);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
