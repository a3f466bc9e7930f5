#include "supercal/builtins.hpp"
#include "supercal/errors.hpp"
#include "supercal/positivity.hpp"
#include "supercal/scenario.hpp"
#include "supercal/serialize.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>

namespace {

using Json = nlohmann::ordered_json;

struct RunArgs {
    std::string scenario;
    std::string out_dir = "reports";
    std::optional<std::uint64_t> seed_override;
    int jobs = 1;
};

void add_run_options(CLI::App* cmd, RunArgs& args) {
    cmd->add_option("file", args.scenario, "scenario file")->required();
    cmd->add_option("--out", args.out_dir, "output directory for reports");
    cmd->add_option("--seed-override", args.seed_override,
                    "replace every declared seed with this value");
    cmd->add_option("--jobs", args.jobs, "worker count (tasks still run in order)")
        ->envname("SUPERCAL_JOBS");
}

int execute(const RunArgs& args, const std::set<std::string>* allowed_ops,
            const char* family) {
    if (allowed_ops) {
        std::ifstream in(args.scenario);
        if (!in) {
            std::cerr << "cannot read " << args.scenario << "\n";
            return 2;
        }
        Json doc;
        try {
            doc = Json::parse(in);
        } catch (const Json::parse_error& e) {
            std::cerr << "scenario parse error: " << e.what() << "\n";
            return 2;
        }
        if (doc.contains("tasks"))
            for (const auto& task : doc["tasks"]) {
                std::string op = task.value("op", "");
                if (!allowed_ops->count(op)) {
                    std::cerr << "task op '" << op << "' does not belong to the " << family
                              << " family; use the run subcommand\n";
                    return 2;
                }
            }
    }
    supercal::RunOutcome out =
        supercal::run_scenario(args.scenario, args.out_dir, args.seed_override, args.jobs);
    if (!out.message.empty()) std::cerr << out.message << "\n";
    std::cout << out.tasks_run << " task(s), " << out.checks_failed << " with failed checks, "
              << out.report_files.size() << " file(s) in " << args.out_dir << "\n";
    return out.exit_code;
}

int list_builtins() {
    for (const auto& info : supercal::builtin_catalog())
        std::printf("%-28s %-9s %s\n", info.name.c_str(), info.kind.c_str(),
                    info.summary.c_str());
    return 0;
}

// Standalone positivity check: form term lines in, verdict JSON on stdout.
int positivity_verdict(int n, const std::vector<std::string>& terms,
                       const std::string& file, std::optional<int> m,
                       std::int64_t samples, std::uint64_t seed, double tol) {
    std::vector<std::string> lines = terms;
    if (!file.empty()) {
        std::ifstream in(file);
        if (!in) {
            std::cerr << "cannot read " << file << "\n";
            return 2;
        }
        std::string line;
        while (std::getline(in, line)) lines.push_back(line);
    }
    try {
        supercal::NumForm a = supercal::parse_num_form(n, lines);
        supercal::PositivityVerdict v =
            m ? supercal::m_positive(a, *m, tol)
              : supercal::weakly_positive(a, tol, samples, seed);
        Json r;
        r["status"] = v.kind == supercal::VerdictKind::CertifiedTrue    ? "certified_true"
                      : v.kind == supercal::VerdictKind::CertifiedFalse ? "certified_false"
                                                                        : "plausibly_true";
        r["margin"] = v.margin;
        r["samples"] = v.trials;
        if (!v.witness.empty()) r["witness"] = v.witness;
        std::cout << r.dump(2) << "\n";
        return v.kind == supercal::VerdictKind::CertifiedFalse ? 1 : 0;
    } catch (const supercal::InvalidArgument& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"superform calculus driver"};
    app.require_subcommand(1);

    RunArgs run_args;
    add_run_options(app.add_subcommand("run", "run every task in a scenario file"), run_args);

    app.add_subcommand("list-builtins", "print the built-in object catalog");

    // Family subcommands share the run plumbing but reject out-of-family ops,
    // so a report directory produced by `lelong` only ever contains ball-mass
    // style analyses.
    static const std::set<std::string> lelong_ops = {
        "lelong",        "classical_lelong",    "m_lelong",
        "concave_bound", "integrability",       "semicontinuity",
        "boundary_functional"};
    static const std::set<std::string> jensen_ops = {"jensen"};
    static const std::set<std::string> degree_ops = {
        "degree",       "weighted_degree",     "sigma_growth", "comparison_local",
        "comparison_infinity", "growth_link",  "strip",        "degree_semicontinuity"};

    RunArgs lelong_args;
    add_run_options(
        app.add_subcommand("lelong", "run a scenario restricted to ball-mass analyses"),
        lelong_args);
    RunArgs jensen_args;
    add_run_options(
        app.add_subcommand("jensen", "run a scenario restricted to two-radius residuals"),
        jensen_args);
    RunArgs degree_args;
    add_run_options(
        app.add_subcommand("degree", "run a scenario restricted to global degree analyses"),
        degree_args);

    int pos_n = 2;
    std::vector<std::string> pos_terms;
    std::string pos_file;
    std::optional<int> pos_m;
    std::int64_t pos_samples = 2000;
    std::uint64_t pos_seed = 11;
    double pos_tol = 1e-12;
    CLI::App* pos = app.add_subcommand(
        "positivity", "check a constant-coefficient form, verdict JSON on stdout");
    pos->add_option("--n", pos_n, "ambient dimension")->required();
    pos->add_option("--term", pos_terms, "form term like '2.5 * dx[1,2] ^ dxi[1,2]'");
    pos->add_option("--file", pos_file, "file with one form term per line");
    pos->add_option("--m", pos_m, "check m-positivity instead of weak positivity, (1,1) only");
    pos->add_option("--samples", pos_samples, "random simple-form samples");
    pos->add_option("--seed", pos_seed, "sampler seed");
    pos->add_option("--tol", pos_tol, "certification tolerance");

    CLI11_PARSE(app, argc, argv);

    if (app.got_subcommand("run")) return execute(run_args, nullptr, "");
    if (app.got_subcommand("list-builtins")) return list_builtins();
    if (app.got_subcommand("lelong")) return execute(lelong_args, &lelong_ops, "lelong");
    if (app.got_subcommand("jensen")) return execute(jensen_args, &jensen_ops, "jensen");
    if (app.got_subcommand("degree")) return execute(degree_args, &degree_ops, "degree");
    if (app.got_subcommand("positivity")) {
        if (pos_terms.empty() && pos_file.empty()) {
            std::cerr << "positivity needs --term or --file\n";
            return 2;
        }
        return positivity_verdict(pos_n, pos_terms, pos_file, pos_m, pos_samples, pos_seed,
                                  pos_tol);
    }
    return 2;
}
