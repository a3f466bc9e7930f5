#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace supercal {

struct RunOutcome {
    // 0 all asserted checks pass, 1 failed assertions, 2 scenario/parse errors,
    // 3 hypothesis-check failures, 4 numeric non-convergence
    int exit_code = 0;
    int tasks_run = 0;
    int checks_failed = 0;
    std::vector<std::string> report_files;
    std::string message; // diagnostic for nonzero exits
};

// Executes a JSON scenario file: builds the declared objects, runs the task list
// sequentially, and writes one JSON report per task plus CSV side-tables and a
// run summary into out_dir. Reruns with the same seeds are byte-identical except
// for the timestamp header fields. seed_override replaces every declared seed.
RunOutcome run_scenario(const std::string& scenario_path, const std::string& out_dir,
                        std::optional<std::uint64_t> seed_override = std::nullopt,
                        int jobs = 1);

} // namespace supercal
