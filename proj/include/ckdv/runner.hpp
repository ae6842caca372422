#pragma once

#include <filesystem>
#include <string>

#include "ckdv/config.hpp"

namespace ckdv {

struct RunOutcome {
    /// 0 on success, 1 when the experiment failed or blew up.
    int exit_code = 0;
    RunStatus status = RunStatus::Completed;
    std::filesystem::path run_dir;
    std::string summary;
};

/// Runs the configured experiment and writes into output_dir/<config hash>/:
/// config.resolved, record.jsonl, one TSV per curve and summary.txt.
/// Artifacts written before a failure are kept; the status line says why.
RunOutcome run(const RunConfig& cfg);

}  // namespace ckdv
