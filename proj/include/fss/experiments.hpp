#pragma once

#include <string>

#include "fss/config.hpp"

namespace fss {

struct RunOutcome {
  int exit_code = 0;        // 0 pass, 1 invariant failure, 2 configuration error
  std::string summary;      // key=value lines, same content as summary.txt
};

// Executes the experiment named in cfg and writes its artifacts (CSV files,
// summary.txt, log.txt, resolved.ini, manifest.txt) into cfg.out_dir.
RunOutcome run_experiment(const RunConfig& cfg);

}  // namespace fss
