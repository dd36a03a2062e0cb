// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "curlrec/estimator.hpp"
#include "curlrec/manufactured.hpp"
#include "curlrec/reconstruct.hpp"

namespace curlrec {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Fully resolved run configuration. CLI flags override config-file values.
struct RunConfig {
  std::string command = "verify";
  std::string mesh_file;  // wins over square/lshape when set
  int square = -1;        // structured unit-square mesh parameter
  int lshape = -1;        // structured L-shape mesh parameter
  int p = 1;
  int q = -1;  // reconstruction degree; < 0 means p + 2
  double omega = 1.0;
  double eps = 1.0;
  double nu = 1.0;
  double eta_star = -1.0;  // < 0: automatic
  int levels = 3;
  double theta = 0.5;  // marking fraction
  unsigned long seed = 1;
  std::string out_dir = ".";
  std::string solution = "trig";  // manufactured case name

  int resolved_q() const { return q >= 0 ? q : p + 2; }
  void validate() const;  // throws ConfigError
};

/// Apply one `key = value` setting; unknown keys are rejected.
void apply_config_entry(RunConfig& cfg, const std::string& key,
                        const std::string& value);

/// Parse a line-oriented `key = value` config file on top of `base`.
RunConfig load_config_file(const std::string& path, RunConfig base = {});

/// Run one command; writes outputs under cfg.out_dir. Returns the process
/// exit code (nonzero when a verification oracle fails).
int cli_run(const RunConfig& cfg);

}  // namespace curlrec
