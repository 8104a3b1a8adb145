#pragma once

namespace ywlab {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    exit_pass = 0,
    exit_fail = 1,
    exit_usage = 2,
    exit_inconclusive = 3,
};

/// Entry point of the `ywlab` tool:
///
///   ywlab simulate            [options]
///   ywlab verify prm|integral|spde|skorokhod [options]
///   ywlab yw pathwise|strong|compat|law      [options]
///   ywlab d0 a.csv b.csv
///
/// Options: --config FILE, --preset NAME, --set section.key=value (repeatable),
/// --seed N, --out DIR (default $YWLAB_OUT or ./ywlab_out), --threads N,
/// --variant standard|anticipating|ambient_rng.
int run_cli(int argc, char** argv);

}  // namespace ywlab
