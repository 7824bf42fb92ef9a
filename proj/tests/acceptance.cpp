#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "queue_poa_verify/criteria.hpp"

int main() {
  using queue_poa::verify::CriterionResult;
  int failures = 0;
  for (int id : queue_poa::verify::criterion_ids()) {
    const CriterionResult r = queue_poa::verify::run_criterion(id);
    if (!r.passed) ++failures;
    std::printf("%s\n", queue_poa::verify::format_line(r).c_str());
    std::fflush(stdout);
  }

  // The CLI must reproduce the same verdict end to end.
  const auto start = std::chrono::steady_clock::now();
  const std::string cmd = std::string("'") + QUEUE_POA_EXE + "' verify > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  const bool cli_ok = status != -1 && WIFEXITED(status) && WEXITSTATUS(status) == 0;
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CriterionResult cli{14, "verify subcommand exits 0", cli_ok,
                      cli_ok ? "exit 0" : "exit status " + std::to_string(status), seconds};
  if (!cli_ok) ++failures;
  std::printf("%s\n", queue_poa::verify::format_line(cli).c_str());

  std::printf("%d of 14 criteria passed\n", 14 - failures);
  return failures == 0 ? 0 : 1;
}
