// Exit-code contract checks against the installed binary (path in argv[1]):
// 0 = clean run, 1 = error, 2 = replay saw an ALERT.
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

namespace fs = std::filesystem;

namespace {

int failures = 0;

int run(const std::string& command) {
  const int status = std::system(command.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void check_exit(const std::string& command, int expected) {
  const int got = run(command);
  if (got == expected) {
    std::printf("[ ok ] exit %d: %s\n", got, command.c_str());
  } else {
    std::printf("[FAIL] expected exit %d, got %d: %s\n", expected, got, command.c_str());
    ++failures;
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <path-to-vigil-binary>\n", argv[0]);
    return 2;
  }
  const std::string bin = argv[1];
  const fs::path dir = fs::temp_directory_path() / ("vigil_exit_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string quiet = " > /dev/null 2> /dev/null";

  const std::string exp2 = (dir / "exp2.csv").string();
  const std::string exp3 = (dir / "exp3.csv").string();
  check_exit(bin + " simulate --builtin EXP2 --out " + exp2 + quiet, 0);
  check_exit(bin + " simulate --builtin EXP3 --out " + exp3 + quiet, 0);
  check_exit(bin + " simulate --builtin EXP9 --out " + (dir / "x.csv").string() + quiet, 1);
  check_exit(bin + " replay " + exp3 + quiet, 0);
  check_exit(bin + " replay " + exp2 + quiet, 2);  // the alert hook for shell monitors
  check_exit(bin + " replay " + (dir / "missing.csv").string() + quiet, 1);
  check_exit(bin + " decode " + (dir / "missing.bin").string() + " --out " +
                 (dir / "y.csv").string() + quiet,
             1);
  check_exit(bin + " verify --seeds 3" + quiet, 0);
  check_exit(bin + " --version" + quiet, 0);
  check_exit(bin + " bogus-subcommand" + quiet, 1);

  fs::remove_all(dir);
  if (failures > 0) {
    std::printf("%d exit-code check(s) failed\n", failures);
    return 1;
  }
  std::printf("all exit-code checks passed\n");
  return 0;
}
