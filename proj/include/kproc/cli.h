#ifndef KPROC_CLI_H_
#define KPROC_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace kproc {

// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitParameter = 1;
inline constexpr int kExitBudget = 2;
inline constexpr int kExitIo = 3;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace kproc

#endif  // KPROC_CLI_H_
