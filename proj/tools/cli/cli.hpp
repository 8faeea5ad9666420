#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace splinefit::cli {

enum ExitCode : int { kOk = 0, kNumeric = 1, kUsage = 2 };

// argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
// Arguments without the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// One entry per option of every subcommand, read back from the parser itself.
struct OptionInfo {
  std::string subcommand;
  std::string name;  // longest flag form, e.g. "--knots", or the positional name
  std::string description;
  std::string default_value;
  bool flag = false;
  bool positional = false;
};

std::vector<OptionInfo> option_table();
std::vector<std::string> subcommand_names();
std::string help_text(std::string_view subcommand);

// Seed used when --seed is absent: SPLINEFIT_SEED if set, else 42.
unsigned long long default_seed();

}  // namespace splinefit::cli
