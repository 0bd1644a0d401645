#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"
#include "corrdyn/correspondence.hpp"
#include "corrdyn/error.hpp"
#include "corrdyn/measures.hpp"

namespace corrdyn::cli {

/// Process exit status for a library error: 10 + the enumerator's position.
int exit_code(Errc code) noexcept;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitUnexpected = 1;

/// Builds the candidate path measure of a variational case; nu is its push-forward at coordinate 0.
VariationalCase build_case(const Correspondence& corr, const SphereGrid& grid, const CaseConfig& c, int length);

/// Entry point shared by the executable and the tests.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace corrdyn::cli
