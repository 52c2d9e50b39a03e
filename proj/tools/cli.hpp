#pragma once

#include <iosfwd>
#include <string>

namespace caplab::cli {

/// Exit codes of the command-line driver.
enum ExitCode { kPass = 0, kBandFailure = 1, kUsageError = 2 };

/// Entry point shared by the executable and the tests.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// 1-based line of the first occurrence of "key" in a JSON text, 0 when absent.
int line_of_key(const std::string& text, const std::string& key);

/// 1-based line containing byte offset `pos`.
int line_of_offset(const std::string& text, std::size_t pos);

}  // namespace caplab::cli
