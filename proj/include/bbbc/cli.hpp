// cli.hpp - command-line front end
//
// Subcommands: ber, outage, pdf, bench-compare, selftest. Exit codes:
// 0 success, 1 usage error, 2 configuration error, 3 I/O error.

#pragma once

namespace bbbc {

int cli_main(int argc, const char* const* argv);

}  // namespace bbbc
