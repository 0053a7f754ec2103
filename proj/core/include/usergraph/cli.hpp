#pragma once

namespace usergraph {

// Subcommand dispatcher behind the `usergraph` binary. Returns the process
// exit code: 0 success, 1 runtime failure, 2 usage error.
int dispatch(int argc, const char* const* argv);

}  // namespace usergraph
