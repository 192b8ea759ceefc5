#pragma once

namespace nk {

// Exit codes: 0 success, 1 invalid input, 2 solver failure, 3 verify failure.
int run(int argc, char** argv);

}  // namespace nk
