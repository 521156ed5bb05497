#pragma once

namespace ircx {

// Full command-line entry point (synth / prepare / train / extract / eval /
// probe / ablate). Returns the process exit code: 0 success, 2 usage,
// 3 config, 4 data, 5 runtime failure.
int cli_main(int argc, const char* const* argv);

}  // namespace ircx
