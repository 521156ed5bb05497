#include "ircx/cli.h"

int main(int argc, char** argv) { return ircx::cli_main(argc, argv); }
