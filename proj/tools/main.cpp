#include "ipc/cli/commands.hpp"

int main(int argc, char** argv) { return ipc::cli::run(argc, argv); }
