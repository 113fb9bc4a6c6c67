#include "commands.hpp"

int main(int argc, char** argv) { return slowmf::cli::run_cli(argc, argv); }
