#include "synworld/commands.hpp"

int main(int argc, char** argv) { return synworld::run_cli(argc, argv); }
