#include "mems/cli.hpp"

int main(int argc, char** argv) { return mems::cli::main_entry(argc, argv); }
