#include "cli.hpp"

int main(int argc, char** argv) { return spotfit::cli::main(argc, argv); }
