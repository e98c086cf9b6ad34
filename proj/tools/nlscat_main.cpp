#include "nlscat/cli.hpp"

int main(int argc, char** argv) { return nlscat::cli::main(argc, argv); }
