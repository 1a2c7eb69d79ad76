#include "eea/cli.hpp"

int main(int argc, char** argv) { return eea::cli_main(argc, argv); }
