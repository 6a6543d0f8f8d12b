#include "sfdel/cli.hpp"

int main(int argc, char** argv) { return sfdel::cli_main(argc, argv); }
