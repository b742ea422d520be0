#include "cfaudit/cli.hpp"

int main(int argc, char** argv) { return cfaudit::cli_main(argc, argv); }
