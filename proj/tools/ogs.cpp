#include "ogs/harness.hpp"

int main(int argc, char** argv) { return ogs::cli_main(argc, argv); }
