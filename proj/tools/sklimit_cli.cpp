#include "sklimit/harness/cli.hpp"

int main(int argc, char** argv) { return sklimit::harness::run_cli(argc, argv); }
