#include "dlcluster/cli.hpp"

int main(int argc, char** argv) { return dlcluster::run_cli(argc, argv); }
