#include "ywlab/cli.hpp"

int main(int argc, char** argv) { return ywlab::run_cli(argc, argv); }
