#include "itts/cli.hpp"

int main(int argc, char** argv) { return itts::run_cli(argc, argv); }
