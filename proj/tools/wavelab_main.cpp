#include "wavelab/cli.hpp"

int main(int argc, char** argv) { return wavelab::run_cli(argc, argv); }
