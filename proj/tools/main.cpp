#include "wrv/cli.hpp"

int main(int argc, char** argv) { return wrv::cli::run_main(argc, argv); }
