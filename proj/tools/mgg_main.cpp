#include "cli.hpp"

int main(int argc, char** argv) { return mgg::cli::run_cli(argc, argv); }
