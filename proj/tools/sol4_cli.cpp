#include "sol4/cli.hpp"

int main(int argc, char** argv) { return sol4::cli::run(argc, argv); }
