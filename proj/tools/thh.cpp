#include "thh/cli.hpp"

int main(int argc, char** argv) { return thh::cli::run(argc, argv); }
