#include "cli.hpp"

int main(int argc, char** argv) { return graphheat::cli::run(argc, argv); }
