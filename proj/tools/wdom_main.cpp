#include "cli.hpp"

int main(int argc, char** argv) { return wdom::cli::run(argc, argv); }
