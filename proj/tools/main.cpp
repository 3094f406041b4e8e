#include "twincast/cli.hpp"

int main(int argc, char** argv) { return twincast::cli::execute(argc, argv); }
