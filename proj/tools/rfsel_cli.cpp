#include "rfsel/cli.hpp"

int main(int argc, char** argv) { return rfsel::cli::run(argc, argv); }
