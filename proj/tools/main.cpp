#include "hotspot/cli.hpp"

int main(int argc, char** argv) { return hotspot::cli::run(argc, argv); }
