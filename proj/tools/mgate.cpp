#include "matchgate/cli.hpp"

int main(int argc, char** argv) { return matchgate::cli::run(argc, argv); }
