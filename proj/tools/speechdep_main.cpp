#include "speechdep/cli.hpp"

int main(int argc, char** argv) { return speechdep::cli::run(argc, argv); }
