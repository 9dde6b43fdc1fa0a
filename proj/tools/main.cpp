#include "geovad/cli.hpp"

int main(int argc, char** argv) { return geovad::cli::run(argc, argv); }
