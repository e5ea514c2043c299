#include "cmtk/cli.hpp"

int main(int argc, char** argv) { return cmtk::cli::run(argc, argv); }
