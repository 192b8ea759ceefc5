#include "nk/cli.hpp"

int main(int argc, char** argv) { return nk::run(argc, argv); }
