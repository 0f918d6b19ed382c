#include "haar_dial/cli.hpp"

int main(int argc, char** argv) { return haar_dial::cli::run(argc, argv); }
