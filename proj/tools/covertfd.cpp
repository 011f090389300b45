#include "covert/cli_main.hpp"

int main(int argc, char** argv) { return covert::cli::cli_main(argc, argv); }
