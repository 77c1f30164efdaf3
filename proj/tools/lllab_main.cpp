#include "ll/experiment.hpp"

int main(int argc, char** argv) { return ll::run_cli(argc, argv); }
