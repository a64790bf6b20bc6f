#include "nlfront/cli.hpp"

int main(int argc, char** argv) { return nlfront::run_cli(argc, argv); }
