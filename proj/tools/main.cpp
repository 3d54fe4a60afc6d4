#include "fundgrowth/cli.hpp"

int main(int argc, char** argv) { return fundgrowth::cli::run(argc, argv); }
