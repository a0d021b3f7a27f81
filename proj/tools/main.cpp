#include "moba/cli.hpp"

int main(int argc, char** argv) { return moba::cli::run(argc, argv); }
