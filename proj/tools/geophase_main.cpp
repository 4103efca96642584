#include "cli/app.hpp"

int main(int argc, char** argv) { return geophase::cli::run(argc, argv); }
