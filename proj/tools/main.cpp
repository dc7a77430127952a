#include "cli_app.hpp"

int main(int argc, char** argv) { return reprrec::cli::run(argc, argv); }
