#include "commands.hpp"

int main(int argc, char** argv) { return qgevrey::cli::run_cli(argc, argv); }
