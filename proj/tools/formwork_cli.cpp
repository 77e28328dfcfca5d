#include <formwork/cli.hpp>

int main(int argc, char** argv) { return formwork::run_cli(argc, argv); }
