#include "netpoint/cli.hpp"

int main(int argc, char** argv) { return netpoint::cli::dispatch(argc, argv); }
