#include "pageflip/cli.hpp"

int main(int argc, char** argv) { return pageflip::cli_dispatch(argc, argv); }
