#include "bhpfit/cli.h"

int main(int argc, char** argv) { return bhpfit::run_cli(argc, argv); }
