#include "kproc/cli.h"

int main(int argc, char** argv) { return kproc::run(argc, argv); }
