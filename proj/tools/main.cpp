#include "usergraph/cli.hpp"

int main(int argc, char** argv) { return usergraph::dispatch(argc, argv); }
