#include "warped/cli.hpp"

int main(int argc, char** argv) {
    return warped::run_cli(argc, argv);
}
