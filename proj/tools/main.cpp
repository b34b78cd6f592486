#include <CLI11.hpp>

#include "cuspdim/cuspdim.hpp"

int main(int argc, char** argv) {
    CLI::App app{"cuspdim"};
    (void)argc;
    (void)argv;
    return 0;
}
