#include <iostream>

#include "funnelbot/stats.hpp"

int main(int argc, char** argv) {
    return funnelbot::stats_cli_main(argc, argv, std::cout, std::cerr);
}
