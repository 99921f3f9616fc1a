#include <iostream>

#include "funnelbot/replay.hpp"

int main(int argc, char** argv) {
    return funnelbot::replay_cli_main(argc, argv, std::cout, std::cerr);
}
