#include <string>
#include <vector>

#include "avprosody/cli.hpp"

int main(int argc, char** argv) {
    return avprosody::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
