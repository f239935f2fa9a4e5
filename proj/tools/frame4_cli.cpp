#include <string>
#include <vector>

#include "frame4/cli.hpp"

int main(int argc, char** argv) {
    return frame4::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
