#include <string>
#include <vector>

#include "morph/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return morph::cli::run(args);
}
