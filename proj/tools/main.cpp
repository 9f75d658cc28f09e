#include "tdss/cli.hpp"

int main(int argc, char** argv) {
    return tdss::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
