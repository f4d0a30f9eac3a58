#include <string>
#include <vector>

#include "prd/cli.hpp"

int main(int argc, char** argv) {
    return prd::cli::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
