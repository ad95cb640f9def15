#include <cstdio>
#include <string>
#include <vector>

#include "blockdd/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    blockdd::CliResult res = blockdd::run_command(args);
    std::fputs(res.report.c_str(), stdout);
    return res.exitCode;
}
