#include <cstdio>
#include <string>
#include <vector>

#include "wishart/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args;
    args.reserve(static_cast<size_t>(argc > 0 ? argc - 1 : 0));
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);

    const wishart::cli::CommandResult result = wishart::cli::run_command(args);
    if (!result.out.empty()) std::fputs(result.out.c_str(), stdout);
    if (!result.err.empty()) std::fputs(result.err.c_str(), stderr);
    return result.exit_code;
}
