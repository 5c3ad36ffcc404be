// Runs the full verification suite and prints one line per check.
#include <cstring>
#include <iostream>

#include "osud/verify.hpp"

int main(int argc, char** argv) {
    osud::verify::Options options;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--quick") == 0) options.quick = true;
        if (std::strcmp(argv[i], "--workers") == 0 && i + 1 < argc) options.workers = std::atoi(argv[++i]);
    }
    auto results = osud::verify::run_suite(options);
    osud::verify::print_results(results, std::cout, /*with_timing=*/true);
    return osud::verify::all_passed(results) ? 0 : 1;
}
