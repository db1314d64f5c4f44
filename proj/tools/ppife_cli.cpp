#include <cstdio>
#include <exception>
#include <iostream>

#include "ppife/cli.hpp"
#include "ppife/study.hpp"

int main(int argc, char** argv) {
    ppife::RunConfig cfg;
    try {
        cfg = ppife::parse_config(argc, argv);
    } catch (const ppife::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }
    try {
        ppife::ConvergenceReport report = ppife::run_study(cfg, std::cout);
        return report.complete ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
