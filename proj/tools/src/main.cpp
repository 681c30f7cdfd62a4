#include <exception>
#include <iostream>

#include "fairdiv/cli.hpp"

int main(int argc, char** argv) {
    try {
        return fairdiv::cli::run(argc, argv, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "{\"error\":\"internal\",\"message\":\"" << e.what() << "\"}\n";
        return fairdiv::cli::exit_invariant_breach;
    }
}
