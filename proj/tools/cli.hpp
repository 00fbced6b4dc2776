#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "aqm/world.hpp"

namespace aqm::cli {

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

/// Environment variable that overrides the default output directory.
inline constexpr const char* kOutputDirEnv = "AQM_OUTPUT_DIR";

struct PlayOptions {
    std::uint32_t rounds = 10;
    std::uint32_t k = 20;
    double threshold = 0.99;
    std::string transcript_path;  // empty: no file written
};

/// Interactive game: the program asks, the human on `in` answers.
int play(const World& world, const PlayOptions& options, std::istream& in, std::ostream& out);

}  // namespace aqm::cli
