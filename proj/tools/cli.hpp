#pragma once

#include <glucest/dataset.hpp>
#include <glucest/forest.hpp>
#include <glucest/synth.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace glucest::cli {

enum class Format { Text, Structured };

struct RunConfig {
    std::string input;
    std::string output;
    std::string model;
    std::string plot;
    SplitConfig split;
    Eigen::Index window_length = 5;
    ForestParams forest;
    SynthConfig synth;
    Format format = Format::Text;
};

// Entry point shared by the executable and the tests. `args` excludes the
// program name. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace glucest::cli
