#ifndef NGSP_SYNTH_HPP
#define NGSP_SYNTH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ngsp/dataset.hpp"
#include "ngsp/grammar.hpp"

namespace ngsp {

struct SynthSpec {
    std::string grammar_name = "toychair";
    int count = 1;
    std::uint64_t seed = 0;
};

struct SynthResult {
    Grammar grammar;
    std::vector<LabeledShape> shapes;
};

// Seeded procedural dataset of cuboid-part chairs with per-region ground
// truth. Every region carries surface-sampled points and a face grid so the
// corruption pass applies; every shape passes the small-region filter.
SynthResult generate_dataset(const SynthSpec& spec);

// Grammar document for a bundled toy grammar.
std::string builtin_grammar_text(const std::string& name);

// Versioned generator parameter table, printed by `synth --describe`.
std::string describe_generator();

} // namespace ngsp

#endif
