#pragma once

#include <cstdint>
#include <random>

#include "ownlin/program_file.hpp"

namespace ownlin::fixtures {

/// One-slot buffer spec over cell 10: put hands the cell to the library,
/// get hands it back, op transfers nothing. Threads 1 and 2.
Spec buffer_spec();
/// Library-owned cells: flag 4 and scratch cells 5, 6.
State buffer_init();

/// Random code for the buffer spec. The flag discipline keeps every such
/// library safe; the rest (scratch updates, writes to the owned cell,
/// blocking assumes, loops, choices, atomic grouping) is random.
Library random_buffer_library(std::mt19937_64& rng);

/// Same methods with each body folded into one atomic block (loops unrolled
/// `star` times).
Library atomized(const Library& lib, int star);

/// Bounds small enough for exhaustive interface sets of random libraries.
Bounds small_bounds();

}  // namespace ownlin::fixtures
