#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ownlin/json_io.hpp"
#include "ownlin/lang.hpp"

namespace ownlin {

/// A library and/or client with its specification, initial states and
/// bounds, as read from a program file.
struct Program {
  std::string name;
  AlgebraId algebra = AlgebraId::ram;
  Library library;
  ClientProgram client;
  Spec gamma;
  Bounds bounds;
  std::vector<State> init;
  /// Initial states of the client side, when the file also carries a client.
  std::vector<State> client_init;
};

/// Bounds given in the file override `defaults`. Specs are checked for
/// precision over `universe`.
Program program_from_json(const json& j, const StateUniverse& universe = {});
Program load_program(const std::string& path, const StateUniverse& universe = {});

struct SpecExtensionFile {
  Spec base;
  Spec extended;
  std::vector<State> extra_init;
};

SpecExtensionFile spec_extension_from_json(const json& j, AlgebraId alg, int threads,
                                           const StateUniverse& universe = {});
SpecExtensionFile load_spec_extension(const std::string& path, AlgebraId alg, int threads,
                                      const StateUniverse& universe = {});

json read_json_file(const std::string& path);

/// Number of threads specs are instantiated for.
int spec_threads(const Bounds& b, const ClientProgram& c);

}  // namespace ownlin
