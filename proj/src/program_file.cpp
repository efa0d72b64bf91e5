#include "ownlin/program_file.hpp"

#include <algorithm>
#include <fstream>

namespace ownlin {

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

int spec_threads(const Bounds& b, const ClientProgram& c) {
  return std::max(b.mgc_threads, static_cast<int>(c.threads.size()));
}

namespace {

std::vector<State> states_from(const json& j, AlgebraId alg) {
  std::vector<State> out;
  for (const auto& s : j) out.push_back(state_from_json(s, alg));
  return out;
}

}  // namespace

Program program_from_json(const json& j, const StateUniverse& universe) {
  Program p;
  try {
    p.name = j.value("name", std::string("program"));
    p.algebra = parse_algebra(j.value("algebra", std::string("ram")));
    if (j.contains("library")) {
      for (const auto& [m, body] : j.at("library").items()) {
        p.library.methods[m] = command_from_json(body);
        if (p.library.methods[m].contains_call()) throw FormatError("method " + m + " calls another method");
      }
    }
    if (j.contains("client")) {
      for (const auto& c : j.at("client")) p.client.threads.push_back(command_from_json(c));
    }
    if (j.contains("bounds")) p.bounds = bounds_from_json(j.at("bounds"));
    if (j.contains("gamma")) p.gamma = spec_from_json(j.at("gamma"), p.algebra, spec_threads(p.bounds, p.client));
    if (j.contains("init")) p.init = states_from(j.at("init"), p.algebra);
    if (j.contains("client_init")) p.client_init = states_from(j.at("client_init"), p.algebra);
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed program: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("malformed program: ") + e.what());
  }
  try {
    require_precise(p.gamma, universe);
  } catch (const std::invalid_argument& e) {
    throw FormatError(p.name + ": " + e.what());
  }
  return p;
}

Program load_program(const std::string& path, const StateUniverse& universe) {
  return program_from_json(read_json_file(path), universe);
}

SpecExtensionFile spec_extension_from_json(const json& j, AlgebraId alg, int threads, const StateUniverse& universe) {
  SpecExtensionFile f;
  try {
    f.base = spec_from_json(j.at("gamma_base"), alg, threads);
    f.extended = spec_from_json(j.at("gamma_ext"), alg, threads);
    if (j.contains("extra_init")) f.extra_init = states_from(j.at("extra_init"), alg);
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed spec extension: ") + e.what());
  }
  try {
    require_precise(f.base, universe);
    require_precise(f.extended, universe);
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  return f;
}

SpecExtensionFile load_spec_extension(const std::string& path, AlgebraId alg, int threads,
                                      const StateUniverse& universe) {
  return spec_extension_from_json(read_json_file(path), alg, threads, universe);
}

}  // namespace ownlin
