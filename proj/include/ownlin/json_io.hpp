#pragma once

#include <json.hpp>

#include "ownlin/algebra.hpp"
#include "ownlin/footprint.hpp"
#include "ownlin/history.hpp"
#include "ownlin/lang.hpp"

namespace ownlin {

using json = nlohmann::json;

/// Thrown on malformed input files.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json state_to_json(const State& s);
/// Accepts {"alg":..,"cells":{..}} or a bare cells object read in `alg`.
State state_from_json(const json& j, AlgebraId alg);
State state_from_json(const json& j);

json footprint_to_json(const Footprint& l);
Footprint footprint_from_json(const json& j);

json history_to_json(const History& h);
History history_from_json(const json& j, AlgebraId alg);

json interface_set_to_json(const InterfaceSet& set);

json trace_to_json(const Trace& tr);

json expr_to_json(const Expr& e);
Expr expr_from_json(const json& j);
json command_to_json(const Command& c);
Command command_from_json(const json& j);

/// Predicate templates: cells keyed "t" and values "t" stand for the thread
/// id. A JSON object keyed by thread id gives per-thread lists instead.
ParamPredicate param_predicate_from_json(const json& j, AlgebraId alg, int threads);
json param_predicate_to_json(const ParamPredicate& p);
Spec spec_from_json(const json& j, AlgebraId alg, int threads);
json spec_to_json(const Spec& s);

Bounds bounds_from_json(const json& j, Bounds defaults = {});
json bounds_to_json(const Bounds& b);

StateUniverse universe_from_json(const json& j);

json law_report_to_json(const LawReport& r);

}  // namespace ownlin
