#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <optional>
#include <random>

#include "ownlin/checker.hpp"
#include "ownlin/footprint.hpp"
#include "ownlin/frame.hpp"
#include "ownlin/json_io.hpp"
#include "ownlin/program_file.hpp"
#include "ownlin/rearrange.hpp"
#include "ownlin/semantics.hpp"

using namespace ownlin;

namespace {

struct Options {
  std::optional<int> star;
  std::optional<int> mgc_threads;
  std::optional<int> mgc_iterations;
  std::optional<std::size_t> max_trace;
  std::string universe_file;
  std::uint64_t seed = 1;
  bool json_out = false;

  StateUniverse universe() const {
    return universe_file.empty() ? StateUniverse{} : universe_from_json(read_json_file(universe_file));
  }
  Bounds apply(Bounds b) const {
    if (star) b.star = *star;
    if (mgc_threads) b.mgc_threads = *mgc_threads;
    if (mgc_iterations) b.mgc_iterations = *mgc_iterations;
    if (max_trace) b.max_trace = *max_trace;
    return b;
  }
  Program load(const std::string& path) const {
    Program p = load_program(path, universe());
    p.bounds = apply(p.bounds);
    return p;
  }
};

int report(const Options& o, Verdict v, const std::string& detail, json extra = json::object()) {
  if (o.json_out) {
    extra["verdict"] = to_string(v);
    extra["detail"] = detail;
    std::cout << extra.dump(2) << "\n";
  } else {
    std::cout << to_string(v) << ": " << detail << "\n";
  }
  return exit_code(v);
}

json lin_json(const LinCheck& r) {
  json j{{"verdict", to_string(r.verdict)}, {"detail", r.detail}, {"left", r.left_size}, {"right", r.right_size}};
  if (r.inclusion) j["inclusion"] = *r.inclusion;
  return j;
}

json bounds_line(const Bounds& b) { return bounds_to_json(b); }

int check_lin(const Options& o, const std::string& a_path, const std::string& b_path) {
  Program a = o.load(a_path);
  Program b = o.load(b_path);
  LinCheck r = check_lin_code(a.library, a.gamma, a.init, b.library, b.init, a.bounds, a.algebra);
  json j = lin_json(r);
  j["bounds"] = bounds_line(a.bounds);
  if (!o.json_out) {
    std::cerr << "interface sets: " << r.left_size << " / " << r.right_size;
    if (r.inclusion) std::cerr << ", exact inclusion " << (*r.inclusion ? "yes" : "no");
    std::cerr << "\n";
  }
  return report(o, r.verdict, r.detail, j);
}

int check_balanced(const Options& o, const std::string& hist_path, const std::string& foot_path) {
  json hj = read_json_file(hist_path);
  AlgebraId alg = AlgebraId::ram;
  if (hj.is_object()) {
    if (hj.contains("alg")) alg = parse_algebra(hj.at("alg").get<std::string>());
    hj = hj.at("history");
  }
  History h = history_from_json(hj, alg);
  Footprint l = footprint_from_json(read_json_file(foot_path));
  if (!check_well_formed(h)) return report(o, Verdict::hypothesis_failed, "history is not well formed");
  auto end = evaluate_footprint(h, l);
  if (!end) return report(o, Verdict::violated, "not balanced from " + l.to_string());
  return report(o, Verdict::holds_at_bounds, "balanced, final footprint " + end->to_string(),
                json{{"final", footprint_to_json(*end)}});
}

int abstraction(const Options& o, const std::string& c_path, const std::string& a_path, const std::string& b_path) {
  Program c = o.load(c_path);
  Program a = o.load(a_path);
  Program b = o.load(b_path);
  if (c.client.threads.empty()) return report(o, Verdict::hypothesis_failed, "client file has no client");
  const Spec& gamma = c.gamma.empty() ? a.gamma : c.gamma;
  AbstractionInputs in{&c.client, &gamma, c.client_init, &a.library, a.init, a.algebra, c.bounds};
  AbstractionCheck r = abstraction_check_code(in, b.library, b.init);
  json j{{"concrete_outcomes", r.concrete_outcomes}, {"abstract_outcomes", r.abstract_outcomes}};
  if (r.lin) j["linearizability"] = lin_json(*r.lin);
  if (r.counterexample) {
    j["counterexample"] = json{{"init", state_to_json(r.counterexample->first)},
                               {"trace", trace_to_json(r.counterexample->second)}};
  }
  return report(o, r.verdict, r.detail, j);
}

int frame(const Options& o, const std::string& a_path, const std::string& b_path, const std::string& x_path) {
  Program a = o.load(a_path);
  Program b = o.load(b_path);
  SpecExtensionFile x =
      load_spec_extension(x_path, a.algebra, std::max(spec_threads(a.bounds, a.client), 2), o.universe());
  if (x.extra_init.empty()) x.extra_init.push_back(State(a.algebra));
  FrameInputs in{&a.library, &b.library, &x.base, &x.extended, a.init, b.init, x.extra_init, a.bounds, a.algebra};
  FrameReport r = frame_check(in);
  auto hyp = [](const Hypothesis& h) { return json{{"ok", h.ok}, {"detail", h.detail}}; };
  json j{{"hypotheses",
          {{"extends", hyp(r.extends)}, {"safety", hyp(r.safety)}, {"base_lin", hyp(r.base_lin)},
           {"extra_untouched", hyp(r.untouched)}}},
         {"traces", r.traces},
         {"reconstructed", r.reconstructed},
         {"unreached", r.unreached},
         {"lemmas", law_report_to_json(r.lemmas)}};
  if (r.direct) j["direct"] = lin_json(*r.direct);
  if (r.witness) {
    j["witness"] = json{{"extra", state_to_json(r.witness->extra)},
                        {"ceiled_history", history_to_json(r.witness->ceiled)},
                        {"index", r.witness->index},
                        {"failure", r.witness->failure}};
  }
  if (!o.json_out) {
    const std::pair<const char*, const Hypothesis*> hs[] = {
        {"(1) extension", &r.extends}, {"(2) safety", &r.safety}, {"(3) base linearizability", &r.base_lin},
        {"(4) extra state untouched", &r.untouched}};
    for (const auto& [name, h] : hs) std::cerr << name << ": " << (h->ok ? "ok" : "FAILED " + h->detail) << "\n";
    if (r.direct) std::cerr << "direct check under the extended spec: " << to_string(r.direct->verdict) << "\n";
    if (r.witness) std::cerr << "witness: " << to_string(r.witness->ceiled) << "\n";
  }
  return report(o, r.verdict, r.detail, j);
}

int validate_algebra(const Options& o, const std::string& alg_name) {
  AlgebraId alg = parse_algebra(alg_name);
  StateUniverse u = o.universe();
  auto t0 = std::chrono::steady_clock::now();
  LawReport laws = algebra_law_check(alg, u);
  laws.merge(footprint_law_check(alg, u));
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Verdict v = laws.passed() ? Verdict::holds_at_bounds : Verdict::violated;
  json j = law_report_to_json(laws);
  j["seconds"] = secs;
  std::string detail = std::to_string(laws.cases) + " cases over " + std::to_string(u.enumerate(alg).size()) +
                       " states";
  if (!laws.passed()) {
    const auto& c = laws.counterexamples.front();
    detail += "; " + c.law + " fails at " + c.inputs + ": expected " + c.expected + ", got " + c.got;
  }
  return report(o, v, detail, j);
}

int dump_interf(const Options& o, const std::string& path) {
  Program p = o.load(path);
  InterfaceSet is = interf(p.library, p.gamma, p.init, p.bounds, p.algebra);
  if (o.json_out) {
    std::cout << interface_set_to_json(is).dump(2) << "\n";
  } else {
    for (const auto& e : is) std::cout << e.initial.to_string() << " " << to_string(e.history) << "\n";
  }
  std::cerr << is.size() << " histories\n";
  return 0;
}

json log_json(const RearrangeLog& log) {
  json stages = json::array();
  for (const auto& s : log.stages) {
    stages.push_back(json{{"k", s.k}, {"call", s.call}, {"prefix_len", s.prefix_len}, {"swaps", s.swaps}});
  }
  json swaps = json::array();
  for (const auto& [pos, kind] : log.swaps) swaps.push_back(json{{"pos", pos}, {"rule", to_string(kind)}});
  return json{{"stages", stages}, {"swaps", swaps}};
}

// Finds a library run whose history linearizes the target and turns it into
// a run with exactly the target history.
int rearrange_cmd(const Options& o, const std::string& path, const std::string& target_path, bool explain) {
  Program p = o.load(path);
  json tj = read_json_file(target_path);
  History target = history_from_json(tj.at("history"), p.algebra);
  std::optional<Footprint> foot;
  if (tj.contains("from")) foot = footprint_from_json(tj.at("from"));
  TraceMachine m(&p.library, nullptr, GenMode::library_local, p.bounds);
  std::mt19937_64 rng(o.seed);
  for (const auto& s0 : p.init) {
    Footprint l = foot.value_or(delta(s0));
    if (!foot_leq(delta(s0), l)) continue;
    std::vector<Trace> candidates;
    explore_outcomes(m, &p.gamma, s0, [&](const Trace& tr, const std::vector<Outcome>& outs) {
      if (tr.size() > target.size() * 8 + 8) return;
      for (const auto& out : outs) {
        Trace lam = annotate(tr, out.annots);
        if (linearized_by(target, history(lam, p.algebra))) candidates.push_back(std::move(lam));
      }
    });
    if (candidates.empty()) continue;
    // prefer a run that actually needs reordering
    std::vector<Trace> moved;
    for (const auto& t : candidates) {
      if (history(t, p.algebra) != target) moved.push_back(t);
    }
    if (!moved.empty()) candidates.swap(moved);
    const Trace& lam = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
    try {
      RearrangeResult r = rearrange(m, p.gamma, s0, lam, target, l);
      json j{{"from", state_to_json(s0)}, {"input", trace_to_json(lam)}, {"output", trace_to_json(r.trace)}};
      if (explain) j["log"] = log_json(r.log);
      if (!o.json_out) {
        std::cerr << "input:  " << to_string(lam) << "\n";
        std::cerr << "output: " << to_string(r.trace) << "\n";
        std::cerr << r.log.total_swaps() << " swaps over " << r.log.stages.size() << " stages\n";
        if (explain) std::cerr << log_json(r.log).dump(2) << "\n";
      }
      return report(o, Verdict::holds_at_bounds, "rearranged in " + std::to_string(r.log.total_swaps()) + " swaps", j);
    } catch (const RearrangeAssertion& e) {
      return report(o, Verdict::violated, std::string("assertion: ") + e.what());
    }
  }
  return report(o, Verdict::hypothesis_failed, "no library run within bounds linearizes the target");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linearizability with ownership transfer, checked at bounds"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--bound-star", o.star, "loop unrolling bound");
    sub->add_option("--mgc-threads", o.mgc_threads, "most general client threads");
    sub->add_option("--mgc-iterations", o.mgc_iterations, "most general client loop bound");
    sub->add_option("--max-trace", o.max_trace, "trace length bound");
    sub->add_option("--universe", o.universe_file, "JSON file with locs, vals and perms")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "seed for randomized choices");
    sub->add_flag("--json", o.json_out, "machine-readable report");
  };

  std::string a, b, c, alg = "ram";
  bool explain = false;

  auto* lin = app.add_subcommand("check-lin", "is library A linearized by library B");
  lin->add_option("A", a)->required()->check(CLI::ExistingFile);
  lin->add_option("B", b)->required()->check(CLI::ExistingFile);
  common(lin);

  auto* bal = app.add_subcommand("check-balanced", "is a history balanced from a footprint");
  bal->add_option("history", a)->required()->check(CLI::ExistingFile);
  bal->add_option("--from", b, "footprint file")->required()->check(CLI::ExistingFile);
  common(bal);

  auto* abs = app.add_subcommand("abstraction", "client behaviours over A are reproduced over B");
  abs->add_option("client", c)->required()->check(CLI::ExistingFile);
  abs->add_option("A", a)->required()->check(CLI::ExistingFile);
  abs->add_option("B", b)->required()->check(CLI::ExistingFile);
  common(abs);

  auto* fr = app.add_subcommand("frame-check", "linearizability under an extended specification");
  fr->add_option("A", a)->required()->check(CLI::ExistingFile);
  fr->add_option("B", b)->required()->check(CLI::ExistingFile);
  fr->add_option("extension", c)->required()->check(CLI::ExistingFile);
  common(fr);

  auto* alg_cmd = app.add_subcommand("validate-algebra", "separation algebra and footprint laws");
  alg_cmd->add_option("--alg", alg, "ram or ram_pi");
  common(alg_cmd);

  auto* di = app.add_subcommand("dump-interf", "interface set of a library");
  di->add_option("library", a)->required()->check(CLI::ExistingFile);
  common(di);

  auto* re = app.add_subcommand("rearrange", "turn a library run into one with a given history");
  re->add_option("library", a)->required()->check(CLI::ExistingFile);
  re->add_option("target", b, "JSON with history and optional from footprint")->required()->check(CLI::ExistingFile);
  re->add_flag("--explain", explain, "print the swap log");
  common(re);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*lin) return check_lin(o, a, b);
    if (*bal) return check_balanced(o, a, b);
    if (*abs) return abstraction(o, c, a, b);
    if (*fr) return frame(o, a, b, c);
    if (*alg_cmd) return validate_algebra(o, alg);
    if (*di) return dump_interf(o, a);
    if (*re) return rearrange_cmd(o, a, b, explain);
  } catch (const UnsafeError& e) {
    std::cerr << "HYPOTHESIS-FAILED: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
