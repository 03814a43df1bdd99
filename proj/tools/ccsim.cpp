// Command-line front end: decide behavioural relations, search and print
// proofs, run the exhaustive validation sweeps, and enumerate bounded term
// slices.  Exit codes are a stable contract: 0 when the queried property
// holds (relation true, proof found, sweep clean, witness passed), 1 when it
// fails, 2 on usage, parse, or precondition errors.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ccsim/enumeration.hpp"
#include "ccsim/parser.hpp"
#include "ccsim/proof.hpp"
#include "ccsim/provers.hpp"
#include "ccsim/semantics.hpp"

namespace {

using namespace ccsim;
using nlohmann::ordered_json;

// ── Input loading ───────────────────────────────────────────────────────────

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

/// Terms and the alphabet come from a process file or an inline alphabet
/// spec; exactly one of the two.
struct Workspace {
  Alphabet alphabet;
  std::optional<ProcessFile> file;
};

Workspace load_workspace(const std::string& file_path,
                         const std::string& alphabet_spec) {
  if (!file_path.empty() && !alphabet_spec.empty())
    throw std::invalid_argument("pass either --file or --alphabet, not both");
  Workspace workspace;
  if (!file_path.empty()) {
    ProcessFile parsed = parse_process_file(read_file(file_path));
    workspace.alphabet = parsed.alphabet;
    workspace.file = std::move(parsed);
  } else if (!alphabet_spec.empty()) {
    workspace.alphabet = parse_alphabet_spec(alphabet_spec);
  } else {
    throw std::invalid_argument(
        "an alphabet is needed: pass --file or --alphabet");
  }
  return workspace;
}

/// A defined process when the name matches, an inline term otherwise.
Term resolve_term(const Workspace& workspace, const std::string& text) {
  if (workspace.file && workspace.file->has(text))
    return workspace.file->process(text);
  return parse_term(text, workspace.alphabet);
}

/// A built-in axiom set by name, or a parsed axiom file.
std::shared_ptr<const AxiomSet> load_axiom_set(const std::string& name_or_path) {
  const std::vector<std::string>& names = builtin_axiom_set_names();
  if (std::find(names.begin(), names.end(), name_or_path) != names.end())
    return builtin_axiom_set(name_or_path);
  std::string text;
  try {
    text = read_file(name_or_path);
  } catch (const std::invalid_argument&) {
    std::string known;
    for (const std::string& name : names) {
      if (!known.empty()) known += ", ";
      known += name;
    }
    throw std::invalid_argument("'" + name_or_path +
                                "' is neither a built-in axiom set (" + known +
                                ") nor a readable axiom file");
  }
  return parse_axiom_set(text);
}

std::string relation_help() {
  std::string out = "one of:";
  for (const RelationKind kind : all_relations()) {
    out += ' ';
    out += to_string(kind);
  }
  return out;
}

RelationKind parse_relation(const std::string& name) {
  const std::optional<RelationKind> kind = relation_from_string(name);
  if (!kind)
    throw std::invalid_argument("unknown relation '" + name + "'; " +
                                relation_help());
  return *kind;
}

// ── check ───────────────────────────────────────────────────────────────────

struct CheckArgs {
  std::string file, alphabet, relation, lhs, rhs;
  bool json = false;
};

int run_check(const CheckArgs& args) {
  const Workspace workspace = load_workspace(args.file, args.alphabet);
  const RelationKind kind = parse_relation(args.relation);
  const Term lhs = resolve_term(workspace, args.lhs);
  const Term rhs = resolve_term(workspace, args.rhs);
  const bool verdict = relation_holds(kind, lhs, rhs, workspace.alphabet);
  if (args.json) {
    ordered_json j;
    j["command"] = "check";
    j["relation"] = to_string(kind);
    j["alphabet"] = workspace.alphabet.to_text();
    j["lhs"] = to_text(lhs);
    j["rhs"] = to_text(rhs);
    j["holds"] = verdict;
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << to_string(kind) << "(" << to_text(lhs) << ", " << to_text(rhs)
              << ") " << (verdict ? "holds" : "does not hold") << '\n';
  }
  return verdict ? 0 : 1;
}

// ── prove ───────────────────────────────────────────────────────────────────

struct ProveArgs {
  std::string file, alphabet, relation, axioms, lhs, rhs, proof_out;
  bool json = false;
};

/// Picks the target relation from --relation, --axioms, or both (agreeing).
RelationKind prove_target(const ProveArgs& args) {
  if (args.relation.empty() && args.axioms.empty())
    throw std::invalid_argument(
        "pass --relation or --axioms to pick the axiom system");
  std::optional<RelationKind> from_set;
  if (!args.axioms.empty()) {
    const std::vector<std::string>& names = builtin_axiom_set_names();
    if (std::find(names.begin(), names.end(), args.axioms) == names.end())
      throw std::invalid_argument(
          "proof search is available for the built-in axiom systems only; "
          "custom axiom files can be validated with 'sweep soundness'");
    from_set = builtin_axiom_set(args.axioms)->target;
  }
  std::optional<RelationKind> from_relation;
  if (!args.relation.empty())
    from_relation = parse_relation(args.relation);
  if (from_set && from_relation && *from_set != *from_relation)
    throw std::invalid_argument("--relation " + args.relation +
                                " is not the target of axiom set " +
                                args.axioms);
  return from_set ? *from_set : *from_relation;
}

int run_prove(const ProveArgs& args) {
  const Workspace workspace = load_workspace(args.file, args.alphabet);
  const RelationKind kind = prove_target(args);
  if (kind == RelationKind::cc_equiv && workspace.alphabet.has_bivariant())
    throw std::invalid_argument(
        "cc_equiv over an alphabet with bivariant actions admits no finite "
        "sound and ground-complete inequational axiomatization, so no proof "
        "system is bundled ('witness' demonstrates the obstruction family)");
  ProofFactory factory(kind, workspace.alphabet);
  const Term lhs = resolve_term(workspace, args.lhs);
  const Term rhs = resolve_term(workspace, args.rhs);
  const std::optional<Proof> proof = factory.prove(lhs, rhs);

  if (!proof) {
    if (args.json) {
      ordered_json j;
      j["command"] = "prove";
      j["relation"] = to_string(kind);
      j["alphabet"] = workspace.alphabet.to_text();
      j["lhs"] = to_text(lhs);
      j["rhs"] = to_text(rhs);
      j["proof"] = nullptr;
      std::cout << j.dump(2) << '\n';
    } else {
      std::cout << "no proof: " << to_string(kind) << "(" << to_text(lhs)
                << ", " << to_text(rhs) << ") does not hold\n";
    }
    return 1;
  }

  const std::string serialized = proof_to_json(*proof);
  if (!args.proof_out.empty()) {
    std::ofstream out(args.proof_out);
    if (!out)
      throw std::invalid_argument("cannot write '" + args.proof_out + "'");
    out << serialized << '\n';
  }
  if (args.json) {
    std::cout << serialized << '\n';
  } else {
    std::cout << to_text(*proof);
    std::cout << "axiom steps: " << count_axiom_steps(*proof);
    const std::map<std::string, std::size_t> counts = axiom_step_counts(*proof);
    bool first = true;
    for (const auto& [schema, count] : counts) {
      std::cout << (first ? " (" : ", ") << schema << " x" << count;
      first = false;
    }
    if (!counts.empty()) std::cout << ")";
    std::cout << '\n';
  }
  return 0;
}

// ── sweep ───────────────────────────────────────────────────────────────────

struct SweepArgs {
  std::string file, alphabet, axioms, relation;
  int depth = 2;
  int width = 2;
  bool json = false;
};

int finish_sweep(const SweepReport& report, bool json) {
  if (json) {
    std::cout << report_to_json(report) << '\n';
  } else {
    std::cout << "sweep: " << report.sweep << '\n'
              << "alphabet: " << report.alphabet << '\n'
              << "bounds: depth <= " << report.max_depth << ", width <= "
              << report.max_width << '\n'
              << "terms: " << report.terms << '\n'
              << "instances examined: " << report.pairs_examined << '\n'
              << "violations: " << report.violations.size() << '\n';
    const std::size_t shown =
        std::min<std::size_t>(report.violations.size(), 10);
    for (std::size_t i = 0; i < shown; ++i) {
      const SweepViolation& v = report.violations[i];
      std::cout << "  [" << (i + 1) << "] " << v.lhs << "  vs  " << v.rhs
                << '\n'
                << "      expected " << v.expected << ", got " << v.got
                << " (" << v.evidence << ")\n";
    }
    if (report.violations.size() > shown)
      std::cout << "  ... " << (report.violations.size() - shown)
                << " more\n";
    std::cout << (report.passed() ? "PASS" : "FAIL") << '\n';
  }
  return report.passed() ? 0 : 1;
}

EnumerationBounds sweep_bounds(const Workspace& workspace,
                               const SweepArgs& args) {
  return {args.depth, args.width, workspace.alphabet};
}

int run_sweep_soundness(const SweepArgs& args) {
  const Workspace workspace = load_workspace(args.file, args.alphabet);
  if (args.axioms.empty())
    throw std::invalid_argument(
        "soundness needs --axioms (a built-in set name or an axiom file)");
  const std::shared_ptr<const AxiomSet> axioms = load_axiom_set(args.axioms);
  return finish_sweep(soundness_sweep(*axioms, sweep_bounds(workspace, args)),
                      args.json);
}

int run_sweep_completeness(const SweepArgs& args) {
  const Workspace workspace = load_workspace(args.file, args.alphabet);
  if (args.relation.empty())
    throw std::invalid_argument(
        "completeness needs --relation (an axiomatized relation)");
  const RelationKind kind = parse_relation(args.relation);
  return finish_sweep(completeness_sweep(kind, sweep_bounds(workspace, args)),
                      args.json);
}

int run_sweep_coarsest(const SweepArgs& args) {
  const Workspace workspace = load_workspace(args.file, args.alphabet);
  return finish_sweep(coarsest_precong_sweep(sweep_bounds(workspace, args)),
                      args.json);
}

int run_sweep_hierarchy(const SweepArgs& args) {
  const Workspace workspace = load_workspace(args.file, args.alphabet);
  return finish_sweep(hierarchy_sweep(sweep_bounds(workspace, args)),
                      args.json);
}

int run_sweep_degeneration(const SweepArgs& args) {
  const Workspace workspace = load_workspace(args.file, args.alphabet);
  return finish_sweep(degeneration_sweep(sweep_bounds(workspace, args)),
                      args.json);
}

// ── witness ─────────────────────────────────────────────────────────────────

struct WitnessArgs {
  std::string alphabet;
  int n = 0;
  bool json = false;
};

int run_witness(const WitnessArgs& args) {
  if (args.alphabet.empty())
    throw std::invalid_argument(
        "pass --alphabet with a covariant and a bivariant action, e.g. "
        "\"r: a; bi: c\"");
  const Alphabet alphabet = parse_alphabet_spec(args.alphabet);
  const WitnessReport report = nonaxiomatizability_witness(args.n, alphabet);
  if (args.json) {
    std::cout << report_to_json(report) << '\n';
  } else {
    std::cout << "witness n=" << report.n << " over " << report.alphabet
              << '\n'
              << "  p  = " << report.p << '\n'
              << "  q  = " << report.q << '\n'
              << "  p- = " << report.p_reduced << '\n'
              << "  q- = " << report.q_reduced << '\n';
    std::cout << (report.equivalence_holds ? "  [pass]" : "  [FAIL]")
              << " p and q are cc-equivalent\n";
    if (report.reduced_pair_fails.has_value())
      std::cout << (*report.reduced_pair_fails ? "  [pass]" : "  [FAIL]")
                << " the reduced pair is not cc-similar\n";
    else
      std::cout << "  [skip] the reduced pair collapses at n = 0\n";
    std::cout << (report.pruning_separates ? "  [pass]" : "  [FAIL]")
              << " depth-" << (report.n + 2)
              << " pruning keeps the pair bisimulation-distinct\n";
    std::cout << (report.passed() ? "PASS" : "FAIL") << '\n';
  }
  return report.passed() ? 0 : 1;
}

// ── enumerate ───────────────────────────────────────────────────────────────

struct EnumerateArgs {
  std::string file, alphabet;
  int depth = 2;
  int width = 2;
  bool json = false;
};

int run_enumerate(const EnumerateArgs& args) {
  const Workspace workspace = load_workspace(args.file, args.alphabet);
  const std::vector<Term> terms =
      enumerate_terms({args.depth, args.width, workspace.alphabet});
  if (args.json) {
    ordered_json j;
    j["command"] = "enumerate";
    j["alphabet"] = workspace.alphabet.to_text();
    j["bounds"] = ordered_json{{"max_depth", args.depth},
                               {"max_width", args.width}};
    j["count"] = terms.size();
    ordered_json list = ordered_json::array();
    for (const Term& term : terms) list.push_back(to_text(term));
    j["terms"] = std::move(list);
    std::cout << j.dump(2) << '\n';
  } else {
    for (const Term& term : terms) std::cout << to_text(term) << '\n';
  }
  return 0;
}

// ── print ───────────────────────────────────────────────────────────────────

struct PrintArgs {
  std::string file, alphabet;
  std::vector<std::string> items;
  bool json = false;
};

int run_print(const PrintArgs& args) {
  const Workspace workspace = load_workspace(args.file, args.alphabet);
  std::vector<std::pair<std::string, Term>> items;
  if (!args.items.empty()) {
    for (const std::string& item : args.items)
      items.emplace_back(item, resolve_term(workspace, item));
  } else if (workspace.file) {
    items = workspace.file->definitions;
  } else {
    throw std::invalid_argument(
        "print needs terms as positional arguments or a --file with "
        "definitions");
  }
  if (args.json) {
    ordered_json j;
    j["command"] = "print";
    j["alphabet"] = workspace.alphabet.to_text();
    ordered_json list = ordered_json::array();
    for (const auto& [name, term] : items)
      list.push_back(ordered_json{{"name", name}, {"term", to_text(term)}});
    j["definitions"] = std::move(list);
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "alphabet { " << workspace.alphabet.to_text() << " }\n";
    for (const auto& [name, term] : items) {
      if (workspace.file && workspace.file->has(name))
        std::cout << name << " = " << to_text(term) << '\n';
      else
        std::cout << to_text(term) << '\n';
    }
  }
  return 0;
}

}  // namespace

// ── Dispatch ────────────────────────────────────────────────────────────────

int main(int argc, char** argv) {
  CLI::App app{
      "Behavioural preorders, equational proofs, and exhaustive validation "
      "for finite BCCSP terms"};
  app.require_subcommand(1);
  const std::string relations = relation_help();

  CheckArgs check_args;
  CLI::App* check = app.add_subcommand(
      "check", "Decide a behavioural relation between two terms");
  check->add_option("--file", check_args.file,
                    "Process file: an alphabet block plus named definitions");
  check->add_option("--alphabet", check_args.alphabet,
                    "Inline alphabet, e.g. \"r: a, b; l: c\"");
  check->add_option("--relation", check_args.relation, relations)->required();
  check->add_option("--lhs", check_args.lhs, "Process name or inline term")
      ->required();
  check->add_option("--rhs", check_args.rhs, "Process name or inline term")
      ->required();
  check->add_flag("--json", check_args.json, "Emit JSON");

  ProveArgs prove_args;
  CLI::App* prove = app.add_subcommand(
      "prove", "Derive an equational or inequational proof between two terms");
  prove->add_option("--file", prove_args.file,
                    "Process file: an alphabet block plus named definitions");
  prove->add_option("--alphabet", prove_args.alphabet,
                    "Inline alphabet, e.g. \"r: a, b; l: c\"");
  prove->add_option("--relation", prove_args.relation,
                    "Axiomatized relation to prove");
  prove->add_option("--axioms", prove_args.axioms,
                    "Built-in axiom system to prove in");
  prove->add_option("--lhs", prove_args.lhs, "Process name or inline term")
      ->required();
  prove->add_option("--rhs", prove_args.rhs, "Process name or inline term")
      ->required();
  prove->add_option("--proof-out", prove_args.proof_out,
                    "Write the proof JSON to this path");
  prove->add_flag("--json", prove_args.json, "Print the proof as JSON");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "Exhaustively validate a property inside a depth/width bound");
  sweep->require_subcommand(1);
  SweepArgs sweep_args;
  auto add_sweep_options = [&sweep_args](CLI::App* cmd) {
    cmd->add_option("--file", sweep_args.file,
                    "Process file supplying the alphabet");
    cmd->add_option("--alphabet", sweep_args.alphabet,
                    "Inline alphabet, e.g. \"r: a, b; l: c\"");
    cmd->add_option("--depth", sweep_args.depth, "Longest action chain")
        ->capture_default_str();
    cmd->add_option("--width", sweep_args.width, "Most summands per node")
        ->capture_default_str();
    cmd->add_flag("--json", sweep_args.json, "Emit the report as JSON");
  };
  CLI::App* sweep_soundness = sweep->add_subcommand(
      "soundness", "Every matching axiom instance satisfies the target");
  add_sweep_options(sweep_soundness);
  sweep_soundness->add_option("--axioms", sweep_args.axioms,
                              "Built-in set name or axiom file");
  CLI::App* sweep_completeness = sweep->add_subcommand(
      "completeness", "Proof existence matches the semantic verdict");
  add_sweep_options(sweep_completeness);
  sweep_completeness->add_option("--relation", sweep_args.relation,
                                 "Axiomatized relation to sweep");
  CLI::App* sweep_coarsest = sweep->add_subcommand(
      "coarsest",
      "The conformance precongruence is the coarsest one inside conf_sim");
  add_sweep_options(sweep_coarsest);
  CLI::App* sweep_hierarchy = sweep->add_subcommand(
      "hierarchy", "Readiness preorders are converses and refine conformance");
  add_sweep_options(sweep_hierarchy);
  CLI::App* sweep_degeneration = sweep->add_subcommand(
      "degeneration",
      "cc similarity degenerates classically on single-polarity alphabets");
  add_sweep_options(sweep_degeneration);

  WitnessArgs witness_args;
  CLI::App* witness = app.add_subcommand(
      "witness", "Check one member of the duplication witness family");
  witness->add_option("--n", witness_args.n, "Family index (nonnegative)")
      ->required();
  witness->add_option("--alphabet", witness_args.alphabet,
                      "Inline alphabet with covariant and bivariant actions")
      ->required();
  witness->add_flag("--json", witness_args.json, "Emit the report as JSON");

  EnumerateArgs enumerate_args;
  CLI::App* enumerate = app.add_subcommand(
      "enumerate", "List every term inside a depth/width bound");
  enumerate->add_option("--file", enumerate_args.file,
                        "Process file supplying the alphabet");
  enumerate->add_option("--alphabet", enumerate_args.alphabet,
                        "Inline alphabet, e.g. \"r: a, b\"");
  enumerate->add_option("--depth", enumerate_args.depth, "Longest action chain")
      ->capture_default_str();
  enumerate->add_option("--width", enumerate_args.width,
                        "Most summands per node")
      ->capture_default_str();
  enumerate->add_flag("--json", enumerate_args.json, "Emit JSON");

  PrintArgs print_args;
  CLI::App* print = app.add_subcommand(
      "print", "Parse and print terms or a process file in canonical form");
  print->add_option("--file", print_args.file,
                    "Process file: an alphabet block plus named definitions");
  print->add_option("--alphabet", print_args.alphabet,
                    "Inline alphabet, e.g. \"r: a, b\"");
  print->add_option("items", print_args.items,
                    "Process names or inline terms");
  print->add_flag("--json", print_args.json, "Emit JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& help) {
    return app.exit(help);
  } catch (const CLI::CallForVersion& version) {
    return app.exit(version);
  } catch (const CLI::ParseError& error) {
    app.exit(error);
    return 2;
  }

  try {
    if (check->parsed()) return run_check(check_args);
    if (prove->parsed()) return run_prove(prove_args);
    if (sweep->parsed()) {
      if (sweep_soundness->parsed()) return run_sweep_soundness(sweep_args);
      if (sweep_completeness->parsed())
        return run_sweep_completeness(sweep_args);
      if (sweep_coarsest->parsed()) return run_sweep_coarsest(sweep_args);
      if (sweep_hierarchy->parsed()) return run_sweep_hierarchy(sweep_args);
      if (sweep_degeneration->parsed())
        return run_sweep_degeneration(sweep_args);
    }
    if (witness->parsed()) return run_witness(witness_args);
    if (enumerate->parsed()) return run_enumerate(enumerate_args);
    if (print->parsed()) return run_print(print_args);
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << '\n';
    return 2;
  }
  return 2;
}
