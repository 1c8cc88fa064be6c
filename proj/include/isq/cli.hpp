#pragma once

// Command-line front end. dispatch() takes the arguments after the program
// name and writes to the given streams, so tests can drive it in-process.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "isq/compilers.hpp"
#include "isq/instr.hpp"
#include "isq/lab.hpp"
#include "isq/satc.hpp"
#include "isq/services.hpp"
#include "isq/splitting.hpp"
#include "isq/threads.hpp"
#include "isq/transforms.hpp"

namespace isq::cli {

// "@path" reads the file, anything else is taken literally.
inline std::string resolve_argument(const std::string& arg) {
  if (arg.empty() || arg[0] != '@') return arg;
  std::ifstream in(arg.substr(1));
  if (!in) throw Error("cannot read " + arg.substr(1));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline char bit_char(bool b) { return b ? 'T' : 'F'; }

inline std::string outcome_name(const RunOutcome& r) {
  if (r.terminated()) return "TERMINATED";
  if (r.deadlocked()) return "DEADLOCK";
  return "DIVERGENT";
}

inline std::string render_outcome_text(const RunOutcome& r) {
  if (r.deadlocked()) return "DEADLOCK\n";
  if (auto* d = std::get_if<Divergent>(&r.result)) return "DIVERGENT reason=" + d->reason + "\n";
  const auto& regs = r.registers();
  std::string s = std::string("TERMINATED out=") + bit_char(regs.out) + "\n";
  for (const auto& [i, v] : regs.aux) s += "aux:" + std::to_string(i) + "=" + bit_char(v) + "\n";
  return s;
}

inline nlohmann::json outcome_json(const RunOutcome& r) {
  nlohmann::json j;
  j["outcome"] = outcome_name(r);
  j["out"] = r.terminated() ? nlohmann::json(r.registers().out) : nlohmann::json(nullptr);
  j["registers"] = nlohmann::json::object();
  if (r.terminated())
    for (const auto& [i, v] : r.registers().aux) j["registers"]["aux:" + std::to_string(i)] = v;
  if (auto* d = std::get_if<Divergent>(&r.result)) j["reason"] = d->reason;
  j["steps"] = r.steps;
  return j;
}

inline std::string render_profile(const ClassProfile& p) {
  std::ostringstream o;
  auto yn = [](bool b) { return b ? "yes" : "no"; };
  o << "ISbr " << yn(p.is_isbr) << "\n"
    << "ISbrna " << yn(p.is_isbrna) << "\n"
    << "SISbr " << yn(p.is_sisbr) << "\n"
    << "max_jump " << p.max_jump << "\n"
    << "max_aux " << p.max_aux_index << "\n"
    << "max_input " << p.max_input_index << "\n"
    << "max_param " << p.max_param_index << "\n"
    << "terminations " << p.term_count << "\n"
    << "out_set_false " << yn(p.has_out_set_false) << "\n";
  return o.str();
}

inline int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"isq: instruction sequences over Boolean registers"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::string arg, inputs, format = "text";
  unsigned arity = 0;
  std::size_t max_length = 8;
  unsigned max_jump = 3;
  bool split = false, trace = false;
  bool no_jumps = false, no_aux = false, no_out_set_false = false, single_term = false;

  auto add_arg = [&](CLI::App* c, const char* what) { c->add_option("input", arg, what)->required(); };
  auto add_inputs = [&](CLI::App* c) { c->add_option("--inputs", inputs, "input bits, e.g. TFT or 101"); };
  auto add_format = [&](CLI::App* c) {
    c->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
  };
  auto add_trace = [&](CLI::App* c) { c->add_flag("--trace", trace, "print the applied rewrite steps"); };

  auto* c_parse = app.add_subcommand("parse", "parse and print in canonical form");
  add_arg(c_parse, "sequence or @file");
  auto* c_run = app.add_subcommand("run", "execute a sequence on inputs");
  add_arg(c_run, "sequence or @file");
  add_inputs(c_run);
  add_format(c_run);
  add_trace(c_run);
  auto* c_run_split = app.add_subcommand("run-split", "execute a splitting sequence on inputs");
  add_arg(c_run_split, "sequence or @file");
  add_inputs(c_run_split);
  add_format(c_run_split);
  add_trace(c_run_split);
  auto* c_extract = app.add_subcommand("extract", "thread of a sequence");
  add_arg(c_extract, "sequence or @file");
  auto* c_extract_compact = app.add_subcommand("extract-compact", "linear-size thread term of a sequence");
  add_arg(c_extract_compact, "sequence or @file");
  auto* c_table = app.add_subcommand("truthtable", "tabulate the computed function");
  add_arg(c_table, "sequence or @file");
  c_table->add_option("--n", arity, "arity")->required();
  c_table->add_flag("--split", split, "use the splitting semantics");

  auto* c_cnf = app.add_subcommand("compile-cnf", "compile a DIMACS CNF");
  add_arg(c_cnf, "DIMACS text or @file");
  auto* c_cnf_jf = app.add_subcommand("compile-cnf-jumpfree", "compile a DIMACS CNF without jumps");
  add_arg(c_cnf_jf, "DIMACS text or @file");
  auto* c_formula = app.add_subcommand("compile-formula", "compile a basic Boolean formula");
  add_arg(c_formula, "formula or @file");
  auto* c_circuit = app.add_subcommand("compile-circuit", "compile a gate netlist");
  add_arg(c_circuit, "netlist or @file");

  struct Rewrite {
    const char* name;
    const char* help;
    RewriteReport (*fn)(const InstructionSequence&);
  };
  const Rewrite rewrites[] = {
      {"elim-setfalse", "remove out.set:F", eliminate_output_false_report},
      {"normalize-set-tests", "remove -aux.set:T and +aux.set:F", normalize_set_tests_report},
      {"to-split", "replace auxiliary registers by split/reply", to_splitting_report},
      {"collapse-jumps", "collapse jump chains", collapse_jump_chains_report},
      {"behav-normalize", "apply the register identities", behavioural_normalize_report},
  };
  std::vector<std::pair<CLI::App*, const Rewrite*>> rewrite_cmds;
  for (const auto& r : rewrites) {
    auto* c = app.add_subcommand(r.name, r.help);
    add_arg(c, "sequence or @file");
    add_trace(c);
    rewrite_cmds.emplace_back(c, &r);
  }

  auto* c_classify = app.add_subcommand("classify", "syntactic class membership");
  add_arg(c_classify, "sequence or @file");
  auto* c_satc_eval = app.add_subcommand("satc-eval", "evaluate 3SATC on bits");
  c_satc_eval->add_option("input", arg, "bits")->required()->allow_extra_args(false);
  auto* c_satc_decode = app.add_subcommand("satc-decode", "bits to DIMACS");
  c_satc_decode->add_option("input", arg, "bits")->required();
  auto* c_satc_encode = app.add_subcommand("satc-encode", "DIMACS to bits");
  add_arg(c_satc_encode, "DIMACS text or @file");
  auto* c_satc_build = app.add_subcommand("satc-build", "splitting sequence for 3SATC_n");
  c_satc_build->add_option("n", arity, "number of bits")->required();
  auto* c_reduce = app.add_subcommand("reduce-plsis", "reachability formula of a splitting sequence");
  add_arg(c_reduce, "sequence or @file");
  add_inputs(c_reduce);
  auto* c_search = app.add_subcommand("search", "shortest sequence computing a truth table");
  c_search->add_option("input", arg, "truth table, e.g. FFFT")->required();
  c_search->add_option("--max-length", max_length, "longest length tried");
  c_search->add_option("--max-jump", max_jump, "largest jump tried");
  c_search->add_flag("--split", split, "search splitting sequences");
  c_search->add_flag("--no-jumps", no_jumps, "no jump instructions");
  c_search->add_flag("--no-aux", no_aux, "no auxiliary registers");
  c_search->add_flag("--no-out-set-false", no_out_set_false, "no out.set:F");
  c_search->add_flag("--single-term", single_term, "at most one termination instruction");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    const std::string text = resolve_argument(arg);
    auto seq = [&] { return parse(text); };
    auto emit_run = [&](const RunOutcome& r) {
      if (format == "json")
        out << outcome_json(r).dump() << "\n";
      else {
        out << render_outcome_text(r);
        if (trace) out << "steps=" << r.steps << "\n";
      }
    };

    if (c_parse->parsed()) {
      out << render(seq()) << "\n";
    } else if (c_run->parsed()) {
      emit_run(run(seq(), parse_bits(inputs)));
    } else if (c_run_split->parsed()) {
      emit_run(run_splitting(seq(), parse_bits(inputs)));
    } else if (c_extract->parsed()) {
      out << to_string(extract(seq())) << "\n";
    } else if (c_extract_compact->parsed()) {
      out << to_string(extract_compact(seq())) << "\n";
    } else if (c_table->parsed()) {
      out << truth_table(seq(), arity, split).render() << "\n";
    } else if (c_cnf->parsed()) {
      out << render(compile_cnf(parse_dimacs(text))) << "\n";
    } else if (c_cnf_jf->parsed()) {
      out << render(compile_cnf_jumpfree(parse_dimacs(text))) << "\n";
    } else if (c_formula->parsed()) {
      out << render(compile_formula(parse_formula(text))) << "\n";
    } else if (c_circuit->parsed()) {
      out << render(compile_circuit(parse_netlist(text))) << "\n";
    } else if (c_classify->parsed()) {
      out << render_profile(classify(seq()));
    } else if (c_satc_eval->parsed()) {
      out << bit_char(satc_eval(parse_bits(text))) << "\n";
    } else if (c_satc_decode->parsed()) {
      out << render_dimacs(decode_to_cnf(parse_bits(text)));
    } else if (c_satc_encode->parsed()) {
      out << render_bits(encode_cnf(parse_dimacs(text))) << "\n";
    } else if (c_satc_build->parsed()) {
      out << render(build_satc_splitter(arity)) << "\n";
    } else if (c_reduce->parsed()) {
      auto f = reachability_formula(seq(), parse_bits(inputs));
      out << render_formula(f) << "\n" << "satisfiable=" << bit_char(formula_satisfiable(f)) << "\n";
    } else if (c_search->parsed()) {
      SearchSpec s;
      s.target = TruthTable::parse(text);
      s.max_length = max_length;
      s.max_jump = max_jump;
      s.allow_jumps = !no_jumps;
      s.allow_aux = !no_aux;
      s.allow_out_set_false = !no_out_set_false;
      s.allow_multiple_term = !single_term;
      s.splitting_mode = split;
      auto r = shortest_sequence_search(s);
      out << (r ? render(*r) : std::string("NONE")) << "\n";
    } else {
      for (const auto& [c, r] : rewrite_cmds) {
        if (!c->parsed()) continue;
        auto rep = r->fn(seq());
        out << render(rep.output) << "\n";
        if (trace) out << render_trace(rep);
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace isq::cli
