#include <gtest/gtest.h>

#include "isq/compilers.hpp"
#include "isq/lab.hpp"
#include "support.hpp"

using namespace isq;

namespace {

const Cnf example_cnf{2, {{{1, false}, {2, true}}, {{2, false}}}};

std::size_t jump_count(const InstructionSequence& x) {
  return static_cast<std::size_t>(std::count_if(x.begin(), x.end(), [](const auto& u) { return u.kind == InstrKind::Jump; }));
}

}  // namespace

TEST(EvalFormula, Examples) {
  EXPECT_TRUE(eval_formula(BoolFormula::var(1), {true}));
  auto contra = BoolFormula::land(BoolFormula::var(1), BoolFormula::lnot(BoolFormula::var(1)));
  EXPECT_FALSE(eval_formula(contra, {true}));
  EXPECT_FALSE(eval_formula(contra, {false}));
  EXPECT_TRUE(eval_formula(Cnf{3, {}}, {false, true, false}));
  EXPECT_THROW(eval_formula(BoolFormula::var(3), {true}), Error);
}

TEST(CompileCnf, Examples) {
  auto x = compile_cnf(example_cnf);
  EXPECT_EQ(render(x),
            "+in:1.get ; #2 ; -in:2.get ; #2 ; +out.set:F ; #2 ; ! ; +in:2.get ; #2 ; +out.set:F ; #2 ; ! ; "
            "+out.set:T ; !");
  EXPECT_EQ(psize(x), 14u);
  EXPECT_EQ(render(compile_cnf(Cnf{0, {}})), "+out.set:T ; !");
  EXPECT_THROW(compile_cnf(Cnf{1, {{}}}), Error);
}

TEST(CompileCnfJumpfree, Examples) {
  EXPECT_EQ(render(compile_cnf_jumpfree(Cnf{1, {{{1, false}}}})), "+in:1.get ; +out.set:F ; ! ; +out.set:T ; !");
  auto x = compile_cnf_jumpfree(example_cnf);
  EXPECT_EQ(jump_count(x), 0u);
  EXPECT_EQ(truth_table(x, 2, false), gen::oracle_table(2, [](const auto& b) { return eval_formula(example_cnf, b); }));
  EXPECT_THROW(compile_cnf_jumpfree(Cnf{1, {{}}}), Error);
}

TEST(CompileFormula, Examples) {
  auto v1 = BoolFormula::var(1), v2 = BoolFormula::var(2);
  EXPECT_EQ(render(compile_formula(BoolFormula::lnot(v1))), "+in:1.get ; #2 ; +out.set:T ; !");
  EXPECT_EQ(render(compile_formula(BoolFormula::lor(v1, v2))), "+in:1.get ; #2 ; +in:2.get ; +out.set:T ; !");
  EXPECT_EQ(render(compile_formula(BoolFormula::land(v1, v2))), "+in:1.get ; #2 ; #3 ; +in:2.get ; +out.set:T ; !");
}

TEST(CompileCircuit, Examples) {
  Circuit not1{1, {{GateKind::Not, GateInput::input(1), GateInput::input(1)}}, 1};
  EXPECT_EQ(render(compile_circuit(not1)), "+in:1.get ; #2 ; +aux:1.set:T ; +aux:1.get ; +out.set:T ; !");
  Circuit and12{2, {{GateKind::And, GateInput::input(1), GateInput::input(2)}}, 1};
  EXPECT_EQ(render(compile_circuit(and12)),
            "+in:1.get ; #2 ; #3 ; +in:2.get ; +aux:1.set:T ; +aux:1.get ; +out.set:T ; !");
  Circuit shared{1,
                 {{GateKind::Not, GateInput::input(1), GateInput::input(1)},
                  {GateKind::Or, GateInput::gate(1), GateInput::gate(1)}},
                 2};
  auto x = compile_circuit(shared);
  EXPECT_EQ(psize(x), 3u + 4u + 3u);
  EXPECT_EQ(truth_table(x, 1, false), TruthTable::parse("TF"));
}

TEST(CompileCircuit, Errors) {
  Circuit cyc{1, {{GateKind::Not, GateInput::gate(2), {}}, {GateKind::Not, GateInput::gate(1), {}}}, 1};
  EXPECT_THROW(compile_circuit(cyc), Error);
  Circuit dangling{1, {{GateKind::Not, GateInput::gate(7), {}}}, 1};
  EXPECT_THROW(compile_circuit(dangling), Error);
}

TEST(TextFormats, RoundTrips) {
  EXPECT_EQ(parse_dimacs(render_dimacs(example_cnf)), example_cnf);
  EXPECT_EQ(parse_dimacs("c comment\np cnf 2 2\n1 -2 0\n2 0\n"), example_cnf);
  EXPECT_THROW(parse_dimacs("1 0\n"), ParseError);
  EXPECT_THROW(parse_dimacs("p cnf 1 1\n2 0\n"), ParseError);
  EXPECT_THROW(parse_dimacs("p cnf 1 2\n1 0\n"), ParseError);
  auto f = parse_formula("(and v1 (or (not v2) v3))");
  EXPECT_EQ(render_formula(f), "(and v1 (or (not v2) v3))");
  EXPECT_EQ(parse_formula(render_formula(f)), f);
  EXPECT_THROW(parse_formula("(and v1"), ParseError);
  auto c = parse_netlist("g1 = NOT in1 ; g2 = AND g1 in2 ; output g2");
  EXPECT_EQ(c.num_inputs, 2u);
  EXPECT_EQ(parse_netlist(render_netlist(c)), c);
  EXPECT_THROW(parse_netlist("g1 = XOR in1 in2 ; output g1"), ParseError);
  EXPECT_THROW(parse_netlist("g1 = NOT g1 ; output g1"), Error);
}

TEST(CompilerProperty, SoundnessAndSizeLaws) {
  gen::Rng rng(61);
  for (int i = 0; i < 300; ++i) {
    const unsigned n = gen::uniform(rng, 1, 6);
    auto cnf = gen::random_cnf(rng, n, 8);
    auto want = gen::oracle_table(n, [&](const auto& b) { return eval_formula(cnf, b); });
    auto x = compile_cnf(cnf);
    ASSERT_EQ(truth_table(x, n, false), want);
    ASSERT_TRUE(check_computes(x, want));
    ASSERT_TRUE(classify(x).is_isbrna);
    std::size_t law = 2;
    for (const auto& c : cnf.clauses) law += 2 * c.size() + 3;
    ASSERT_EQ(psize(x), law);
    for (const auto& u : x) {
      if (u.kind == InstrKind::Jump) ASSERT_EQ(u.jump, 2u);
      if (u.has_basic())
        ASSERT_TRUE(u.basic.focus.kind == FocusKind::Out ? u.basic.method != Method::Get : u.basic.method == Method::Get);
    }
    auto y = compile_cnf_jumpfree(cnf);
    ASSERT_EQ(jump_count(y), 0u);
    ASSERT_EQ(truth_table(y, n, false), want);

    auto phi = gen::random_formula(rng, n, gen::uniform(rng, 0, 10));
    auto z = compile_formula(phi);
    ASSERT_EQ(truth_table(z, n, false), gen::oracle_table(n, [&](const auto& b) { return eval_formula(phi, b); }));
    ASSERT_EQ(psize(z), formula_length(phi) + 2);
    ASSERT_FALSE(classify(z).has_out_set_false);

    auto circ = gen::random_circuit(rng, n, gen::uniform(rng, 1, 8));
    auto w = compile_circuit(circ);
    ASSERT_EQ(truth_table(w, n, false), gen::oracle_table(n, [&](const auto& b) { return eval_formula(circ, b); }));
    std::size_t csize = 3;
    for (const auto& g : circ.gates) csize += g.kind == GateKind::Not ? 3 : g.kind == GateKind::Or ? 4 : 5;
    ASSERT_EQ(psize(w), csize);
    ASSERT_FALSE(classify(w).has_out_set_false);
  }
}
