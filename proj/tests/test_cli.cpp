#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "isq/cli.hpp"

using namespace isq;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(Cli, RunExamples) {
  auto r = call({"run", "out.set:T ; !", "--inputs", ""});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "TERMINATED out=T\n");
  r = call({"run", "#0", "--inputs", ""});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "DEADLOCK\n");
  r = call({"run", "in:2.get ; !", "--inputs", "T"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "DIVERGENT reason=unserved focus in:2\n");
  r = call({"run", "aux:1.set:T ; -in:1.get ; out.set:T ; !", "--inputs", "F"});
  EXPECT_EQ(r.out, "TERMINATED out=T\naux:1=T\n");
}

TEST(Cli, RunJson) {
  auto r = call({"run", "aux:1.set:T ; out.set:T ; !", "--format", "json"});
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["outcome"], "TERMINATED");
  EXPECT_EQ(j["out"], true);
  EXPECT_EQ(j["registers"]["aux:1"], true);
  EXPECT_EQ(j["steps"], 3);
  j = nlohmann::json::parse(call({"run", "#0", "--format", "json"}).out);
  EXPECT_EQ(j["outcome"], "DEADLOCK");
  EXPECT_TRUE(j["out"].is_null());
}

TEST(Cli, MatchesLibrary) {
  const std::string x = "+in:1.get ; #2 ; out.set:F ; !";
  EXPECT_EQ(call({"parse", "+in:1.get;#2;out.set:F;!"}).out, render(parse(x)) + "\n");
  EXPECT_EQ(call({"extract", x}).out, to_string(extract(parse(x))) + "\n");
  EXPECT_EQ(call({"extract-compact", x}).out, to_string(extract_compact(parse(x))) + "\n");
  EXPECT_EQ(call({"truthtable", x, "--n", "1"}).out, truth_table(parse(x), 1, false).render() + "\n");
  EXPECT_EQ(call({"elim-setfalse", x}).out, render(eliminate_output_false(parse(x))) + "\n");
  EXPECT_EQ(call({"collapse-jumps", "#1 ; #2 ; ! ; !"}).out, "#3 ; #2 ; ! ; !\n");
  EXPECT_EQ(call({"behav-normalize", "+out.set:T ; !"}).out, "out.set:T ; !\n");
  // A sequence starting with '-' goes after "--".
  EXPECT_EQ(call({"normalize-set-tests", "--", "-aux:1.set:T ; ! ; out.set:T ; !"}).out,
            "+aux:1.set:T ; #2 ; ! ; out.set:T ; !\n");
  EXPECT_EQ(call({"normalize-set-tests", "-aux:1.set:T ; ! ; out.set:T ; !"}).code, 2);
  EXPECT_EQ(call({"to-split", "aux:1.set:T ; +aux:1.get ; out.set:T ; !"}).out, "-split:1 ; ! ; +reply:1 ; out.set:T ; !\n");
  EXPECT_EQ(call({"run-split", "+split:1 ; ! ; out.set:T ; !"}).out, "TERMINATED out=T\n");
  EXPECT_EQ(call({"compile-formula", "(and v1 v2)"}).out, "+in:1.get ; #2 ; #3 ; +in:2.get ; +out.set:T ; !\n");
  EXPECT_EQ(call({"compile-cnf", "p cnf 1 1\n1 0\n"}).out, "+in:1.get ; #2 ; +out.set:F ; #2 ; ! ; +out.set:T ; !\n");
  EXPECT_EQ(call({"compile-cnf-jumpfree", "p cnf 1 1\n1 0\n"}).out, "+in:1.get ; +out.set:F ; ! ; +out.set:T ; !\n");
  EXPECT_EQ(call({"compile-circuit", "g1 = NOT in1 ; output g1"}).out,
            "+in:1.get ; #2 ; +aux:1.set:T ; +aux:1.get ; +out.set:T ; !\n");
  EXPECT_EQ(call({"satc-decode", "TTF"}).out, "p cnf 1 2\n1 0\n-1 0\n");
  EXPECT_EQ(call({"satc-encode", "p cnf 1 2\n1 0\n-1 0\n"}).out, "TTF\n");
  EXPECT_EQ(call({"satc-build", "0"}).out, "+out.set:T ; !\n");
  EXPECT_EQ(call({"reduce-plsis", "! ; out.set:T ; !"}).out.substr(0, 5), "(and ");
  EXPECT_NE(call({"reduce-plsis", "! ; out.set:T ; !"}).out.find("satisfiable=F"), std::string::npos);
  EXPECT_EQ(call({"search", "T"}).out, "out.set:T ; !\n");
  EXPECT_EQ(call({"search", "FFFFFFFT", "--max-length", "10", "--no-jumps", "--no-aux", "--no-out-set-false",
                  "--single-term"})
                .out,
            "NONE\n");
  EXPECT_NE(call({"classify", "aux:1.set:T ; !"}).out.find("ISbrna no"), std::string::npos);
}

TEST(Cli, SatcEval) {
  auto r = call({"satc-eval", "TTF"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "F\n");
}

TEST(Cli, Trace) {
  auto r = call({"elim-setfalse", "+in:1.get ; ! ; !", "--trace"});
  EXPECT_NE(r.out.find("guard-termination-flipped @2"), std::string::npos);
  EXPECT_NE(r.out.find("steps=2"), std::string::npos);
}

TEST(Cli, FileArgument) {
  const std::string path = ::testing::TempDir() + "isq_cli_seq.txt";
  {
    std::ofstream f(path);
    f << "+in:1.get ;\nout.set:T ;\n!\n";
  }
  EXPECT_EQ(call({"run", "@" + path, "--inputs", "T"}).out, "TERMINATED out=T\n");
  EXPECT_EQ(call({"run", "@/nonexistent/isq"}).code, 1);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(call({}).code, 2);
  EXPECT_EQ(call({"frobnicate"}).code, 2);
  EXPECT_EQ(call({"run"}).code, 2);
  EXPECT_EQ(call({"run", "!", "--format", "xml"}).code, 2);
  auto r = call({"run", "out.set:Q"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
  EXPECT_EQ(call({"run", "split:1 ; !"}).code, 1);
  EXPECT_EQ(call({"run", "!", "--inputs", "X"}).code, 1);
  EXPECT_EQ(call({"--help"}).code, 0);
}

TEST(Cli, Binary) {
  std::string cmd = std::string(ISQ_CLI_PATH) + " satc-eval TTF";
  FILE* p = popen(cmd.c_str(), "r");
  ASSERT_NE(p, nullptr);
  char buf[64] = {};
  std::string got;
  while (fgets(buf, sizeof buf, p)) got += buf;
  EXPECT_EQ(pclose(p), 0);
  EXPECT_EQ(got, "F\n");
  FILE* q = popen((std::string(ISQ_CLI_PATH) + " nope 2>/dev/null").c_str(), "r");
  ASSERT_NE(q, nullptr);
  while (fgets(buf, sizeof buf, q)) {
  }
  int status = pclose(q);
  EXPECT_EQ(WEXITSTATUS(status), 2);
}
