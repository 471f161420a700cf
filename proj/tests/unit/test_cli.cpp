#include "fixtures.hpp"

#include <doctest.h>
#include <json.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

const std::string kBin = std::string(CVXC_BIN_DIR);

Run cvxc(const std::string& args) {
  const fs::path err_file = fs::temp_directory_path() / ("cvxc-cli-test-" + std::to_string(::getpid()) + ".err");
  const std::string cmd = kBin + "/cvxc " + args + " 2>" + err_file.string();
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(err_file);
  r.err.assign(std::istreambuf_iterator<char>(in), {});
  fs::remove(err_file);
  return r;
}

std::string fx(const std::string& name) { return "'" + fixture_path(name) + "'"; }

std::string stub(const std::string& fixture, const std::string& extra = "") {
  return "--solver \"" + kBin + "/cvxc-stub-solver --problem " + fixture_path(fixture) + " " + extra +
         " {input} {output}\"";
}

}  // namespace

TEST_CASE("check") {
  Run r = cvxc("check " + fx("so1.cvx"));
  CHECK(r.code == 0);
  CHECK(r.out == "ok\n");
  CHECK(r.err.empty());

  r = cvxc("check --explain " + fx("so1.cvx"));
  CHECK(r.out.find("obj.1  sqrt (concave)  role concave  vars t.0  [0 ≤ x - y by c3]") != std::string::npos);

  r = cvxc("check " + fx("log_unguarded.cvx"));
  CHECK(r.code == 2);
  CHECK(r.err.find("UndischargedCondition at obj.1") != std::string::npos);
  CHECK(r.out.empty());

  const fs::path empty = fs::temp_directory_path() / "cvxc-cli-empty.cvx";
  std::ofstream(empty).close();
  CHECK(cvxc("check " + empty.string()).code == 2);
  fs::remove(empty);
}

TEST_CASE("usage errors") {
  CHECK(cvxc("").code == 1);
  CHECK(cvxc("check /nonexistent/file.cvx").code == 1);
  CHECK(cvxc("check --bogus " + fx("so1.cvx")).code == 1);
  CHECK(cvxc("--format xml check " + fx("so1.cvx")).code == 1);
  CHECK(cvxc("verify").code == 1);
  CHECK(cvxc("check --param a " + fx("so1.cvx")).code == 1);
  CHECK(cvxc("--help").code == 0);
}

TEST_CASE("canon") {
  Run r = cvxc("canon " + fx("so1.cvx"));
  CHECK(r.code == 0);
  CHECK(r.out == read_fixture("so1_reduced.cvx") + "\n");

  const fs::path out = fs::temp_directory_path() / "cvxc-cli-so1.cbf";
  r = cvxc("canon --cbf " + out.string() + " " + fx("so1.cvx"));
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(out, std::ios::binary);
  CHECK(std::string(std::istreambuf_iterator<char>(in), {}) == read_fixture("so1.cbf"));
  fs::remove(out);

  r = cvxc("canon --explain " + fx("so1.cvx"));
  CHECK(r.out.find("eliminated c3 by obj") != std::string::npos);
  CHECK(r.out.find("provenance c4' <- obj.1") != std::string::npos);

  CHECK(cvxc("canon " + fx("corpus/scaled_exp.cvx")).code == 2);
  CHECK(cvxc("canon --param a=2 " + fx("corpus/scaled_exp.cvx")).code == 0);
}

TEST_CASE("verify") {
  Run r = cvxc("verify --samples 200 " + fx("so1.cvx"));
  CHECK(r.code == 0);
  CHECK(r.out.find("verdict pass") != std::string::npos);
  CHECK(cvxc("verify --samples 200 " + fx("so1.cvx")).out == r.out);

  r = cvxc("verify --atoms sqrt --samples 200");
  CHECK(r.code == 0);
  int passes = 0;
  for (std::size_t p = r.out.find(" pass "); p != std::string::npos; p = r.out.find(" pass ", p + 1)) ++passes;
  CHECK(passes == 4);

  r = cvxc("--atom-file " + fx("broken_sqrt.atoms") + " verify --atoms sqrt_broken --samples 200");
  CHECK(r.code == 3);
  CHECK(r.out.find("sqrt_broken optimality FAIL") != std::string::npos);
  CHECK(cvxc("verify --atoms nosuchatom").code == 1);

  CHECK(cvxc("verify --samples 200 --user " + fx("user/exp_product.cvx") + " " + fx("user/exp_sum.cvx") + " " +
             fx("user/identity.maps"))
            .code == 0);
  CHECK(cvxc("verify --samples 200 --user " + fx("user/weighted_p.cvx") + " " + fx("user/weighted_q.cvx") + " " +
             fx("user/swapped.maps"))
            .code == 3);
  CHECK(cvxc("verify --samples 10 --max-attempts 200 " + fx("infeasible.cvx")).code == 4);
}

TEST_CASE("solve") {
  Run r = cvxc("solve " + fx("so1.cvx") + " " + stub("so1.cvx", "--grid 2001 --box x=-2:2 --box y=-6:0"));
  CHECK(r.code == 0);
  CHECK(r.out.find("status PRIMAL_AND_DUAL_FEASIBLE\nvalue 2.10") == 0);

  r = cvxc("solve " + fx("so1.cvx") + " --solver '/nonexistent/adapter {input} {output}'");
  CHECK(r.code == 5);
  CHECK(r.err.find("SolverNotFound") != std::string::npos);

  r = cvxc("solve " + fx("infeasible.cvx") + " " + stub("infeasible.cvx"));
  CHECK(r.code == 0);
  CHECK(r.out == "status INFEASIBLE\n");

  CHECK(cvxc("solve " + fx("log_unguarded.cvx") + " --solver true").code == 2);
}

TEST_CASE("structured output") {
  Run r = cvxc("--format structured check " + fx("so1.cvx"));
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["status"] == "ok");
  CHECK(j["trees"][0]["root"]["children"][0]["atom"] == "sqrt");

  r = cvxc("--format structured solve " + fx("so1.cvx") + " " + stub("so1.cvx", "--box x=-2:2 --box y=-6:0"));
  const auto s = nlohmann::json::parse(r.out);
  CHECK(s["status"] == "PRIMAL_AND_DUAL_FEASIBLE");
  CHECK(s["solution"]["x"].is_number());

  r = cvxc("--format structured verify --samples 100 " + fx("so1.cvx"));
  CHECK(nlohmann::json::parse(r.out)["verdict"] == "pass");
}
