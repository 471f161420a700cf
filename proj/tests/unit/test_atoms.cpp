#include "cvxc/atoms.hpp"
#include "cvxc/errors.hpp"
#include "cvxc/obligations.hpp"
#include "cvxc/parser.hpp"

#include "fixtures.hpp"

#include <doctest.h>

using namespace cvxc;

namespace {

const char* kNoSolution = R"(
declare-atom mysqrt [concave] (x : R)+ : sqrt x
  conditions (h : 0 ≤ x)
  implementationVars (t : R)
  implementationObjective t
  implementationConstraints (c : rotatedSoCone 0.5 x ![t])
end
)";

const char* kNonAffineImpl = R"(
declare-atom myexp [convex] (x : R)+ : exp x
  implementationVars (t : R)
  implementationObjective t
  implementationConstraints (c : posOrthCone (t - exp x))
  solution (t := exp x)
end
)";

}  // namespace

TEST_CASE("built-in atoms") {
  const AtomRegistry& reg = default_registry();
  const auto sqrt = reg.find("sqrt");
  REQUIRE(sqrt);
  CHECK(sqrt->curvature == Curvature::Concave);
  CHECK(sqrt->args[0].mono == Monotonicity::Increasing);
  CHECK(sqrt->vconds.size() == 1);
  CHECK(reg.find("exp")->curvature == Curvature::Convex);
  CHECK(reg.find("logdet")->impl_vars.size() == 2);
  CHECK(reg.find("le")->is_predicate());
  CHECK_FALSE(reg.find("nonexistent"));
  CHECK(reg.candidates("mul").size() >= 2);
}

TEST_CASE("atom declarations parse") {
  const auto decls = parse_atom_decls(read_fixture("broken_sqrt.atoms"));
  REQUIRE(decls.size() == 1);
  CHECK(decls[0].name == "sqrt_broken");
  CHECK(decls[0].head() == "sqrt");
  CHECK(print_expr(decls[0].impl_constraints[0].body) == "posOrthCone (x - t)");
}

TEST_CASE("registration rejects duplicates and malformed implementations") {
  AtomRegistry reg = builtin_registry();
  auto decls = parse_atom_decls(builtin_atom_source());
  CHECK_THROWS_AS(reg.register_atom(decls.front()), DuplicateAtom);
  CHECK_THROWS_AS(reg.register_atom(parse_atom_decls(kNoSolution).front()), MalformedGraphImplementation);
  CHECK_THROWS_AS(reg.register_atom(parse_atom_decls(kNonAffineImpl).front()), MalformedGraphImplementation);
}

TEST_CASE("dimension matching") {
  const auto logdet = default_registry().find("logdet");
  const auto dims = match_shapes(*logdet, {Shape::matrix(3, 3)});
  REQUIRE(dims);
  CHECK(dims->at("n") == 3);
  CHECK_FALSE(match_shapes(*logdet, {Shape::scalar()}));
}

TEST_CASE("every built-in atom meets its obligations (reduced sample)") {
  SampleConfig cfg;
  cfg.samples = 300;
  for (const auto& d : default_registry().atoms()) {
    ObligationTolerances tol;
    if (d->name == "logdet") tol.tol = 1e-5;
    const ObligationReport r = check_atom_obligations(*d, cfg, tol);
    INFO(format_obligation_report(r));
    CHECK(r.pass());
  }
}

TEST_CASE("broken sqrt fails optimality with a replayable witness") {
  const AtomDecl d = parse_atom_decls(read_fixture("broken_sqrt.atoms")).front();
  SampleConfig cfg;
  cfg.samples = 300;
  const ObligationReport r = check_atom_obligations(d, cfg);
  CHECK_FALSE(r.pass());
  CHECK(r[Obligation::SolutionCorrectness].pass);
  const ObligationResult& opt = r[Obligation::Optimality];
  REQUIRE_FALSE(opt.pass);
  REQUIRE(opt.witness);
  const double replay = replay_witness(d, Obligation::Optimality, *opt.witness);
  CHECK(replay == opt.witness->violation);
  CHECK(replay > 1e-7);
}

TEST_CASE("obligation checks are deterministic") {
  const auto d = default_registry().find("exp");
  SampleConfig cfg;
  cfg.samples = 100;
  cfg.seed = 3;
  CHECK(format_obligation_report(check_atom_obligations(*d, cfg)) ==
        format_obligation_report(check_atom_obligations(*d, cfg)));
}

TEST_CASE("report format") {
  SampleConfig cfg;
  cfg.samples = 50;
  const std::string text = format_obligation_report(check_atom_obligations(*default_registry().find("sqrt"), cfg));
  CHECK(text.find("sqrt solution-correctness pass samples=50") == 0);
  CHECK(text.find("sqrt condition-elimination pass") != std::string::npos);
}
