#include "cvxc/canon.hpp"

#include "cvxc/affine.hpp"
#include "cvxc/errors.hpp"
#include "cvxc/eval.hpp"
#include "cvxc/functions.hpp"
#include "cvxc/parser.hpp"

#include <cmath>
#include <exception>
#include <functional>
#include <set>
#include <sstream>

namespace cvxc {

Role negate(Role r) {
  switch (r) {
    case Role::Convex:
      return Role::Concave;
    case Role::Concave:
      return Role::Convex;
    case Role::Affine:
      return Role::Affine;
  }
  return r;
}

std::string_view to_string(Role r) {
  switch (r) {
    case Role::Convex:
      return "convex";
    case Role::Concave:
      return "concave";
    case Role::Affine:
      return "affine";
  }
  return "?";
}

namespace {

// --- condition normal forms -----------------------------------------------

enum class Rel { Nonneg, Positive, Zero, Other };

struct Relation {
  Rel rel = Rel::Other;
  Expr body;  // the quantity compared with zero
};

Relation relation_of(const Expr& e) {
  if (e.is_apply("le") && e.args().size() == 2) return {Rel::Nonneg, e.arg(1) - e.arg(0)};
  if (e.is_apply("lt") && e.args().size() == 2) return {Rel::Positive, e.arg(1) - e.arg(0)};
  if (e.is_apply("eq") && e.args().size() == 2) return {Rel::Zero, e.arg(1) - e.arg(0)};
  if (e.is_apply("posOrthCone") && e.args().size() == 1) return {Rel::Nonneg, e.arg(0)};
  if (e.is_apply("zeroCone") && e.args().size() == 1) return {Rel::Zero, e.arg(0)};
  return {};
}

bool implies(Rel have, Rel want) {
  switch (want) {
    case Rel::Nonneg:
      return have == Rel::Nonneg || have == Rel::Positive;
    case Rel::Positive:
      return have == Rel::Positive;
    case Rel::Zero:
      return have == Rel::Zero;
    default:
      return false;
  }
}

/// Scales a numeric scalar form so its leading coefficient is +1 (or +-1
/// for inequalities, keeping the direction).
std::optional<std::pair<std::map<Coord, double>, double>> normalized(const LinearForm& f, bool keep_sign) {
  if (!f.is_numeric()) return std::nullopt;
  std::map<Coord, double> terms;
  for (const auto& [c, k] : f.terms) terms[c] = *numeric(k);
  double constant = *numeric(f.constant);
  if (terms.empty()) return std::make_pair(terms, constant);
  const double lead = terms.begin()->second;
  const double s = keep_sign ? 1.0 / std::abs(lead) : 1.0 / lead;
  for (auto& [c, k] : terms) k *= s;
  constant *= s;
  return std::make_pair(terms, constant);
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

bool same_normal_form(const Expr& a, const Expr& b, bool keep_sign, const AffineContext& ctx) {
  auto fa = affine_form(a, ctx);
  auto fb = affine_form(b, ctx);
  if (!fa || !fb || fa->entries.size() != fb->entries.size()) return false;
  for (std::size_t k = 0; k < fa->entries.size(); ++k) {
    auto na = normalized(fa->entries[k], keep_sign);
    auto nb = normalized(fb->entries[k], keep_sign);
    if (!na || !nb || na->first.size() != nb->first.size()) return false;
    for (auto ia = na->first.begin(), ib = nb->first.begin(); ia != na->first.end(); ++ia, ++ib)
      if (!(ia->first == ib->first) || !close(ia->second, ib->second)) return false;
    if (!close(na->second, nb->second)) return false;
  }
  return true;
}

/// True when constraint `have` implies condition `want` by affine
/// normalization or structural equality.
bool entails(const Expr& have, const Expr& want, const AffineContext& ctx) {
  if (have == want) return true;
  const Relation h = relation_of(have), w = relation_of(want);
  if (h.rel == Rel::Other || w.rel == Rel::Other || !implies(h.rel, w.rel)) return false;
  return same_normal_form(h.body, w.body, w.rel != Rel::Zero, ctx);
}

bool holds_exactly(const Expr& cond) {
  try {
    EvalOptions strict;
    strict.feas_tol = 0;
    return holds(cond, Assignment{}, strict);
  } catch (const Error&) {
    return false;
  }
}

// --- tree construction ---------------------------------------------------

class Builder {
 public:
  Builder(const TreeContext& ctx, std::string component)
      : ctx_(ctx), component_(std::move(component)), affine_(AffineContext::of(ctx.vars, ctx.params)) {
    param_ctx_ = AffineContext::of(ctx.params);
    param_ctx_.shapes = affine_.shapes;
  }

  TreeNode build(const Expr& e, Role role, const std::string& id) {
    TreeNode node;
    node.id = id;
    node.role = role;
    node.oexpr = e;
    if (affine_form(e, affine_)) {
      node.rexpr = e;
      return node;
    }
    if (role == Role::Affine)
      throw NotDcp(component_, id, "non-affine-leaf", "'" + print_expr(e) + "' must be affine here");
    if (!e.is_apply()) throw NotDcp(component_, id, "unmatched-atom", "'" + print_expr(e) + "'");

    std::vector<Shape> shapes;
    for (const auto& a : e.args()) {
      try {
        shapes.push_back(infer_shape(a, affine_.shapes));
      } catch (const Error& err) {
        throw NotDcp(component_, id, "unmatched-atom", err.what());
      }
    }

    bool curvature_only = false;
    std::optional<UndischargedCondition> undischarged;
    for (const auto& atom : ctx_.registry->candidates(e.name())) {
      auto dims = match_shapes(*atom, shapes);
      if (!dims) continue;
      Substitution formals;
      bool aux_ok = true;
      for (std::size_t i = 0; i < atom->args.size(); ++i) {
        formals[atom->args[i].name] = e.arg(i);
        if (atom->args[i].mono == Monotonicity::Auxiliary) {
          auto f = affine_form(e.arg(i), affine_);
          aux_ok = aux_ok && f && f->is_constant();
        }
      }
      if (!aux_ok) continue;

      std::vector<Discharge> discharges;
      bool bconds_ok = true;
      for (const auto& b : atom->bconds) {
        auto d = discharge_background(substitute(b.body, formals));
        if (!d) {
          bconds_ok = false;
          break;
        }
        discharges.push_back(*d);
      }
      if (!bconds_ok) continue;

      const bool curvature_ok = atom->curvature == Curvature::Affine ||
                                (atom->curvature == Curvature::Convex && role == Role::Convex) ||
                                (atom->curvature == Curvature::Concave && role == Role::Concave);
      if (!curvature_ok) {
        curvature_only = true;
        continue;
      }

      bool vconds_ok = true;
      for (const auto& v : atom->vconds) {
        const Expr cond = substitute(v.body, formals);
        auto d = discharge_variable(cond);
        if (!d) {
          if (!undischarged) undischarged.emplace(id, print_expr(cond));
          vconds_ok = false;
          break;
        }
        discharges.push_back(*d);
      }
      if (!vconds_ok) continue;

      node.atom = atom;
      node.dims = *dims;
      node.discharges = std::move(discharges);
      for (std::size_t i = 0; i < atom->args.size(); ++i) {
        const std::string cid = id + "." + std::to_string(i + 1);
        switch (atom->args[i].mono) {
          case Monotonicity::Increasing:
            node.children.push_back(build(e.arg(i), role, cid));
            break;
          case Monotonicity::Decreasing:
            node.children.push_back(build(e.arg(i), negate(role), cid));
            break;
          case Monotonicity::Neither:
            node.children.push_back(build(e.arg(i), Role::Affine, cid));
            break;
          case Monotonicity::Auxiliary: {
            TreeNode leaf;
            leaf.id = cid;
            leaf.role = Role::Affine;
            leaf.oexpr = e.arg(i);
            leaf.rexpr = e.arg(i);
            node.children.push_back(std::move(leaf));
            break;
          }
        }
      }
      return node;
    }
    if (undischarged) throw *undischarged;
    if (curvature_only)
      throw NotDcp(component_, id, "curvature-mismatch",
                   "'" + print_expr(e) + "' has the wrong curvature for role " + std::string(to_string(role)));
    throw NotDcp(component_, id, "unmatched-atom", "no atom matches '" + print_expr(e) + "'");
  }

 private:
  std::optional<Discharge> discharge_variable(const Expr& cond) {
    const std::string text = print_expr(cond);
    if (free_vars(cond).empty()) {
      std::set<std::string, std::less<>> params;
      collect_params(cond, params);
      if (params.empty()) {
        if (holds_exactly(cond)) return Discharge{text, "", false};
        return std::nullopt;
      }
    }
    for (const auto& c : ctx_.available)
      if (entails(c.body, cond, affine_)) return Discharge{text, c.name, false};
    return std::nullopt;
  }

  std::optional<Discharge> discharge_background(const Expr& cond) {
    const std::string text = print_expr(cond);
    if (is_closed(cond)) {
      if (holds_exactly(cond)) return Discharge{text, "", true};
      return std::nullopt;
    }
    for (const auto& c : ctx_.assumptions)
      if (entails(c.body, cond, param_ctx_)) return Discharge{text, c.name, true};
    return std::nullopt;
  }

  const TreeContext& ctx_;
  std::string component_;
  AffineContext affine_;
  AffineContext param_ctx_;
};

void preorder(TreeNode& n, const std::function<void(TreeNode&)>& f) {
  f(n);
  for (auto& c : n.children) preorder(c, f);
}

void preorder(const TreeNode& n, const std::function<void(const TreeNode&)>& f) {
  f(n);
  for (const auto& c : n.children) preorder(c, f);
}

Substitution node_substitution(const TreeNode& n, bool use_rexpr) {
  Substitution s;
  for (std::size_t i = 0; i < n.atom->args.size(); ++i)
    s[n.atom->args[i].name] = use_rexpr ? n.children[i].rexpr : n.children[i].oexpr;
  for (std::size_t j = 0; j < n.atom->impl_vars.size(); ++j) s[n.atom->impl_vars[j].name] = Expr::var(n.fresh[j]);
  return s;
}

void compute_rexpr(TreeNode& n) {
  if (n.is_leaf()) return;
  for (auto& c : n.children) compute_rexpr(c);
  n.rexpr = substitute(n.atom->impl_objective, node_substitution(n, true));
}

bool is_consumed_by(const std::string& name, const AtomTree& t) {
  bool found = false;
  preorder(t.root, [&](const TreeNode& n) {
    for (const auto& d : n.discharges)
      if (!d.background && d.by == name) found = true;
  });
  return found;
}

void check_conic(const Problem& q) {
  const AffineContext ctx = AffineContext::of(q.vars);
  if (!affine_form(q.objective, ctx))
    throw NonConicProblem("reduced objective is not affine: " + print_expr(q.objective));
  for (const auto& c : q.constraints) {
    if (!c.body.is_apply() || !cone_kind(c.body.name()))
      throw NonConicProblem("constraint " + c.name + " is not a cone constraint: " + print_expr(c.body));
    for (const auto& a : c.body.args())
      if (!affine_form(a, ctx))
        throw NonConicProblem("constraint " + c.name + " has a non-affine argument: " + print_expr(a));
  }
}

}  // namespace

AtomTree build_tree(const Expr& e, Role required, const std::string& component, const TreeContext& ctx) {
  if (!ctx.registry) throw Error("build_tree: no atom registry");
  Builder b(ctx, component);
  return {component, b.build(e, required, component)};
}

std::string check_roles(const AtomTree& t, const TreeContext& ctx) {
  const AffineContext actx = AffineContext::of(ctx.vars, ctx.params);
  std::string problem;
  preorder(t.root, [&](const TreeNode& n) {
    if (!problem.empty()) return;
    if (n.is_leaf()) {
      if (!affine_form(n.oexpr, actx)) problem = n.id + ": leaf is not affine";
      return;
    }
    const Curvature c = n.atom->curvature;
    if (c != Curvature::Affine && !((c == Curvature::Convex && n.role == Role::Convex) ||
                                    (c == Curvature::Concave && n.role == Role::Concave)))
      problem = n.id + ": role " + std::string(to_string(n.role)) + " but atom is " + std::string(to_string(c));
    for (std::size_t i = 0; i < n.children.size() && problem.empty(); ++i) {
      const TreeNode& ch = n.children[i];
      Role want = Role::Affine;
      switch (n.atom->args[i].mono) {
        case Monotonicity::Increasing:
          want = n.role;
          break;
        case Monotonicity::Decreasing:
          want = negate(n.role);
          break;
        case Monotonicity::Neither:
          want = Role::Affine;
          break;
        case Monotonicity::Auxiliary: {
          auto f = affine_form(ch.oexpr, actx);
          if (!ch.is_leaf() || !f || !f->is_constant()) problem = ch.id + ": auxiliary argument is not constant";
          continue;
        }
      }
      if (ch.role != want) problem = ch.id + ": expected role " + std::string(to_string(want));
    }
  });
  return problem;
}

Canonicalized canonicalize(const Problem& p, const AtomRegistry& registry,
                           const std::map<std::string, Value, std::less<>>& params) {
  validate(p);
  const Problem bound = bind_parameters(p, params);
  const Problem norm = normalize_sense(bound);
  const std::size_t m = bound.constraints.size();

  TreeContext base;
  base.registry = &registry;
  base.vars = bound.vars;

  // Objective first; it always survives.
  TreeContext obj_ctx = base;
  obj_ctx.available = bound.constraints;
  AtomTree obj_tree = build_tree(norm.objective, Role::Convex, "obj", obj_ctx);

  std::vector<std::optional<AtomTree>> trees(m);
  std::vector<std::exception_ptr> failures(m);
  for (std::size_t k = 0; k < m; ++k) {
    TreeContext ctx = base;
    for (std::size_t j = 0; j < m; ++j)
      if (j != k) ctx.available.push_back(bound.constraints[j]);
    try {
      trees[k] = build_tree(bound.constraints[k].body, Role::Concave, bound.constraints[k].name, ctx);
    } catch (const NotDcp&) {
      failures[k] = std::current_exception();
    } catch (const UndischargedCondition&) {
      failures[k] = std::current_exception();
    }
  }

  // Decide which constraints survive. A constraint is dropped when some
  // surviving component uses it as a condition.
  std::vector<bool> kept(m);
  for (std::size_t k = 0; k < m; ++k) kept[k] = trees[k].has_value();
  auto consumer_of = [&](std::size_t k) -> std::optional<std::string> {
    const std::string& name = bound.constraints[k].name;
    if (is_consumed_by(name, obj_tree)) return std::string("obj");
    for (std::size_t j = 0; j < m; ++j)
      if (j != k && kept[j] && is_consumed_by(name, *trees[j])) return bound.constraints[j].name;
    return std::nullopt;
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t k = 0; k < m && !changed; ++k) {
      if (kept[k] && consumer_of(k)) {
        kept[k] = false;
        changed = true;
      }
    }
  }
  // A dropped constraint whose consumer was itself dropped comes back.
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t k = 0; k < m; ++k) {
      if (!kept[k] && trees[k] && !consumer_of(k)) {
        kept[k] = true;
        changed = true;
      }
    }
  }
  std::vector<std::pair<std::string, std::string>> eliminated;
  for (std::size_t k = 0; k < m; ++k) {
    if (kept[k]) continue;
    auto by = consumer_of(k);
    if (!by) {
      if (bound.constraints[k].body.is_apply("lt")) throw StrictConstraintSurvives(bound.constraints[k].name);
      std::rethrow_exception(failures[k]);
    }
    eliminated.emplace_back(bound.constraints[k].name, *by);
  }

  std::vector<AtomTree*> order{&obj_tree};
  for (std::size_t k = 0; k < m; ++k)
    if (kept[k]) order.push_back(&*trees[k]);

  // Fresh variables in pre-order over the surviving components.
  std::set<std::string, std::less<>> taken;
  for (const auto& v : bound.vars) taken.insert(v.name);
  int counter = 0;
  std::vector<VarDecl> fresh_vars;
  for (AtomTree* t : order) {
    preorder(t->root, [&](TreeNode& n) {
      if (n.is_leaf()) return;
      for (const auto& iv : n.atom->impl_vars) {
        std::string name;
        do {
          name = "t." + std::to_string(counter++);
        } while (taken.contains(name));
        taken.insert(name);
        n.fresh.push_back(name);
        fresh_vars.push_back({name, iv.shape.var_shape(n.dims)});
      }
    });
    compute_rexpr(t->root);
  }

  ReducedProblem rp;
  rp.original_vars = bound.vars;
  rp.fresh_vars = fresh_vars;
  rp.eliminated = eliminated;
  Problem& q = rp.problem;
  q.vars = bound.vars;
  q.vars.insert(q.vars.end(), fresh_vars.begin(), fresh_vars.end());
  q.sense = bound.sense;
  const Expr& g = obj_tree.root.rexpr;
  if (bound.sense == Sense::Maximize)
    q.objective = g.is_apply("neg") ? g.arg(0) : -g;
  else
    q.objective = g;

  std::set<std::string, std::less<>> cnames;
  for (const auto& c : bound.constraints) cnames.insert(c.name);
  for (std::size_t k = 0; k < m; ++k) {
    if (!kept[k]) continue;
    std::string name = bound.constraints[k].name + "'";
    cnames.insert(name);
    q.constraints.push_back({name, trees[k]->root.rexpr});
    rp.provenance.emplace_back(name, "constraint " + bound.constraints[k].name);
  }
  std::size_t j = m;
  Reduction red;
  red.source_vars = bound.vars;
  red.target_vars = q.vars;
  for (AtomTree* t : order) {
    preorder(t->root, [&](const TreeNode& n) {
      if (n.is_leaf()) return;
      const Substitution sub = node_substitution(n, true);
      for (const auto& c : n.atom->impl_constraints) {
        std::string name;
        do {
          name = "c" + std::to_string(++j) + "'";
        } while (cnames.contains(name));
        cnames.insert(name);
        q.constraints.push_back({name, substitute(c.body, sub)});
        rp.provenance.emplace_back(name, n.id);
      }
      Substitution orig;
      for (std::size_t i = 0; i < n.atom->args.size(); ++i) orig[n.atom->args[i].name] = n.children[i].oexpr;
      for (std::size_t v = 0; v < n.fresh.size(); ++v)
        red.interp.emplace_back(n.fresh[v], substitute(n.atom->solution[v], orig));
    });
  }
  check_conic(q);

  rp.trees.push_back(std::move(obj_tree));
  for (std::size_t k = 0; k < m; ++k)
    if (kept[k]) rp.trees.push_back(std::move(*trees[k]));

  return {bound, std::move(rp), std::move(red)};
}

Assignment forward_apply(const Reduction& r, const Assignment& a) {
  Assignment out = a.restrict_to(r.source_vars);
  for (const auto& [name, e] : r.interp) out.set(name, eval(e, a, {}, name));
  return out;
}

Assignment backward_apply(const Reduction& r, const Assignment& a) { return a.restrict_to(r.source_vars); }

std::string explain_tree(const AtomTree& t) {
  std::ostringstream os;
  std::function<void(const TreeNode&, int)> rec = [&](const TreeNode& n, int depth) {
    os << std::string(static_cast<std::size_t>(2 * depth), ' ') << n.id << "  ";
    if (n.is_leaf()) {
      os << "leaf " << print_expr(n.oexpr);
    } else {
      os << n.atom->name << " (" << to_string(n.atom->curvature) << ")";
    }
    os << "  role " << to_string(n.role);
    if (!n.fresh.empty()) {
      os << "  vars";
      for (const auto& f : n.fresh) os << " " << f;
    }
    for (const auto& d : n.discharges)
      os << "  [" << d.condition << (d.by.empty() ? " holds" : " by " + d.by) << "]";
    os << "\n";
    for (const auto& c : n.children) rec(c, depth + 1);
  };
  rec(t.root, 0);
  return os.str();
}

}  // namespace cvxc
