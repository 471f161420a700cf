#include "cvxc/cbf.hpp"

#include "cvxc/errors.hpp"
#include "cvxc/functions.hpp"
#include "cvxc/parser.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace cvxc {

int CbfDocument::row_count() const {
  int n = 0;
  for (const auto& c : cones) n += c.rows;
  return n;
}

namespace {

class Builder {
 public:
  explicit Builder(const Problem& q) : q_(q), ctx_(AffineContext::of(q.vars)) {
    doc_.vars = q.vars;
    doc_.variables = coordinates(q.vars);
    for (std::size_t k = 0; k < doc_.variables.size(); ++k) index_[doc_.variables[k]] = static_cast<int>(k);
  }

  CbfDocument build() {
    objective();
    for (const auto& c : q_.constraints) constraint(c);
    std::sort(doc_.a.begin(), doc_.a.end());
    std::sort(doc_.h.begin(), doc_.h.end());
    std::sort(doc_.d.begin(), doc_.d.end());
    return std::move(doc_);
  }

 private:
  AffineForm form(const Expr& e, const std::string& where) const {
    auto f = affine_form(e, ctx_);
    if (!f || !f->is_numeric())
      throw NonConicProblem(where + ": '" + print_expr(e) + "' is not affine with numeric coefficients");
    return *f;
  }

  void objective() {
    const AffineForm f = form(q_.objective, "objective");
    if (f.entries.size() != 1) throw NonConicProblem("objective is not scalar");
    doc_.objective_sign = q_.sense == Sense::Maximize ? -1 : 1;
    const double s = doc_.objective_sign;
    for (const auto& [c, k] : f.entries[0].terms) {
      const double v = s * *numeric(k);
      if (v != 0) doc_.obj_a.emplace_back(index_.at(c), v);
    }
    std::sort(doc_.obj_a.begin(), doc_.obj_a.end());
    doc_.obj_b = s * *numeric(f.entries[0].constant) + 0.0;
  }

  void row(const LinearForm& f) {
    for (const auto& [c, k] : f.terms) {
      const double v = *numeric(k);
      if (v != 0) doc_.a.emplace_back(next_row_, index_.at(c), v);
    }
    const double b = *numeric(f.constant);
    if (b != 0) doc_.b.emplace_back(next_row_, b);
    ++next_row_;
  }

  void block(const std::string& kind, const std::vector<const LinearForm*>& rows, const std::string& name) {
    for (const auto* r : rows) row(*r);
    doc_.cones.push_back({kind, static_cast<int>(rows.size()), name});
  }

  static std::vector<const LinearForm*> all(const AffineForm& f) {
    std::vector<const LinearForm*> out;
    for (const auto& e : f.entries) out.push_back(&e);
    return out;
  }

  void constraint(const Constraint& c) {
    const Expr& e = c.body;
    const std::optional<ConeKind> kind = e.is_apply() ? cone_kind(e.name()) : std::nullopt;
    if (!kind) throw NonConicProblem("constraint " + c.name + " is not a cone membership");
    std::vector<AffineForm> args;
    for (const auto& a : e.args()) args.push_back(form(a, "constraint " + c.name));
    switch (*kind) {
      case ConeKind::Zero:
        block("L=", all(args[0]), c.name);
        break;
      case ConeKind::PosOrth:
        block("L+", all(args[0]), c.name);
        break;
      case ConeKind::SecondOrder: {
        auto rows = all(args[0]);
        for (auto* r : all(args[1])) rows.push_back(r);
        block("Q", rows, c.name);
        break;
      }
      case ConeKind::RotatedSecondOrder: {
        auto rows = all(args[0]);
        for (auto* r : all(args[1])) rows.push_back(r);
        for (auto* r : all(args[2])) rows.push_back(r);
        block("QR", rows, c.name);
        break;
      }
      case ConeKind::Exp: {
        // CBF orders the exponential cone as (c, b, a) for b*exp(a/b) <= c.
        std::size_t n = 1;
        for (const auto& a : args) n = std::max(n, a.entries.size());
        auto at = [](const AffineForm& f, std::size_t k) { return &f.entries[f.entries.size() == 1 ? 0 : k]; };
        for (std::size_t k = 0; k < n; ++k) block("EXP", {at(args[2], k), at(args[1], k), at(args[0], k)}, c.name);
        break;
      }
      case ConeKind::PSD: {
        const AffineForm& m = args[0];
        const int n = m.shape.rows;
        const int blk = static_cast<int>(doc_.psd_dims.size());
        doc_.psd_dims.push_back(n);
        doc_.psd_constraints.push_back(c.name);
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j <= i; ++j) {
            const LinearForm& f = m.entries[static_cast<std::size_t>(i * n + j)];
            for (const auto& [coord, k] : f.terms) {
              const double v = *numeric(k);
              if (v != 0) doc_.h.emplace_back(blk, index_.at(coord), i, j, v);
            }
            const double d = *numeric(f.constant);
            if (d != 0) doc_.d.emplace_back(blk, i, j, d);
          }
        }
        break;
      }
    }
  }

  const Problem& q_;
  AffineContext ctx_;
  CbfDocument doc_;
  std::map<Coord, int> index_;
  int next_row_ = 0;
};

std::string num(double v) { return format_double(v); }

}  // namespace

CbfDocument build_cbf(const Problem& q) {
  if (!q.params.empty()) throw UnboundParameter(q.params.front().name);
  return Builder(q).build();
}

std::string write_cbf(const CbfDocument& doc) {
  std::ostringstream os;
  os << "VER\n" << doc.version << "\n\n";
  os << "OBJSENSE\nMIN\n\n";
  const auto n = doc.variables.size();
  os << "VAR\n" << n << " " << (n > 0 ? 1 : 0) << "\n";
  if (n > 0) os << "F " << n << "\n";
  os << "\n";
  if (!doc.psd_dims.empty()) {
    os << "PSDCON\n" << doc.psd_dims.size() << "\n";
    for (int d : doc.psd_dims) os << d << "\n";
    os << "\n";
  }
  if (!doc.cones.empty()) {
    os << "CON\n" << doc.row_count() << " " << doc.cones.size() << "\n";
    for (const auto& c : doc.cones) os << c.kind << " " << c.rows << "\n";
    os << "\n";
  }
  if (!doc.obj_a.empty()) {
    os << "OBJACOORD\n" << doc.obj_a.size() << "\n";
    for (const auto& [j, v] : doc.obj_a) os << j << " " << num(v) << "\n";
    os << "\n";
  }
  if (doc.obj_b != 0) os << "OBJBCOORD\n" << num(doc.obj_b) << "\n\n";
  if (!doc.h.empty()) {
    os << "HCOORD\n" << doc.h.size() << "\n";
    for (const auto& [blk, j, r, c, v] : doc.h) os << blk << " " << j << " " << r << " " << c << " " << num(v) << "\n";
    os << "\n";
  }
  if (!doc.d.empty()) {
    os << "DCOORD\n" << doc.d.size() << "\n";
    for (const auto& [blk, r, c, v] : doc.d) os << blk << " " << r << " " << c << " " << num(v) << "\n";
    os << "\n";
  }
  if (!doc.a.empty()) {
    os << "ACOORD\n" << doc.a.size() << "\n";
    for (const auto& [r, j, v] : doc.a) os << r << " " << j << " " << num(v) << "\n";
    os << "\n";
  }
  if (!doc.b.empty()) {
    os << "BCOORD\n" << doc.b.size() << "\n";
    for (const auto& [r, v] : doc.b) os << r << " " << num(v) << "\n";
    os << "\n";
  }
  return os.str();
}

std::string write_cbf(const ReducedProblem& q) { return write_cbf(build_cbf(q.problem)); }

namespace {

std::vector<std::string_view> fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::optional<long> to_index(std::string_view s) {
  long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> to_double(std::string_view s) {
  // strtod accepts the usual decimal and exponent forms; the whole field
  // must be consumed.
  const std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

SolutionFile parse_solution(std::string_view text, const CbfDocument& doc) {
  SolutionFile out;
  std::vector<std::optional<double>> values(doc.variables.size());
  std::set<std::tuple<long, long, long>> psd_seen;
  bool any = false;
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    const auto f = fields(line);
    if (lineno == 1) {
      if (f.size() != 2 || f[0] != "STATUS") throw MalformedSolution(1, "expected 'STATUS <token>'");
      out.status = std::string(f[1]);
      continue;
    }
    if (f.empty()) continue;
    if (f[0] == "VAR") {
      if (f.size() != 3) throw MalformedSolution(lineno, "expected 'VAR <index> <value>'");
      auto idx = to_index(f[1]);
      auto val = to_double(f[2]);
      if (!idx || *idx < 0 || static_cast<std::size_t>(*idx) >= values.size())
        throw MalformedSolution(lineno, "variable index out of range");
      if (!val) throw MalformedSolution(lineno, "value is not a finite number");
      auto& slot = values[static_cast<std::size_t>(*idx)];
      if (slot) throw MalformedSolution(lineno, "duplicate VAR index " + std::string(f[1]));
      slot = *val;
      any = true;
    } else if (f[0] == "PSDVAR") {
      if (f.size() != 5) throw MalformedSolution(lineno, "expected 'PSDVAR <block> <i> <j> <value>'");
      auto blk = to_index(f[1]), i = to_index(f[2]), j = to_index(f[3]);
      auto val = to_double(f[4]);
      if (!blk || *blk < 0 || static_cast<std::size_t>(*blk) >= doc.psd_var_dims.size())
        throw MalformedSolution(lineno, "no PSD variable block " + std::string(f[1]));
      const long dim = doc.psd_var_dims[static_cast<std::size_t>(*blk)];
      if (!i || !j || *i < 0 || *j < 0 || *i >= dim || *j >= dim) throw MalformedSolution(lineno, "entry out of range");
      if (!val) throw MalformedSolution(lineno, "value is not a finite number");
      if (!psd_seen.insert({*blk, std::max(*i, *j), std::min(*i, *j)}).second)
        throw MalformedSolution(lineno, "duplicate PSDVAR entry");
    } else {
      throw MalformedSolution(lineno, "unexpected '" + std::string(f[0]) + "'");
    }
  }
  if (lineno == 0 || out.status.empty()) throw MalformedSolution(1, "empty solution file");
  if (!any) return out;
  Eigen::VectorXd x(static_cast<Eigen::Index>(values.size()));
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!values[k]) throw MissingVariable(doc.variables[k].var);
    x(static_cast<Eigen::Index>(k)) = *values[k];
  }
  out.values = from_coordinates(doc.vars, x);
  return out;
}

std::string write_solution(std::string_view status, const Assignment& a, const CbfDocument& doc) {
  std::ostringstream os;
  os << "STATUS " << status << "\n";
  if (a.empty()) return os.str();
  const Eigen::VectorXd x = to_coordinates(doc.variables, a);
  for (Eigen::Index k = 0; k < x.size(); ++k) os << "VAR " << k << " " << num(x(k)) << "\n";
  return os.str();
}

}  // namespace cvxc
