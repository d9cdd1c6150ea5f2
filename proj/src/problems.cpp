#include "fpqs/problems.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "fpqs/rng.hpp"
#include "json_real.hpp"

namespace fpqs {

using detail::real_from_json;
using detail::real_to_json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

void CobbDouglasInstance::validate() const {
  require(n >= 1 && m >= 1, "instance: n and m must be positive");
  require(a0 > 0.0 && c0 > 0.0, "instance: a0 and c0 must be positive");
  require(static_cast<int>(a.size()) == n && static_cast<int>(c.size()) == n,
          "instance: parameter dimension mismatch");
  double asum = 0.0;
  for (double v : a) {
    require(v > 0.0, "instance: exponents must be positive");
    asum += v;
  }
  require(std::abs(asum - 1.0) <= 1e-12,
          "instance: exponents must sum to 1");
  for (double v : c) require(v > 0.0, "instance: cost vector must be positive");
  require(static_cast<int>(constraints.size()) == m,
          "instance: constraint count mismatch");
  for (const auto& con : constraints) {
    require(static_cast<int>(con.b.size()) == n,
            "instance: constraint dimension mismatch");
    require(norm_sq(con.b) > 0.0, "instance: zero constraint normal");
    require(con.p_lo >= 0.0, "instance: negative lower bound");
  }
  require(box_bound > 0.0, "instance: M must be positive");
}

CobbDouglasObjective CobbDouglasInstance::objective() const {
  return {a0, a, c, c0};
}

Box CobbDouglasInstance::domain_box() const {
  return {Point(static_cast<std::size_t>(n), 0.0),
          Point(static_cast<std::size_t>(n), box_bound)};
}

ConvexRegion CobbDouglasInstance::feasible_region() const {
  ConvexRegion region;
  for (const auto& con : constraints) {
    region.halfspaces.push_back(
        {con.b, con.p_lo, HalfSpace::Sense::lower});
    if (std::isfinite(con.p_hi))
      region.halfspaces.push_back({con.b, con.p_hi, HalfSpace::Sense::upper});
  }
  region.box = domain_box();
  return region;
}

nlohmann::json CobbDouglasInstance::to_json() const {
  nlohmann::json cons = nlohmann::json::array();
  for (const auto& con : constraints)
    cons.push_back({{"b", con.b},
                    {"p_lo", con.p_lo},
                    {"p_hi", real_to_json(con.p_hi)}});
  return {{"problem", "cobb_douglas"},
          {"case", case_label},
          {"n", n},
          {"m", m},
          {"a0", a0},
          {"c0", c0},
          {"a", a},
          {"c", c},
          {"constraints", cons},
          {"M", real_to_json(box_bound)},
          {"seed", seed}};
}

CobbDouglasInstance CobbDouglasInstance::from_json(const nlohmann::json& j) {
  if (!j.contains("constraints")) {
    // shorthand: generate from (case, n, m, seed)
    const std::string label = j.at("case").get<std::string>();
    const int n = j.at("n").get<int>();
    const int m = j.at("m").get<int>();
    const auto seed = j.value("seed", std::uint64_t{0});
    if (label == "unbounded") return gen_unbounded_case(n, m, seed);
    if (label == "bounded") return gen_bounded_case(n, m, seed);
    if (label == "gcfs") return gen_gcfs_case(n, m, seed);
    throw std::invalid_argument("instance json: unknown case '" + label + "'");
  }
  CobbDouglasInstance inst;
  inst.n = j.at("n").get<int>();
  inst.m = j.at("m").get<int>();
  inst.a0 = j.at("a0").get<double>();
  inst.c0 = j.at("c0").get<double>();
  inst.a = j.at("a").get<Point>();
  inst.c = j.at("c").get<Point>();
  for (const auto& cj : j.at("constraints")) {
    CobbDouglasConstraint con;
    con.b = cj.at("b").get<Point>();
    con.p_lo = cj.at("p_lo").get<double>();
    con.p_hi = real_from_json(cj.at("p_hi"));
    inst.constraints.push_back(std::move(con));
  }
  inst.box_bound = real_from_json(j.at("M"));
  inst.case_label = j.value("case", std::string("custom"));
  inst.seed = j.value("seed", std::uint64_t{0});
  inst.validate();
  return inst;
}

double cobb_douglas_value(const CobbDouglasInstance& inst, const Point& x) {
  return cobb_douglas_value(inst.objective(), x);
}

SubgradResult cobb_douglas_subgradient(const CobbDouglasInstance& inst,
                                       const Point& x) {
  return cobb_douglas_subgradient(inst.objective(), x);
}

QuasiSubgradientOracle cobb_douglas_oracle(const CobbDouglasInstance& inst) {
  return make_cobb_douglas_oracle(inst.objective());
}

Operator build_constraint_operator(const CobbDouglasInstance& inst) {
  inst.validate();
  std::vector<Operator> pairs;
  pairs.reserve(inst.constraints.size());
  for (const auto& con : inst.constraints) {
    Operator lower =
        projection_op(HalfSpace{con.b, con.p_lo, HalfSpace::Sense::lower});
    Operator upper =
        std::isfinite(con.p_hi)
            ? projection_op(HalfSpace{con.b, con.p_hi,
                                      HalfSpace::Sense::upper})
            : identity_op(inst.n);
    pairs.push_back(average({std::move(lower), std::move(upper)}));
  }
  return firm_up(average(std::move(pairs)), 0.5);
}

Operator build_gcfs_operator(const CobbDouglasInstance& inst) {
  inst.validate();
  const double w = 1.0 / (2.0 * static_cast<double>(inst.m));
  std::vector<std::pair<Operator, double>> members;
  members.reserve(2 * inst.constraints.size());
  for (const auto& con : inst.constraints) {
    members.emplace_back(
        projection_op(HalfSpace{con.b, con.p_lo, HalfSpace::Sense::lower}), w);
    members.emplace_back(
        std::isfinite(con.p_hi)
            ? projection_op(HalfSpace{con.b, con.p_hi,
                                      HalfSpace::Sense::upper})
            : identity_op(inst.n),
        w);
  }
  return firm_up(gcfs_operator(projection_op(inst.domain_box()),
                               std::move(members)),
                 0.5);
}

namespace {

Point draw_nonzero_b(rng::Stream& stream, int n) {
  while (true) {
    Point b(static_cast<std::size_t>(n));
    for (double& v : b) v = stream.uniform();  // [0, 1)
    if (norm_sq(b) > 0.0) return b;
  }
}

// Shared parameter block of all three cases: a0, c0 in (0, 10],
// exponents normalized from (0, 1]^n, costs in (0, 10]^n.
CobbDouglasInstance draw_common(int n, int m, std::uint64_t seed,
                                rng::Stream& stream) {
  require(n >= 1 && m >= 1, "generator: n and m must be >= 1");
  CobbDouglasInstance inst;
  inst.n = n;
  inst.m = m;
  inst.seed = seed;
  inst.a0 = stream.uniform_open_closed(10.0);
  inst.c0 = stream.uniform_open_closed(10.0);
  inst.a.resize(static_cast<std::size_t>(n));
  double asum = 0.0;
  for (double& v : inst.a) {
    v = stream.uniform_open_closed(1.0);
    asum += v;
  }
  for (double& v : inst.a) v /= asum;
  inst.c.resize(static_cast<std::size_t>(n));
  for (double& v : inst.c) v = stream.uniform_open_closed(10.0);
  return inst;
}

}  // namespace

CobbDouglasInstance gen_unbounded_case(int n, int m, std::uint64_t seed) {
  rng::Stream stream(seed, rng::kInstanceStream);
  CobbDouglasInstance inst = draw_common(n, m, seed, stream);
  inst.case_label = "unbounded";
  inst.box_bound = kInf;
  for (int i = 0; i < m; ++i) {
    CobbDouglasConstraint con;
    con.b = draw_nonzero_b(stream, n);
    con.p_lo = stream.uniform_in(0.0, 25.0 * norm(con.b));
    con.p_hi = kInf;
    inst.constraints.push_back(std::move(con));
  }
  inst.validate();
  return inst;
}

CobbDouglasInstance gen_bounded_case(int n, int m, std::uint64_t seed) {
  rng::Stream stream(seed, rng::kInstanceStream);
  CobbDouglasInstance inst = draw_common(n, m, seed, stream);
  inst.case_label = "bounded";
  inst.box_bound = 100.0;
  for (int i = 0; i < m; ++i) {
    CobbDouglasConstraint con;
    con.b = draw_nonzero_b(stream, n);
    const double bnorm = norm(con.b);
    con.p_lo = stream.uniform_in(0.0, 25.0 * bnorm);
    con.p_hi = 75.0 * bnorm + stream.uniform_open_closed(25.0 * bnorm);
    inst.constraints.push_back(std::move(con));
  }
  inst.validate();
  return inst;
}

CobbDouglasInstance gen_gcfs_case(int n, int m, std::uint64_t seed) {
  rng::Stream stream(seed, rng::kInstanceStream);
  CobbDouglasInstance inst = draw_common(n, m, seed, stream);
  inst.case_label = "gcfs";
  inst.box_bound = kInf;
  bool has_conflict = false;
  for (int i = 0; i < m; ++i) {
    CobbDouglasConstraint con;
    con.b = draw_nonzero_b(stream, n);
    const double bnorm = norm(con.b);
    con.p_lo = stream.uniform_in(0.0, 100.0 * bnorm);
    con.p_hi = stream.uniform_in(0.0, 100.0 * bnorm);
    has_conflict = has_conflict || con.p_hi < con.p_lo;
    inst.constraints.push_back(std::move(con));
  }
  if (!has_conflict) {
    // Force one: swap the first constraint's bounds; if they tied, push
    // the lower bound strictly above (still inside the declared range).
    auto& con = inst.constraints.front();
    std::swap(con.p_lo, con.p_hi);
    if (!(con.p_hi < con.p_lo))
      con.p_lo = 0.5 * (con.p_hi + 100.0 * norm(con.b));
  }
  inst.validate();
  return inst;
}

namespace {

DiagnosticProblem make_diagnostic(std::string name,
                                  QuasiSubgradientOracle oracle, int dim) {
  DiagnosticProblem p;
  p.name = std::move(name);
  p.oracle = std::move(oracle);
  p.diag = {0.0, Point(static_cast<std::size_t>(dim), 0.0), 1.0, 1.0};
  p.T = identity_op(dim);
  p.P_D = identity_op(dim);
  return p;
}

}  // namespace

DiagnosticProblem diagnostic_norm_problem(int dim) {
  return make_diagnostic("norm", make_norm_oracle(), dim);
}

DiagnosticProblem diagnostic_capped_problem(int dim, double alpha) {
  return make_diagnostic("capped_norm", make_capped_norm_oracle(alpha), dim);
}

DiagnosticProblem diagnostic_hinge_problem(int dim, double radius) {
  return make_diagnostic("hinge_norm", make_hinge_norm_oracle(radius), dim);
}

}  // namespace fpqs
