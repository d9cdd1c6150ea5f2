#include "fpqs/operators.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <string>

#include "json_real.hpp"

namespace fpqs {

using detail::real_from_json;
using detail::real_to_json;
using detail::reals_from_json;
using detail::reals_to_json;

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

Point project_halfspace(const HalfSpace& hs, const Point& x) {
  require(x.size() == hs.b.size(), "project_halfspace: dimension mismatch");
  const double bb = norm_sq(hs.b);
  require(bb > 0.0, "project_halfspace: zero normal");
  const double bx = dot(hs.b, x);
  const bool feasible = hs.sense == HalfSpace::Sense::lower
                            ? hs.threshold <= bx
                            : bx <= hs.threshold;
  if (feasible) return x;
  Point out(x.size());
  kern::axpby(1.0, x.data(), (hs.threshold - bx) / bb, hs.b.data(), out.data(),
              x.size());
  return out;
}

Point project_box(const Box& box, const Point& x) {
  require(x.size() == box.lower.size() && x.size() == box.upper.size(),
          "project_box: dimension mismatch");
  Point out(x.size());
  kern::clamp(x.data(), box.lower.data(), box.upper.data(), out.data(),
              x.size());
  return out;
}

Point project_ball(const Ball& ball, const Point& x) {
  require(x.size() == ball.center.size(), "project_ball: dimension mismatch");
  const double d2 = kern::dist2sq(x.data(), ball.center.data(), x.size());
  if (d2 <= ball.radius * ball.radius) return x;
  const double scale = ball.radius / std::sqrt(d2);
  Point out(x.size());
  kern::axpby(1.0 - scale, ball.center.data(), scale, x.data(), out.data(),
              x.size());
  return out;
}

double* EvalScratch::push(std::size_t n) {
  if (in_use_ == pool_.size()) pool_.emplace_back();
  auto& buf = pool_[in_use_++];
  buf.resize(n);
  return buf.data();
}

void EvalScratch::pop() { --in_use_; }

namespace detail {

struct OpNode {
  int dim = 0;
  OpTag tag = OpTag::nonexpansive;

  virtual ~OpNode() = default;
  virtual void eval(const double* x, double* out, EvalScratch& s) const = 0;
  virtual nlohmann::json to_json() const = 0;
};

namespace {

struct IdentityNode final : OpNode {
  explicit IdentityNode(int n) {
    dim = n;
    tag = OpTag::firmly_nonexpansive;
  }
  void eval(const double* x, double* out, EvalScratch&) const override {
    std::memcpy(out, x, sizeof(double) * static_cast<std::size_t>(dim));
  }
  nlohmann::json to_json() const override {
    return {{"kind", "identity"}, {"dim", dim}};
  }
};

struct HalfSpaceNode final : OpNode {
  HalfSpace hs;
  double inv_norm_sq;

  explicit HalfSpaceNode(HalfSpace h) : hs(std::move(h)) {
    const double bb = norm_sq(hs.b);
    require(bb > 0.0, "halfspace projection: zero normal");
    inv_norm_sq = 1.0 / bb;
    dim = static_cast<int>(hs.b.size());
    tag = OpTag::firmly_nonexpansive;
  }
  void eval(const double* x, double* out, EvalScratch&) const override {
    const auto n = static_cast<std::size_t>(dim);
    const double bx = kern::dot(hs.b.data(), x, n);
    const bool feasible = hs.sense == HalfSpace::Sense::lower
                              ? hs.threshold <= bx
                              : bx <= hs.threshold;
    if (feasible) {
      std::memcpy(out, x, sizeof(double) * n);
      return;
    }
    kern::axpby(1.0, x, (hs.threshold - bx) * inv_norm_sq, hs.b.data(), out,
                n);
  }
  nlohmann::json to_json() const override {
    return {{"kind", "halfspace"},
            {"b", reals_to_json(hs.b)},
            {"threshold", real_to_json(hs.threshold)},
            {"sense", hs.sense == HalfSpace::Sense::lower ? "lower" : "upper"}};
  }
};

struct BoxNode final : OpNode {
  Box box;

  explicit BoxNode(Box b) : box(std::move(b)) {
    require(box.lower.size() == box.upper.size(),
            "box projection: bound dimension mismatch");
    for (std::size_t i = 0; i < box.lower.size(); ++i)
      require(box.lower[i] <= box.upper[i], "box projection: lower > upper");
    dim = static_cast<int>(box.lower.size());
    tag = OpTag::firmly_nonexpansive;
  }
  void eval(const double* x, double* out, EvalScratch&) const override {
    kern::clamp(x, box.lower.data(), box.upper.data(), out,
                static_cast<std::size_t>(dim));
  }
  nlohmann::json to_json() const override {
    return {{"kind", "box"},
            {"lower", reals_to_json(box.lower)},
            {"upper", reals_to_json(box.upper)}};
  }
};

struct BallNode final : OpNode {
  Ball ball;

  explicit BallNode(Ball b) : ball(std::move(b)) {
    require(ball.radius >= 0.0, "ball projection: negative radius");
    dim = static_cast<int>(ball.center.size());
    tag = OpTag::firmly_nonexpansive;
  }
  void eval(const double* x, double* out, EvalScratch&) const override {
    const auto n = static_cast<std::size_t>(dim);
    const double d2 = kern::dist2sq(x, ball.center.data(), n);
    if (d2 <= ball.radius * ball.radius) {
      std::memcpy(out, x, sizeof(double) * n);
      return;
    }
    const double scale = ball.radius / std::sqrt(d2);
    kern::axpby(1.0 - scale, ball.center.data(), scale, x, out, n);
  }
  nlohmann::json to_json() const override {
    return {{"kind", "ball"},
            {"center", reals_to_json(ball.center)},
            {"radius", ball.radius}};
  }
};

struct AverageNode final : OpNode {
  std::vector<Operator> children;

  explicit AverageNode(std::vector<Operator> ops) : children(std::move(ops)) {
    require(!children.empty(), "average: empty operator list");
    dim = children.front().dim();
    for (const auto& op : children)
      require(op.dim() == dim, "average: dimension mismatch");
    tag = OpTag::nonexpansive;
  }
  void eval(const double* x, double* out, EvalScratch& s) const override {
    const auto n = static_cast<std::size_t>(dim);
    double* tmp = s.push(n);
    const double w = 1.0 / static_cast<double>(children.size());
    std::memset(out, 0, sizeof(double) * n);
    for (const auto& op : children) {
      op.eval(x, tmp, s);
      kern::accum(w, tmp, out, n);
    }
    s.pop();
  }
  nlohmann::json to_json() const override {
    nlohmann::json kids = nlohmann::json::array();
    for (const auto& op : children) kids.push_back(op.to_json());
    return {{"kind", "average"}, {"children", kids}};
  }
};

struct FirmUpNode final : OpNode {
  Operator child;
  double alpha;

  FirmUpNode(Operator op, double a) : child(std::move(op)), alpha(a) {
    require(alpha > 0.0 && alpha <= 0.5, "firm_up: alpha outside (0, 1/2]");
    dim = child.dim();
    tag = OpTag::firmly_nonexpansive;
  }
  void eval(const double* x, double* out, EvalScratch& s) const override {
    const auto n = static_cast<std::size_t>(dim);
    double* tmp = s.push(n);
    child.eval(x, tmp, s);
    kern::axpby(alpha, x, 1.0 - alpha, tmp, out, n);
    s.pop();
  }
  nlohmann::json to_json() const override {
    return {{"kind", "firm_up"}, {"alpha", alpha}, {"child", child.to_json()}};
  }
};

struct FuncNode final : OpNode {
  std::function<void(const double*, double*)> fn;

  FuncNode(int n, OpTag t, std::function<void(const double*, double*)> f)
      : fn(std::move(f)) {
    require(n > 0, "custom operator: dimension must be positive");
    require(static_cast<bool>(fn), "custom operator: null function");
    dim = n;
    tag = t;
  }
  void eval(const double* x, double* out, EvalScratch&) const override {
    fn(x, out);
  }
  nlohmann::json to_json() const override {
    throw std::invalid_argument("custom operators are not serializable");
  }
};

struct GcfsNode final : OpNode {
  Operator outer;
  std::vector<std::pair<Operator, double>> members;

  GcfsNode(Operator out_op, std::vector<std::pair<Operator, double>> mem)
      : outer(std::move(out_op)), members(std::move(mem)) {
    require(!members.empty(), "gcfs: empty member list");
    dim = outer.dim();
    double wsum = 0.0;
    for (const auto& [op, w] : members) {
      require(op.dim() == dim, "gcfs: dimension mismatch");
      require(w > 0.0, "gcfs: nonpositive weight");
      wsum += w;
    }
    require(std::abs(wsum - 1.0) <= 1e-12, "gcfs: weights must sum to 1");
    tag = OpTag::nonexpansive;
  }
  void eval(const double* x, double* out, EvalScratch& s) const override {
    const auto n = static_cast<std::size_t>(dim);
    double* acc = s.push(n);
    double* tmp = s.push(n);
    std::memset(acc, 0, sizeof(double) * n);
    for (const auto& [op, w] : members) {
      op.eval(x, tmp, s);
      kern::accum(w, tmp, acc, n);
    }
    outer.eval(acc, out, s);
    s.pop();
    s.pop();
  }
  nlohmann::json to_json() const override {
    nlohmann::json mem = nlohmann::json::array();
    for (const auto& [op, w] : members)
      mem.push_back({{"weight", w}, {"op", op.to_json()}});
    return {{"kind", "gcfs"}, {"outer", outer.to_json()}, {"members", mem}};
  }
};

}  // namespace
}  // namespace detail

int Operator::dim() const { return node_->dim; }

OpTag Operator::tag() const { return node_->tag; }

Point Operator::operator()(const Point& x) const {
  EvalScratch scratch;
  Point out(x.size());
  eval(x, out, scratch);
  return out;
}

void Operator::eval(const double* x, double* out, EvalScratch& scratch) const {
  node_->eval(x, out, scratch);
}

void Operator::eval(const Point& x, Point& out, EvalScratch& scratch) const {
  require(static_cast<int>(x.size()) == node_->dim,
          "operator evaluation: dimension mismatch");
  out.resize(x.size());
  node_->eval(x.data(), out.data(), scratch);
}

nlohmann::json Operator::to_json() const { return node_->to_json(); }

Operator Operator::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "identity") return identity_op(j.at("dim").get<int>());
  if (kind == "halfspace") {
    HalfSpace hs;
    hs.b = reals_from_json(j.at("b"));
    hs.threshold = real_from_json(j.at("threshold"));
    const std::string sense = j.at("sense").get<std::string>();
    require(sense == "lower" || sense == "upper",
            "operator json: bad halfspace sense");
    hs.sense = sense == "lower" ? HalfSpace::Sense::lower
                                : HalfSpace::Sense::upper;
    return projection_op(std::move(hs));
  }
  if (kind == "box") {
    Box box{reals_from_json(j.at("lower")), reals_from_json(j.at("upper"))};
    return projection_op(std::move(box));
  }
  if (kind == "ball") {
    Ball ball{reals_from_json(j.at("center")), j.at("radius").get<double>()};
    return projection_op(std::move(ball));
  }
  if (kind == "average") {
    std::vector<Operator> kids;
    for (const auto& k : j.at("children")) kids.push_back(from_json(k));
    return average(std::move(kids));
  }
  if (kind == "firm_up") {
    return firm_up(from_json(j.at("child")), j.at("alpha").get<double>());
  }
  if (kind == "gcfs") {
    std::vector<std::pair<Operator, double>> members;
    for (const auto& m : j.at("members"))
      members.emplace_back(from_json(m.at("op")),
                           m.at("weight").get<double>());
    return gcfs_operator(from_json(j.at("outer")), std::move(members));
  }
  throw std::invalid_argument("operator json: unknown kind '" + kind + "'");
}

Operator identity_op(int dim) {
  require(dim > 0, "identity: dimension must be positive");
  return Operator(std::make_shared<detail::IdentityNode>(dim));
}

Operator projection_op(HalfSpace hs) {
  return Operator(std::make_shared<detail::HalfSpaceNode>(std::move(hs)));
}

Operator projection_op(Box box) {
  return Operator(std::make_shared<detail::BoxNode>(std::move(box)));
}

Operator projection_op(Ball ball) {
  return Operator(std::make_shared<detail::BallNode>(std::move(ball)));
}

Operator make_operator(int dim, OpTag tag,
                       std::function<void(const double*, double*)> fn) {
  return Operator(
      std::make_shared<detail::FuncNode>(dim, tag, std::move(fn)));
}

Operator average(std::vector<Operator> ops) {
  return Operator(std::make_shared<detail::AverageNode>(std::move(ops)));
}

Operator firm_up(Operator op, double alpha) {
  return Operator(std::make_shared<detail::FirmUpNode>(std::move(op), alpha));
}

Operator gcfs_operator(Operator outer,
                       std::vector<std::pair<Operator, double>> members) {
  return Operator(std::make_shared<detail::GcfsNode>(std::move(outer),
                                                     std::move(members)));
}

double fixed_point_residual(const Operator& T, const Point& x,
                            EvalScratch& scratch) {
  const auto n = x.size();
  double* tmp = scratch.push(n);
  T.eval(x.data(), tmp, scratch);
  const double r = std::sqrt(kern::dist2sq(x.data(), tmp, n));
  scratch.pop();
  return r;
}

}  // namespace fpqs
