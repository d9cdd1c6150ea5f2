#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "json.hpp"

#include "fpqs/point.hpp"

// Algebra of nonexpansive mappings. Elementary metric projections (half
// space, box, ball) plus the composition rules that turn them into
// operators whose fixed point sets encode constraint sets:
//
//   average(T_1..T_N)      mean of nonexpansive maps; Fix = intersection of
//                          the members' fixed point sets
//   firm_up(T, alpha)      alpha*Id + (1-alpha)*T, firmly nonexpansive with
//                          the same fixed point set
//   gcfs_operator(...)     P_X0 composed with a weighted mean of member
//                          projections; its fixed points minimize the
//                          weighted mean square distance to the members
//                          over X0 (a surrogate feasible set for possibly
//                          conflicting constraints)
//
// Operators are immutable trees and may be evaluated concurrently.

namespace fpqs {

struct HalfSpace {
  enum class Sense {
    lower,  // threshold <= <b, x>
    upper,  // <b, x> <= threshold
  };
  Point b;
  double threshold = 0.0;
  Sense sense = Sense::upper;
};

// Per-coordinate bounds; entries may be -inf/+inf.
struct Box {
  Point lower;
  Point upper;
};

struct Ball {
  Point center;
  double radius = 0.0;
};

enum class OpTag { nonexpansive, firmly_nonexpansive };

// Closed-form metric projections.
Point project_halfspace(const HalfSpace& hs, const Point& x);
Point project_box(const Box& box, const Point& x);
Point project_ball(const Ball& ball, const Point& x);

// Reusable buffer stack for allocation-free tree evaluation.
class EvalScratch {
 public:
  double* push(std::size_t n);
  void pop();

 private:
  std::vector<std::vector<double>> pool_;
  std::size_t in_use_ = 0;
};

namespace detail {
struct OpNode;
}

class Operator {
 public:
  Operator() = default;

  int dim() const;
  OpTag tag() const;
  bool valid() const { return node_ != nullptr; }

  Point operator()(const Point& x) const;
  void eval(const double* x, double* out, EvalScratch& scratch) const;
  void eval(const Point& x, Point& out, EvalScratch& scratch) const;

  nlohmann::json to_json() const;
  static Operator from_json(const nlohmann::json& j);

  explicit Operator(std::shared_ptr<const detail::OpNode> node)
      : node_(std::move(node)) {}

 private:
  std::shared_ptr<const detail::OpNode> node_;
};

Operator identity_op(int dim);
Operator projection_op(HalfSpace hs);
Operator projection_op(Box box);
Operator projection_op(Ball ball);

// Wraps an arbitrary evaluable map. The caller vouches for the tag; such
// operators do not serialize.
Operator make_operator(int dim, OpTag tag,
                       std::function<void(const double*, double*)> fn);

// (T1) arithmetic mean of nonexpansive maps. Caller asserts that the
// intersection of the members' fixed point sets is nonempty.
Operator average(std::vector<Operator> ops);

// (T2) alpha*Id + (1-alpha)*T for alpha in (0, 1/2].
Operator firm_up(Operator op, double alpha);

// x -> P_X0(sum_i w_i * P_Xi(x)); weights must be positive and sum to 1.
Operator gcfs_operator(Operator outer,
                       std::vector<std::pair<Operator, double>> members);

// ||x - T(x)||
double fixed_point_residual(const Operator& T, const Point& x,
                            EvalScratch& scratch);

}  // namespace fpqs
