#include "urbanembed/core/autodiff.hpp"

#include "urbanembed/core/ops.hpp"
#include "urbanembed/error.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace urbanembed {

const Matrix& Var::value() const {
  if (tape_ == nullptr) throw std::logic_error("Var: not attached to a tape");
  return tape_->value(*this);
}

double Var::scalar() const {
  const Matrix& v = value();
  if (v.size() != 1) throw std::logic_error("Var::scalar on " + shape_string(v) + " value");
  return v(0, 0);
}

Var Tape::push(Node node) {
  if (backward_done_) throw std::logic_error("Tape: cannot record after backward");
  if (!node.value.allFinite()) {
    throw NumericalError("non-finite value produced on tape (" + shape_string(node.value) + ")");
  }
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

void Tape::check_owner(Var v) const {
  if (v.tape_ != this || v.id_ >= nodes_.size()) {
    throw std::logic_error("Tape: var belongs to a different tape");
  }
}

Var Tape::constant(Matrix value) { return push(Node{std::move(value), {}, false, false, {}}); }

Var Tape::variable(Matrix value) { return push(Node{std::move(value), {}, true, false, {}}); }

Var Tape::parameter(const std::string& name, const Matrix& value) {
  for (const auto& entry : parameters_) {
    if (entry.first == name) throw std::invalid_argument("Tape: parameter '" + name + "' registered twice");
  }
  Var v = variable(value);
  parameters_.emplace_back(name, v);
  return v;
}

Var Tape::record(Matrix value, std::span<const Var> inputs, Pullback pullback) {
  bool needs = false;
  for (Var in : inputs) {
    check_owner(in);
    needs = needs || nodes_[in.id_].needs_grad;
  }
  return push(Node{std::move(value), {}, needs, false, needs ? std::move(pullback) : Pullback{}});
}

void Tape::accumulate(Var target, const Matrix& gradient) {
  Node& node = nodes_[target.id_];
  if (!node.needs_grad) return;
  if (gradient.rows() != node.value.rows() || gradient.cols() != node.value.cols()) {
    throw std::logic_error("Tape: gradient " + shape_string(gradient) + " for value " + shape_string(node.value));
  }
  if (node.has_grad) {
    node.grad += gradient;
  } else {
    node.grad = gradient;
    node.has_grad = true;
  }
}

void Tape::backward(Var output) {
  check_owner(output);
  if (backward_done_) throw std::logic_error("Tape: backward already run");
  if (nodes_[output.id_].value.size() != 1) {
    throw std::invalid_argument("Tape::backward: output must be scalar");
  }
  backward_done_ = true;
  accumulate(output, Matrix::Ones(1, 1));
  for (std::size_t i = output.id_ + 1; i-- > 0;) {
    ++backward_visits_;
    Node& node = nodes_[i];
    if (!node.has_grad || !node.pullback) continue;
    node.pullback(*this, node.grad, node.value);
  }
}

Matrix Tape::gradient(Var v) const {
  check_owner(v);
  const Node& node = nodes_[v.id_];
  if (!node.has_grad) return Matrix::Zero(node.value.rows(), node.value.cols());
  return node.grad;
}

std::map<std::string, Matrix> Tape::parameter_gradients() const {
  std::map<std::string, Matrix> out;
  for (const auto& [name, v] : parameters_) out[name] = gradient(v);
  return out;
}

namespace ad {
namespace {

Tape& tape_of(std::initializer_list<Var> vars) {
  Tape* tape = nullptr;
  for (Var v : vars) {
    if (!v.valid()) throw std::logic_error("ad: uninitialised Var");
    if (tape == nullptr) tape = v.tape();
    if (v.tape() != tape) throw std::logic_error("ad: vars from different tapes");
  }
  return *tape;
}

void require_same_shape(Var a, Var b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + shape_string(a.value()) + " vs " +
                                shape_string(b.value()));
  }
}

void require_scalar(Var s, const char* op) {
  if (s.value().size() != 1) throw std::invalid_argument(std::string(op) + ": expected 1x1 operand");
}

}  // namespace

Var matmul(Var a, Var b) {
  Tape& t = tape_of({a, b});
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("matmul: " + shape_string(a.value()) + " * " + shape_string(b.value()));
  }
  const Var in[] = {a, b};
  return t.record(a.value() * b.value(), in, [a, b](Tape& tp, const Matrix& g, const Matrix&) {
    if (tp.needs_grad(a)) tp.accumulate(a, g * b.value().transpose());
    if (tp.needs_grad(b)) tp.accumulate(b, a.value().transpose() * g);
  });
}

Var matmul_nt(Var a, Var b) {
  Tape& t = tape_of({a, b});
  if (a.cols() != b.cols()) {
    throw std::invalid_argument("matmul_nt: " + shape_string(a.value()) + " * T(" + shape_string(b.value()) + ")");
  }
  const Var in[] = {a, b};
  return t.record(a.value() * b.value().transpose(), in, [a, b](Tape& tp, const Matrix& g, const Matrix&) {
    if (tp.needs_grad(a)) tp.accumulate(a, g * b.value());
    if (tp.needs_grad(b)) tp.accumulate(b, g.transpose() * a.value());
  });
}

Var transpose(Var a) {
  Tape& t = tape_of({a});
  const Var in[] = {a};
  return t.record(a.value().transpose(), in,
                  [a](Tape& tp, const Matrix& g, const Matrix&) { tp.accumulate(a, g.transpose()); });
}

Var add(Var a, Var b) {
  Tape& t = tape_of({a, b});
  require_same_shape(a, b, "add");
  const Var in[] = {a, b};
  return t.record(a.value() + b.value(), in, [a, b](Tape& tp, const Matrix& g, const Matrix&) {
    tp.accumulate(a, g);
    tp.accumulate(b, g);
  });
}

Var sub(Var a, Var b) {
  Tape& t = tape_of({a, b});
  require_same_shape(a, b, "sub");
  const Var in[] = {a, b};
  return t.record(a.value() - b.value(), in, [a, b](Tape& tp, const Matrix& g, const Matrix&) {
    tp.accumulate(a, g);
    if (tp.needs_grad(b)) tp.accumulate(b, -g);
  });
}

Var hadamard(Var a, Var b) {
  Tape& t = tape_of({a, b});
  require_same_shape(a, b, "hadamard");
  const Var in[] = {a, b};
  return t.record(a.value().cwiseProduct(b.value()), in, [a, b](Tape& tp, const Matrix& g, const Matrix&) {
    if (tp.needs_grad(a)) tp.accumulate(a, g.cwiseProduct(b.value()));
    if (tp.needs_grad(b)) tp.accumulate(b, g.cwiseProduct(a.value()));
  });
}

Var scale(Var a, double factor) {
  Tape& t = tape_of({a});
  const Var in[] = {a};
  return t.record(a.value() * factor, in,
                  [a, factor](Tape& tp, const Matrix& g, const Matrix&) { tp.accumulate(a, g * factor); });
}

Var scale_by(Var a, Var s) {
  Tape& t = tape_of({a, s});
  require_scalar(s, "scale_by");
  const Var in[] = {a, s};
  return t.record(a.value() * s.scalar(), in, [a, s](Tape& tp, const Matrix& g, const Matrix&) {
    if (tp.needs_grad(a)) tp.accumulate(a, g * s.scalar());
    if (tp.needs_grad(s)) tp.accumulate(s, Matrix::Constant(1, 1, g.cwiseProduct(a.value()).sum()));
  });
}

Var one_minus(Var a) {
  Tape& t = tape_of({a});
  const Var in[] = {a};
  return t.record((1.0 - a.value().array()).matrix(), in,
                  [a](Tape& tp, const Matrix& g, const Matrix&) { tp.accumulate(a, -g); });
}

Var sigmoid(Var a) {
  Tape& t = tape_of({a});
  const Var in[] = {a};
  Matrix y = a.value().unaryExpr([](double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
  });
  return t.record(std::move(y), in, [a](Tape& tp, const Matrix& g, const Matrix& y) {
    tp.accumulate(a, g.cwiseProduct(y.cwiseProduct((1.0 - y.array()).matrix())));
  });
}

Var add_n(std::span<const Var> terms) {
  if (terms.empty()) throw std::invalid_argument("add_n: no terms");
  Var acc = terms[0];
  for (std::size_t i = 1; i < terms.size(); ++i) acc = add(acc, terms[i]);
  return acc;
}

Var mean_n(std::span<const Var> terms) {
  return scale(add_n(terms), 1.0 / static_cast<double>(terms.size()));
}

Var add_bias(Var a, Var b) {
  Tape& t = tape_of({a, b});
  if (b.rows() != 1 || (b.cols() != 1 && b.cols() != a.cols())) {
    throw std::invalid_argument("add_bias: bias " + shape_string(b.value()) + " for " + shape_string(a.value()));
  }
  Matrix y = a.value();
  if (b.cols() == 1) {
    y.array() += b.value()(0, 0);
  } else {
    y.rowwise() += b.value().row(0);
  }
  const Var in[] = {a, b};
  return t.record(std::move(y), in, [a, b](Tape& tp, const Matrix& g, const Matrix&) {
    tp.accumulate(a, g);
    if (!tp.needs_grad(b)) return;
    if (b.cols() == 1) {
      tp.accumulate(b, Matrix::Constant(1, 1, g.sum()));
    } else {
      tp.accumulate(b, g.colwise().sum());
    }
  });
}

Var mul_rows(Var a, Var w) {
  Tape& t = tape_of({a, w});
  if (w.cols() != 1 || w.rows() != a.rows()) {
    throw std::invalid_argument("mul_rows: weights " + shape_string(w.value()) + " for " + shape_string(a.value()));
  }
  Matrix y = a.value();
  for (Eigen::Index i = 0; i < y.rows(); ++i) y.row(i) *= w.value()(i, 0);
  const Var in[] = {a, w};
  return t.record(std::move(y), in, [a, w](Tape& tp, const Matrix& g, const Matrix&) {
    if (tp.needs_grad(a)) {
      Matrix ga = g;
      for (Eigen::Index i = 0; i < ga.rows(); ++i) ga.row(i) *= w.value()(i, 0);
      tp.accumulate(a, ga);
    }
    if (tp.needs_grad(w)) tp.accumulate(w, g.cwiseProduct(a.value()).rowwise().sum());
  });
}

Var softmax_rows(Var a, const BoolMatrix& mask) {
  Tape& t = tape_of({a});
  const Var in[] = {a};
  return t.record(urbanembed::softmax_rows(a.value(), mask), in, [a](Tape& tp, const Matrix& g, const Matrix& y) {
    // dx = y * (g - <g, y>) per row; masked entries have y = 0 so drop out.
    Vector inner = g.cwiseProduct(y).rowwise().sum();
    Matrix gx = g;
    gx.colwise() -= inner;
    tp.accumulate(a, gx.cwiseProduct(y));
  });
}

Var softmax_cols(Var a) { return transpose(softmax_rows(transpose(a))); }

Var log_softmax_cols(Var a) {
  Tape& t = tape_of({a});
  const Var in[] = {a};
  return t.record(urbanembed::log_softmax_cols(a.value()), in, [a](Tape& tp, const Matrix& g, const Matrix& y) {
    // dx = g - softmax * colsum(g)
    const Eigen::RowVectorXd total = g.colwise().sum();
    Matrix gx = g;
    gx.array() -= y.array().exp().rowwise() * total.array();
    tp.accumulate(a, gx);
  });
}

Var l1_normalize_rows(Var a) {
  Tape& t = tape_of({a});
  Vector sums = a.value().rowwise().sum();
  if ((sums.array() <= 0.0).any()) throw std::invalid_argument("l1_normalize_rows: non-positive row sum");
  Matrix y = a.value();
  for (Eigen::Index i = 0; i < y.rows(); ++i) y.row(i) /= sums(i);
  const Var in[] = {a};
  return t.record(std::move(y), in, [a, sums](Tape& tp, const Matrix& g, const Matrix& y) {
    Vector inner = g.cwiseProduct(y).rowwise().sum();
    Matrix gx = g;
    gx.colwise() -= inner;
    for (Eigen::Index i = 0; i < gx.rows(); ++i) gx.row(i) /= sums(i);
    tp.accumulate(a, gx);
  });
}

Var l2_normalize_rows(Var a) {
  Tape& t = tape_of({a});
  Vector norms = a.value().rowwise().norm();
  Matrix y = a.value();
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    if (norms(i) > 0.0) y.row(i) /= norms(i);
  }
  const Var in[] = {a};
  return t.record(std::move(y), in, [a, norms](Tape& tp, const Matrix& g, const Matrix& y) {
    Matrix gx = Matrix::Zero(g.rows(), g.cols());
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      if (norms(i) == 0.0) continue;
      const double inner = g.row(i).dot(y.row(i));
      gx.row(i) = (g.row(i) - inner * y.row(i)) / norms(i);
    }
    tp.accumulate(a, gx);
  });
}

Var soft_threshold(Var a, Var tau) {
  Tape& t = tape_of({a, tau});
  require_scalar(tau, "soft_threshold");
  const double threshold = tau.scalar();
  const Var in[] = {a, tau};
  return t.record(urbanembed::soft_threshold(a.value(), threshold), in,
                  [a, tau, threshold](Tape& tp, const Matrix& g, const Matrix&) {
                    const Matrix& x = a.value();
                    if (tp.needs_grad(a)) {
                      tp.accumulate(a, g.binaryExpr(x, [threshold](double gv, double xv) {
                        return gv * urbanembed::soft_threshold_dx(xv, threshold);
                      }));
                    }
                    if (tp.needs_grad(tau)) {
                      const double dtau = g.binaryExpr(x, [threshold](double gv, double xv) {
                                             return gv * urbanembed::soft_threshold_dtau(xv, threshold);
                                           }).sum();
                      tp.accumulate(tau, Matrix::Constant(1, 1, dtau));
                    }
                  });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: no parts");
  Tape& t = *parts[0].tape();
  Eigen::Index cols = 0;
  for (Var p : parts) {
    if (p.tape() != &t) throw std::logic_error("concat_cols: vars from different tapes");
    if (p.rows() != parts[0].rows()) throw std::invalid_argument("concat_cols: row count mismatch");
    cols += p.cols();
  }
  Matrix y(parts[0].rows(), cols);
  std::vector<Var> inputs(parts.begin(), parts.end());
  Eigen::Index offset = 0;
  for (Var p : parts) {
    y.middleCols(offset, p.cols()) = p.value();
    offset += p.cols();
  }
  return t.record(std::move(y), inputs, [inputs](Tape& tp, const Matrix& g, const Matrix&) {
    Eigen::Index off = 0;
    for (Var p : inputs) {
      if (tp.needs_grad(p)) tp.accumulate(p, g.middleCols(off, p.cols()));
      off += p.cols();
    }
  });
}

Var slice_cols(Var a, Eigen::Index start, Eigen::Index count) {
  Tape& t = tape_of({a});
  if (start < 0 || count < 0 || start + count > a.cols()) throw std::invalid_argument("slice_cols: out of range");
  const Var in[] = {a};
  return t.record(a.value().middleCols(start, count), in, [a, start, count](Tape& tp, const Matrix& g, const Matrix&) {
    Matrix ga = Matrix::Zero(a.rows(), a.cols());
    ga.middleCols(start, count) = g;
    tp.accumulate(a, ga);
  });
}

Var sum(Var a) {
  Tape& t = tape_of({a});
  const Var in[] = {a};
  return t.record(Matrix::Constant(1, 1, a.value().sum()), in, [a](Tape& tp, const Matrix& g, const Matrix&) {
    tp.accumulate(a, Matrix::Constant(a.rows(), a.cols(), g(0, 0)));
  });
}

Var sum_squares(Var a) {
  Tape& t = tape_of({a});
  const Var in[] = {a};
  return t.record(Matrix::Constant(1, 1, a.value().squaredNorm()), in,
                  [a](Tape& tp, const Matrix& g, const Matrix&) { tp.accumulate(a, 2.0 * g(0, 0) * a.value()); });
}

Var weighted_nll(Var p, const Matrix& weights, double floor) {
  Tape& t = tape_of({p});
  if (weights.rows() != p.rows() || weights.cols() != p.cols()) {
    throw std::invalid_argument("weighted_nll: weights " + shape_string(weights) + " for " + shape_string(p.value()));
  }
  const Matrix& pv = p.value();
  double total = 0.0;
  for (Eigen::Index i = 0; i < pv.rows(); ++i) {
    for (Eigen::Index j = 0; j < pv.cols(); ++j) {
      if (weights(i, j) != 0.0) total -= weights(i, j) * std::log(std::max(pv(i, j), floor));
    }
  }
  const Var in[] = {p};
  return t.record(Matrix::Constant(1, 1, total), in, [p, weights, floor](Tape& tp, const Matrix& g, const Matrix&) {
    const Matrix& pv = p.value();
    Matrix gp = Matrix::Zero(pv.rows(), pv.cols());
    for (Eigen::Index i = 0; i < pv.rows(); ++i) {
      for (Eigen::Index j = 0; j < pv.cols(); ++j) {
        if (weights(i, j) != 0.0 && pv(i, j) > floor) gp(i, j) = -g(0, 0) * weights(i, j) / pv(i, j);
      }
    }
    tp.accumulate(p, gp);
  });
}

}  // namespace ad
}  // namespace urbanembed
