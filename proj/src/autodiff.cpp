#include "drugclip/autodiff.hpp"

#include <cmath>
#include <string>

namespace drugclip {

void Tape::backward(Var loss) {
  if (!grad_enabled_) {
    throw Error(ErrorKind::NoTape, "backward called on a tape with gradients disabled");
  }
  if (loss.tape != this || loss.id >= nodes_.size()) {
    throw Error(ErrorKind::NoTape, "loss was not produced under this tape");
  }
  if (!nodes_[loss.id].value.is_scalar()) {
    throw Error(ErrorKind::ShapeMismatch,
                "backward expects a scalar loss, got " + nodes_[loss.id].value.shape_string());
  }
  nodes_[loss.id].grad[0] = 1.0;
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    if (nodes_[i].backward) nodes_[i].backward(*this);
  }
}

namespace ag {
namespace {

Tape& tape_of(Var v) {
  if (v.tape == nullptr) throw Error(ErrorKind::NoTape, "op on a default-constructed Var");
  return *v.tape;
}

void check_same_tape(Var a, Var b) {
  if (a.tape != b.tape) throw Error(ErrorKind::NoTape, "operands recorded on different tapes");
}

Var finish(Tape& tape, Tensor out, BackwardFn fn, const char* op) {
  if (!out.all_finite()) {
    throw Error(ErrorKind::NumericalError, std::string(op) + " produced a non-finite value");
  }
  if (!tape.grad_enabled()) return tape.push(std::move(out));
  return tape.push(std::move(out), std::move(fn));
}

void require(bool ok, const char* op, const std::string& detail) {
  if (!ok) throw Error(ErrorKind::ShapeMismatch, std::string(op) + ": " + detail);
}

}  // namespace

Var constant(Tape& tape, Tensor value) { return tape.push(std::move(value)); }

Var add(Var a, Var b) {
  check_same_tape(a, b);
  Tape& t = tape_of(a);
  const Tensor& x = t.value(a);
  const Tensor& y = t.value(b);
  require(x.same_shape(y), "add", x.shape_string() + " vs " + y.shape_string());
  Tensor out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += y[i];
  std::size_t self = t.size(), ai = a.id, bi = b.id;
  return finish(t, std::move(out), [self, ai, bi](Tape& tp) {
    const Tensor& gr = tp.grad_ref(self);
    Tensor& ga = tp.grad_ref(ai);
    Tensor& gb = tp.grad_ref(bi);
    for (std::size_t i = 0; i < gr.size(); ++i) {
      ga[i] += gr[i];
      gb[i] += gr[i];
    }
  }, "add");
}

Var sub(Var a, Var b) {
  check_same_tape(a, b);
  Tape& t = tape_of(a);
  const Tensor& x = t.value(a);
  const Tensor& y = t.value(b);
  require(x.same_shape(y), "sub", x.shape_string() + " vs " + y.shape_string());
  Tensor out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= y[i];
  std::size_t self = t.size(), ai = a.id, bi = b.id;
  return finish(t, std::move(out), [self, ai, bi](Tape& tp) {
    const Tensor& gr = tp.grad_ref(self);
    Tensor& ga = tp.grad_ref(ai);
    Tensor& gb = tp.grad_ref(bi);
    for (std::size_t i = 0; i < gr.size(); ++i) {
      ga[i] += gr[i];
      gb[i] -= gr[i];
    }
  }, "sub");
}

Var mul(Var a, Var b) {
  check_same_tape(a, b);
  Tape& t = tape_of(a);
  const Tensor& x = t.value(a);
  const Tensor& y = t.value(b);
  require(x.same_shape(y), "mul", x.shape_string() + " vs " + y.shape_string());
  Tensor out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= y[i];
  std::size_t self = t.size(), ai = a.id, bi = b.id;
  return finish(t, std::move(out), [self, ai, bi](Tape& tp) {
    const Tensor& gr = tp.grad_ref(self);
    const Tensor& x = tp.value(ai);
    const Tensor& y = tp.value(bi);
    Tensor& ga = tp.grad_ref(ai);
    Tensor& gb = tp.grad_ref(bi);
    for (std::size_t i = 0; i < gr.size(); ++i) {
      ga[i] += gr[i] * y[i];
      gb[i] += gr[i] * x[i];
    }
  }, "mul");
}

Var scale_const(Var a, double c) {
  Tape& t = tape_of(a);
  Tensor out = t.value(a);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= c;
  std::size_t self = t.size(), ai = a.id;
  return finish(t, std::move(out), [self, ai, c](Tape& tp) {
    const Tensor& gr = tp.grad_ref(self);
    Tensor& ga = tp.grad_ref(ai);
    for (std::size_t i = 0; i < gr.size(); ++i) ga[i] += gr[i] * c;
  }, "scale_const");
}

Var scale(Var s, Var v) {
  check_same_tape(s, v);
  Tape& t = tape_of(s);
  const Tensor& sv = t.value(s);
  require(sv.is_scalar(), "scale", "first operand must be scalar, got " + sv.shape_string());
  double c = sv[0];
  Tensor out = t.value(v);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= c;
  std::size_t self = t.size(), si = s.id, vi = v.id;
  return finish(t, std::move(out), [self, si, vi](Tape& tp) {
    const Tensor& gr = tp.grad_ref(self);
    const Tensor& vv = tp.value(vi);
    double c = tp.value(si)[0];
    Tensor& gs = tp.grad_ref(si);
    Tensor& gv = tp.grad_ref(vi);
    for (std::size_t i = 0; i < gr.size(); ++i) {
      gs[0] += gr[i] * vv[i];
      gv[i] += gr[i] * c;
    }
  }, "scale");
}

Var matvec(Var w, Var x) {
  check_same_tape(w, x);
  Tape& t = tape_of(w);
  const Tensor& wv = t.value(w);
  const Tensor& xv = t.value(x);
  require(wv.is_matrix() && xv.is_vector(), "matvec",
          wv.shape_string() + " vs " + xv.shape_string());
  require(wv.cols() == xv.rows(), "matvec", wv.shape_string() + " . " + xv.shape_string());
  Tensor out = Tensor::vector(wv.rows());
  for (std::size_t r = 0; r < wv.rows(); ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < wv.cols(); ++c) s += wv.at(r, c) * xv[c];
    out[r] = s;
  }
  std::size_t self = t.size(), wi = w.id, xi = x.id;
  return finish(t, std::move(out), [self, wi, xi](Tape& tp) {
    const Tensor& gr = tp.grad_ref(self);
    const Tensor& wv = tp.value(wi);
    const Tensor& xv = tp.value(xi);
    Tensor& gw = tp.grad_ref(wi);
    Tensor& gx = tp.grad_ref(xi);
    for (std::size_t r = 0; r < wv.rows(); ++r) {
      double g = gr[r];
      for (std::size_t c = 0; c < wv.cols(); ++c) {
        gw.at(r, c) += g * xv[c];
        gx[c] += g * wv.at(r, c);
      }
    }
  }, "matvec");
}

Var linear(Var w, Var b, Var x) {
  Var wx = matvec(w, x);
  return add(wx, b);
}

Var concat(std::span<const Var> parts) {
  require(!parts.empty(), "concat", "no inputs");
  Tape& t = tape_of(parts[0]);
  std::size_t total = 0;
  for (Var p : parts) {
    check_same_tape(parts[0], p);
    require(t.value(p).is_vector(), "concat", "inputs must be vectors");
    total += t.value(p).size();
  }
  Tensor out = Tensor::vector(total);
  std::vector<std::size_t> ids;
  ids.reserve(parts.size());
  std::size_t off = 0;
  for (Var p : parts) {
    const Tensor& v = t.value(p);
    for (std::size_t i = 0; i < v.size(); ++i) out[off + i] = v[i];
    off += v.size();
    ids.push_back(p.id);
  }
  std::size_t self = t.size();
  return finish(t, std::move(out), [self, ids](Tape& tp) {
    const Tensor& gr = tp.grad_ref(self);
    std::size_t off = 0;
    for (std::size_t id : ids) {
      Tensor& g = tp.grad_ref(id);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += gr[off + i];
      off += g.size();
    }
  }, "concat");
}

Var sum(std::span<const Var> terms) {
  require(!terms.empty(), "sum", "no inputs");
  Tape& t = tape_of(terms[0]);
  Tensor out = t.value(terms[0]);
  std::vector<std::size_t> ids{terms[0].id};
  for (std::size_t k = 1; k < terms.size(); ++k) {
    check_same_tape(terms[0], terms[k]);
    const Tensor& v = t.value(terms[k]);
    require(out.same_shape(v), "sum", out.shape_string() + " vs " + v.shape_string());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i];
    ids.push_back(terms[k].id);
  }
  std::size_t self = t.size();
  return finish(t, std::move(out), [self, ids](Tape& tp) {
    const Tensor& gr = tp.grad_ref(self);
    for (std::size_t id : ids) {
      Tensor& g = tp.grad_ref(id);
      for (std::size_t i = 0; i < gr.size(); ++i) g[i] += gr[i];
    }
  }, "sum");
}

Var mean(std::span<const Var> terms) {
  Var total = sum(terms);
  return scale_const(total, 1.0 / static_cast<double>(terms.size()));
}

namespace {

template <typename Fwd, typename Bwd>
Var elementwise(Var x, Fwd fwd, Bwd bwd, const char* op) {
  Tape& t = tape_of(x);
  Tensor out = t.value(x);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(out[i]);
  std::size_t self = t.size(), xi = x.id;
  return finish(t, std::move(out), [self, xi, bwd](Tape& tp) {
    const Tensor& gr = tp.grad_ref(self);
    const Tensor& xv = tp.value(xi);
    const Tensor& yv = tp.value(self);
    Tensor& gx = tp.grad_ref(xi);
    for (std::size_t i = 0; i < gr.size(); ++i) gx[i] += gr[i] * bwd(xv[i], yv[i]);
  }, op);
}

}  // namespace

Var relu(Var x) {
  return elementwise(
      x, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double xv, double) { return xv > 0.0 ? 1.0 : 0.0; }, "relu");
}

Var tanh(Var x) {
  return elementwise(
      x, [](double v) { return std::tanh(v); },
      [](double, double yv) { return 1.0 - yv * yv; }, "tanh");
}

Var sigmoid(Var x) {
  return elementwise(
      x, [](double v) { return 1.0 / (1.0 + std::exp(-v)); },
      [](double, double yv) { return yv * (1.0 - yv); }, "sigmoid");
}

Var log(Var x) {
  return elementwise(
      x, [](double v) { return std::log(v); },
      [](double xv, double) { return 1.0 / xv; }, "log");
}

Var softmax(Var x) {
  Tape& t = tape_of(x);
  const Tensor& xv = t.value(x);
  require(xv.is_vector() && xv.size() > 0, "softmax", "expects a non-empty vector");
  double hi = xv[0];
  for (std::size_t i = 1; i < xv.size(); ++i) hi = std::max(hi, xv[i]);
  Tensor out = Tensor::vector(xv.size());
  double z = 0.0;
  for (std::size_t i = 0; i < xv.size(); ++i) {
    out[i] = std::exp(xv[i] - hi);
    z += out[i];
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i] /= z;
  std::size_t self = t.size(), xi = x.id;
  return finish(t, std::move(out), [self, xi](Tape& tp) {
    const Tensor& gr = tp.grad_ref(self);
    const Tensor& y = tp.value(self);
    Tensor& gx = tp.grad_ref(xi);
    double inner = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) inner += gr[i] * y[i];
    for (std::size_t i = 0; i < y.size(); ++i) gx[i] += y[i] * (gr[i] - inner);
  }, "softmax");
}

Var dot(Var u, Var v) {
  check_same_tape(u, v);
  Tape& t = tape_of(u);
  const Tensor& uv = t.value(u);
  const Tensor& vv = t.value(v);
  require(uv.same_shape(vv), "dot", uv.shape_string() + " vs " + vv.shape_string());
  double s = 0.0;
  for (std::size_t i = 0; i < uv.size(); ++i) s += uv[i] * vv[i];
  std::size_t self = t.size(), ui = u.id, vi = v.id;
  return finish(t, Tensor::scalar(s), [self, ui, vi](Tape& tp) {
    double g = tp.grad_ref(self)[0];
    const Tensor& uv = tp.value(ui);
    const Tensor& vv = tp.value(vi);
    Tensor& gu = tp.grad_ref(ui);
    Tensor& gv = tp.grad_ref(vi);
    for (std::size_t i = 0; i < uv.size(); ++i) {
      gu[i] += g * vv[i];
      gv[i] += g * uv[i];
    }
  }, "dot");
}

Var cosine(Var u, Var v) {
  check_same_tape(u, v);
  Tape& t = tape_of(u);
  const Tensor& uv = t.value(u);
  const Tensor& vv = t.value(v);
  require(uv.same_shape(vv), "cosine", uv.shape_string() + " vs " + vv.shape_string());
  constexpr double kFloor = 1e-12;
  double nu = std::max(l2_norm(uv), kFloor);
  double nv = std::max(l2_norm(vv), kFloor);
  bool u_clamped = l2_norm(uv) < kFloor;
  bool v_clamped = l2_norm(vv) < kFloor;
  double c = dot_product(uv, vv) / (nu * nv);
  std::size_t self = t.size(), ui = u.id, vi = v.id;
  return finish(t, Tensor::scalar(c),
                [self, ui, vi, nu, nv, c, u_clamped, v_clamped](Tape& tp) {
    double g = tp.grad_ref(self)[0];
    const Tensor& uv = tp.value(ui);
    const Tensor& vv = tp.value(vi);
    Tensor& gu = tp.grad_ref(ui);
    Tensor& gv = tp.grad_ref(vi);
    for (std::size_t i = 0; i < uv.size(); ++i) {
      double du = vv[i] / (nu * nv);
      double dv = uv[i] / (nu * nv);
      // clamped norms are constants, so the norm term drops out
      if (!u_clamped) du -= c * uv[i] / (nu * nu);
      if (!v_clamped) dv -= c * vv[i] / (nv * nv);
      gu[i] += g * du;
      gv[i] += g * dv;
    }
  }, "cosine");
}

Var sum_elements(Var x) {
  Tape& t = tape_of(x);
  const Tensor& xv = t.value(x);
  double s = 0.0;
  for (std::size_t i = 0; i < xv.size(); ++i) s += xv[i];
  std::size_t self = t.size(), xi = x.id;
  return finish(t, Tensor::scalar(s), [self, xi](Tape& tp) {
    double g = tp.grad_ref(self)[0];
    Tensor& gx = tp.grad_ref(xi);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g;
  }, "sum_elements");
}

Var element(Var v, std::size_t i) {
  Tape& t = tape_of(v);
  const Tensor& vv = t.value(v);
  require(i < vv.size(), "element", "index out of range");
  std::size_t self = t.size(), vi = v.id;
  return finish(t, Tensor::scalar(vv[i]), [self, vi, i](Tape& tp) {
    tp.grad_ref(vi)[i] += tp.grad_ref(self)[0];
  }, "element");
}

Var row(Var m, std::size_t r) {
  Tape& t = tape_of(m);
  const Tensor& mv = t.value(m);
  require(mv.is_matrix(), "row", "expects a matrix, got " + mv.shape_string());
  require(r < mv.rows(), "row", "row index out of range");
  Tensor out = Tensor::vector(mv.cols());
  for (std::size_t c = 0; c < mv.cols(); ++c) out[c] = mv.at(r, c);
  std::size_t self = t.size(), mi = m.id;
  return finish(t, std::move(out), [self, mi, r](Tape& tp) {
    const Tensor& gr = tp.grad_ref(self);
    Tensor& gm = tp.grad_ref(mi);
    for (std::size_t c = 0; c < gr.size(); ++c) gm.at(r, c) += gr[c];
  }, "row");
}

Var stack_rows(std::span<const Var> rows) {
  require(!rows.empty(), "stack_rows", "no inputs");
  Tape& t = tape_of(rows[0]);
  std::size_t cols = t.value(rows[0]).size();
  Tensor out = Tensor::matrix(rows.size(), cols);
  std::vector<std::size_t> ids;
  ids.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    check_same_tape(rows[0], rows[r]);
    const Tensor& v = t.value(rows[r]);
    require(v.is_vector() && v.size() == cols, "stack_rows", "rows must be equal-length vectors");
    for (std::size_t c = 0; c < cols; ++c) out.at(r, c) = v[c];
    ids.push_back(rows[r].id);
  }
  std::size_t self = t.size();
  return finish(t, std::move(out), [self, ids, cols](Tape& tp) {
    const Tensor& gr = tp.grad_ref(self);
    for (std::size_t r = 0; r < ids.size(); ++r) {
      Tensor& g = tp.grad_ref(ids[r]);
      for (std::size_t c = 0; c < cols; ++c) g[c] += gr.at(r, c);
    }
  }, "stack_rows");
}

Var bce_mean(Var scores, const Tensor& labels) {
  Tape& t = tape_of(scores);
  const Tensor& s = t.value(scores);
  require(s.same_shape(labels), "bce_mean", s.shape_string() + " vs " + labels.shape_string());
  require(s.size() > 0, "bce_mean", "empty input");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    require(labels[i] == 0.0 || labels[i] == 1.0, "bce_mean", "labels must be binary");
  }
  constexpr double kFloor = 1e-12;
  double n = static_cast<double>(s.size());
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    double p = 1.0 / (1.0 + std::exp(-s[i]));
    total -= labels[i] * std::log(std::max(p, kFloor)) +
             (1.0 - labels[i]) * std::log(std::max(1.0 - p, kFloor));
  }
  std::size_t self = t.size(), si = scores.id;
  Tensor y = labels;
  return finish(t, Tensor::scalar(total / n), [self, si, y, n](Tape& tp) {
    constexpr double kFloor = 1e-12;
    double g = tp.grad_ref(self)[0];
    const Tensor& s = tp.value(si);
    Tensor& gs = tp.grad_ref(si);
    for (std::size_t i = 0; i < s.size(); ++i) {
      double p = 1.0 / (1.0 + std::exp(-s[i]));
      // where the log floor clamps, that term's derivative is zero
      double d = 0.0;
      if (p > kFloor) d += -y[i] * (1.0 - p);
      if (1.0 - p > kFloor) d += (1.0 - y[i]) * p;
      gs[i] += g * d / n;
    }
  }, "bce_mean");
}

}  // namespace ag
}  // namespace drugclip
