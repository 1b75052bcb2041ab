#include "na2q/autodiff.hpp"

#include <Eigen/Core>

#include <cmath>
#include <unordered_set>
#include <utility>

namespace na2q {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Map = Eigen::Map<RowMat>;
using CMap = Eigen::Map<const RowMat>;

CMap cmap(const Tensor& t) { return CMap(t.data.data(), t.rows(), t.cols()); }

Map gmap(Tensor& t) {
  t.ensure_grad();
  return Map(t.grad.data(), t.rows(), t.cols());
}

CMap cgmap(const Tensor& t) { return CMap(t.grad.data(), t.rows(), t.cols()); }

thread_local int g_no_grad_depth = 0;

bool any_requires_grad(const std::vector<Var>& parents) {
  for (const auto& p : parents) {
    if (p.defined() && p.requires_grad()) return true;
  }
  return false;
}

// Creates a node. Parents and pullback are kept only when gradients are being
// recorded and at least one parent needs them.
Var make_node(Tensor value, std::vector<Var> parents,
              const std::function<void(Node*)>& attach_pullback) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  if (NoGrad::enabled() && any_requires_grad(parents)) {
    node->requires_grad = true;
    node->parents.reserve(parents.size());
    for (auto& p : parents) {
      if (p.defined()) node->parents.push_back(p.node());
    }
    attach_pullback(node.get());
  }
  return Var(node);
}

void check_2d(const Tensor& t, const char* what) {
  if (t.shape.size() > 2) throw DimensionError(std::string(what) + " must be rank 1 or 2");
}

void accumulate(Node* parent, const RowMat& contribution) {
  gmap(parent->value) += contribution;
}

}  // namespace

Var Var::leaf(Tensor t, bool requires_grad) {
  auto node = std::make_shared<Node>();
  node->value = std::move(t);
  node->requires_grad = requires_grad;
  return Var(node);
}

NoGrad::NoGrad() { ++g_no_grad_depth; }
NoGrad::~NoGrad() { --g_no_grad_depth; }
bool NoGrad::enabled() { return g_no_grad_depth == 0; }

void backward(const Var& root) {
  if (!root.defined()) throw DimensionError("backward on undefined Var");
  if (root.value().size() != 1) throw DimensionError("backward requires a scalar root");
  Node* root_node = root.node().get();
  if (!root_node->requires_grad) return;

  // Post-order DFS over the requires-grad ancestry: inputs first, root last.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  struct Frame {
    Node* n;
    size_t next;
  };
  std::vector<Frame> stack{{root_node, 0}};
  visited.insert(root_node);
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next < f.n->parents.size()) {
      Node* p = f.n->parents[f.next++].get();
      if (p->requires_grad && visited.insert(p).second) stack.push_back({p, 0});
    } else {
      order.push_back(f.n);
      stack.pop_back();
    }
  }

  root_node->value.ensure_grad();
  root_node->value.grad[0] = 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->pullback && n->value.has_grad()) n->pullback();
  }
}

Var matmul(const Var& a, const Var& b) {
  const Tensor& ta = a.value();
  const Tensor& tb = b.value();
  check_2d(ta, "matmul lhs");
  check_2d(tb, "matmul rhs");
  if (ta.cols() != tb.rows()) {
    throw DimensionError("matmul: " + ta.shape_str() + " x " + tb.shape_str());
  }
  Tensor out({ta.rows(), tb.cols()});
  Map(out.data.data(), out.rows(), out.cols()).noalias() = cmap(ta) * cmap(tb);
  return make_node(std::move(out), {a, b}, [&](Node* self) {
    auto pa = a.node();
    auto pb = b.node();
    self->pullback = [self, pa, pb]() {
      CMap dy = cgmap(self->value);
      if (pa->requires_grad) accumulate(pa.get(), dy * cmap(pb->value).transpose());
      if (pb->requires_grad) accumulate(pb.get(), cmap(pa->value).transpose() * dy);
    };
  });
}

Var affine(const Var& x, const Var& w, const Var& b, WeightTransform transform) {
  const Tensor& tx = x.value();
  const Tensor& tw = w.value();
  check_2d(tx, "affine input");
  if (tw.shape.size() != 2) throw DimensionError("affine weight must be rank 2");
  if (tx.cols() != tw.rows()) {
    throw DimensionError("affine: input " + tx.shape_str() + " vs weight " + tw.shape_str());
  }
  const bool absolute = transform == WeightTransform::kAbsolute;
  if (b.defined() && b.value().size() != tw.cols()) {
    throw DimensionError("affine: bias length does not match output width");
  }

  Tensor wt;  // transformed weights, saved for the backward pass when absolute
  if (absolute) {
    wt = tw;
    for (auto& v : wt.data) v = std::abs(v);
  }
  const Tensor& weights = absolute ? wt : tw;

  Tensor out({tx.rows(), tw.cols()});
  Map om(out.data.data(), out.rows(), out.cols());
  om.noalias() = cmap(tx) * cmap(weights);
  if (b.defined()) {
    CMap bm(b.value().data.data(), 1, b.value().cols());
    om.rowwise() += bm.row(0);
  }

  std::vector<Var> parents = b.defined() ? std::vector<Var>{x, w, b} : std::vector<Var>{x, w};
  return make_node(std::move(out), parents, [&](Node* self) {
    auto px = x.node();
    auto pw = w.node();
    auto pb = b.defined() ? b.node() : nullptr;
    self->pullback = [self, px, pw, pb, absolute, wt = std::move(wt)]() {
      CMap dy = cgmap(self->value);
      if (px->requires_grad) {
        const Tensor& weights = absolute ? wt : pw->value;
        accumulate(px.get(), dy * cmap(weights).transpose());
      }
      if (pw->requires_grad) {
        RowMat g = cmap(px->value).transpose() * dy;
        if (absolute) {
          // d|w|/dw = sign(w), with the subgradient at 0 taken as 0.
          CMap wm = cmap(pw->value);
          g = g.binaryExpr(wm, [](double gi, double wi) {
            return wi > 0.0 ? gi : (wi < 0.0 ? -gi : 0.0);
          });
        }
        accumulate(pw.get(), g);
      }
      if (pb && pb->requires_grad) {
        gmap(pb->value) += dy.colwise().sum();
      }
    };
  });
}

Var gru_cell(const Var& x, const Var& h, const Var& wx, const Var& wh,
             const Var& bx, const Var& bh) {
  const Tensor& tx = x.value();
  const Tensor& th = h.value();
  const int rows = tx.rows();
  const int hid = th.cols();
  if (th.rows() != rows) throw DimensionError("gru: batch mismatch between x and h");
  if (wx.value().rows() != tx.cols() || wx.value().cols() != 3 * hid ||
      wh.value().rows() != hid || wh.value().cols() != 3 * hid ||
      bx.value().size() != 3 * hid || bh.value().size() != 3 * hid) {
    throw DimensionError("gru: parameter shapes do not match input/hidden widths");
  }

  RowMat a = cmap(tx) * cmap(wx.value());
  a.rowwise() += CMap(bx.value().data.data(), 1, 3 * hid).row(0);
  RowMat pre_h = cmap(th) * cmap(wh.value());
  pre_h.rowwise() += CMap(bh.value().data.data(), 1, 3 * hid).row(0);

  auto sigm = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  Tensor r({rows, hid}), z({rows, hid}), n({rows, hid}), g({rows, hid});
  Map rm(r.data.data(), rows, hid), zm(z.data.data(), rows, hid);
  Map nm(n.data.data(), rows, hid), gm(g.data.data(), rows, hid);
  rm = (a.leftCols(hid) + pre_h.leftCols(hid)).unaryExpr(sigm);
  zm = (a.middleCols(hid, hid) + pre_h.middleCols(hid, hid)).unaryExpr(sigm);
  gm = pre_h.rightCols(hid);
  nm = (a.rightCols(hid) + rm.cwiseProduct(gm)).array().tanh();

  Tensor out({rows, hid});
  Map(out.data.data(), rows, hid) =
      (1.0 - zm.array()) * nm.array() + zm.array() * cmap(th).array();

  return make_node(std::move(out), {x, h, wx, wh, bx, bh}, [&](Node* self) {
    auto px = x.node();
    auto ph = h.node();
    auto pwx = wx.node();
    auto pwh = wh.node();
    auto pbx = bx.node();
    auto pbh = bh.node();
    self->pullback = [self, px, ph, pwx, pwh, pbx, pbh, r = std::move(r),
                      z = std::move(z), n = std::move(n), g = std::move(g)]() {
      CMap dout = cgmap(self->value);
      CMap rm = cmap(r), zm = cmap(z), nm = cmap(n), gm = cmap(g);
      CMap hm = cmap(ph->value);
      const int rows = dout.rows();
      const int hid = dout.cols();

      RowMat dn = dout.array() * (1.0 - zm.array());
      RowMat dan = dn.array() * (1.0 - nm.array().square());
      RowMat dz = dout.array() * (hm.array() - nm.array());
      RowMat daz = dz.array() * zm.array() * (1.0 - zm.array());
      RowMat dr = dan.array() * gm.array();
      RowMat dar = dr.array() * rm.array() * (1.0 - rm.array());
      RowMat dg = dan.array() * rm.array();

      RowMat da(rows, 3 * hid), db(rows, 3 * hid);
      da.leftCols(hid) = dar;
      da.middleCols(hid, hid) = daz;
      da.rightCols(hid) = dan;
      db.leftCols(hid) = dar;
      db.middleCols(hid, hid) = daz;
      db.rightCols(hid) = dg;

      if (px->requires_grad) accumulate(px.get(), da * cmap(pwx->value).transpose());
      if (pwx->requires_grad) accumulate(pwx.get(), cmap(px->value).transpose() * da);
      if (pbx->requires_grad) gmap(pbx->value) += da.colwise().sum();
      if (ph->requires_grad) {
        accumulate(ph.get(), (db * cmap(pwh->value).transpose()).array().matrix() +
                                 (dout.array() * zm.array()).matrix());
      }
      if (pwh->requires_grad) accumulate(pwh.get(), cmap(ph->value).transpose() * db);
      if (pbh->requires_grad) gmap(pbh->value) += db.colwise().sum();
    };
  });
}

namespace {

Var binary_elementwise(const Var& a, const Var& b, const char* name,
                       double (*fwd)(double, double),
                       void (*pull)(CMap, CMap, CMap, Node*, Node*)) {
  if (!a.value().same_shape(b.value())) {
    throw DimensionError(std::string(name) + ": shape mismatch " + a.value().shape_str() +
                         " vs " + b.value().shape_str());
  }
  Tensor out(a.value().shape);
  for (int64_t i = 0; i < out.size(); ++i) out.data[i] = fwd(a.value().data[i], b.value().data[i]);
  return make_node(std::move(out), {a, b}, [&](Node* self) {
    auto pa = a.node();
    auto pb = b.node();
    self->pullback = [self, pa, pb, pull]() {
      pull(cgmap(self->value), cmap(pa->value), cmap(pb->value), pa.get(), pb.get());
    };
  });
}

}  // namespace

Var add(const Var& a, const Var& b) {
  return binary_elementwise(
      a, b, "add", [](double u, double v) { return u + v; },
      [](CMap dy, CMap, CMap, Node* pa, Node* pb) {
        if (pa->requires_grad) accumulate(pa, dy);
        if (pb->requires_grad) accumulate(pb, dy);
      });
}

Var sub(const Var& a, const Var& b) {
  return binary_elementwise(
      a, b, "sub", [](double u, double v) { return u - v; },
      [](CMap dy, CMap, CMap, Node* pa, Node* pb) {
        if (pa->requires_grad) accumulate(pa, dy);
        if (pb->requires_grad) accumulate(pb, RowMat(-dy));
      });
}

Var mul(const Var& a, const Var& b) {
  return binary_elementwise(
      a, b, "mul", [](double u, double v) { return u * v; },
      [](CMap dy, CMap av, CMap bv, Node* pa, Node* pb) {
        if (pa->requires_grad) accumulate(pa, dy.cwiseProduct(bv));
        if (pb->requires_grad) accumulate(pb, dy.cwiseProduct(av));
      });
}

namespace {

Var unary_op(const Var& x, double (*fwd)(double),
             const std::function<void(Node*, Node*)>& attach) {
  Tensor out(x.value().shape);
  for (int64_t i = 0; i < out.size(); ++i) out.data[i] = fwd(x.value().data[i]);
  return make_node(std::move(out), {x}, [&](Node* self) { attach(self, x.node().get()); });
}

}  // namespace

Var scale(const Var& a, double c) {
  Tensor out(a.value().shape);
  for (int64_t i = 0; i < out.size(); ++i) out.data[i] = a.value().data[i] * c;
  return make_node(std::move(out), {a}, [&](Node* self) {
    auto pa = a.node();
    self->pullback = [self, pa, c]() {
      if (pa->requires_grad) accumulate(pa.get(), RowMat(cgmap(self->value) * c));
    };
  });
}

Var add_scalar(const Var& a, double c) {
  Tensor out(a.value().shape);
  for (int64_t i = 0; i < out.size(); ++i) out.data[i] = a.value().data[i] + c;
  return make_node(std::move(out), {a}, [&](Node* self) {
    auto pa = a.node();
    self->pullback = [self, pa]() {
      if (pa->requires_grad) accumulate(pa.get(), RowMat(cgmap(self->value)));
    };
  });
}

Var sigmoid(const Var& x) {
  Tensor out(x.value().shape);
  for (int64_t i = 0; i < out.size(); ++i) out.data[i] = 1.0 / (1.0 + std::exp(-x.value().data[i]));
  return make_node(std::move(out), {x}, [&](Node* self) {
    auto px = x.node();
    self->pullback = [self, px]() {
      if (!px->requires_grad) return;
      CMap y = cmap(self->value);
      accumulate(px.get(), RowMat(cgmap(self->value).array() * y.array() * (1.0 - y.array())));
    };
  });
}

Var tanh_op(const Var& x) {
  Tensor out(x.value().shape);
  for (int64_t i = 0; i < out.size(); ++i) out.data[i] = std::tanh(x.value().data[i]);
  return make_node(std::move(out), {x}, [&](Node* self) {
    auto px = x.node();
    self->pullback = [self, px]() {
      if (!px->requires_grad) return;
      CMap y = cmap(self->value);
      accumulate(px.get(), RowMat(cgmap(self->value).array() * (1.0 - y.array().square())));
    };
  });
}

Var relu(const Var& x) {
  Tensor out(x.value().shape);
  for (int64_t i = 0; i < out.size(); ++i) out.data[i] = std::max(0.0, x.value().data[i]);
  return make_node(std::move(out), {x}, [&](Node* self) {
    auto px = x.node();
    self->pullback = [self, px]() {
      if (!px->requires_grad) return;
      CMap xv = cmap(px->value);
      accumulate(px.get(), RowMat(cgmap(self->value).binaryExpr(
                               xv, [](double g, double v) { return v > 0.0 ? g : 0.0; })));
    };
  });
}

Var elu(const Var& x) {
  Tensor out(x.value().shape);
  for (int64_t i = 0; i < out.size(); ++i) {
    const double v = x.value().data[i];
    out.data[i] = v > 0.0 ? v : std::expm1(v);
  }
  return make_node(std::move(out), {x}, [&](Node* self) {
    auto px = x.node();
    self->pullback = [self, px]() {
      if (!px->requires_grad) return;
      CMap xv = cmap(px->value);
      CMap y = cmap(self->value);
      RowMat d = cgmap(self->value);
      for (int i = 0; i < d.rows(); ++i) {
        for (int j = 0; j < d.cols(); ++j) {
          d(i, j) *= xv(i, j) > 0.0 ? 1.0 : y(i, j) + 1.0;
        }
      }
      accumulate(px.get(), d);
    };
  });
}

Var exp_op(const Var& x) {
  Tensor out(x.value().shape);
  for (int64_t i = 0; i < out.size(); ++i) out.data[i] = std::exp(x.value().data[i]);
  return make_node(std::move(out), {x}, [&](Node* self) {
    auto px = x.node();
    self->pullback = [self, px]() {
      if (!px->requires_grad) return;
      accumulate(px.get(), RowMat(cgmap(self->value).cwiseProduct(cmap(self->value))));
    };
  });
}

Var square(const Var& x) {
  Tensor out(x.value().shape);
  for (int64_t i = 0; i < out.size(); ++i) {
    out.data[i] = x.value().data[i] * x.value().data[i];
  }
  return make_node(std::move(out), {x}, [&](Node* self) {
    auto px = x.node();
    self->pullback = [self, px]() {
      if (!px->requires_grad) return;
      accumulate(px.get(), RowMat(2.0 * cgmap(self->value).cwiseProduct(cmap(px->value))));
    };
  });
}

Var clamp(const Var& x, double lo, double hi) {
  Tensor out(x.value().shape);
  for (int64_t i = 0; i < out.size(); ++i) {
    out.data[i] = std::min(hi, std::max(lo, x.value().data[i]));
  }
  return make_node(std::move(out), {x}, [&](Node* self) {
    auto px = x.node();
    self->pullback = [self, px, lo, hi]() {
      if (!px->requires_grad) return;
      CMap xv = cmap(px->value);
      accumulate(px.get(), RowMat(cgmap(self->value).binaryExpr(xv, [lo, hi](double g, double v) {
        return (v > lo && v < hi) ? g : 0.0;
      })));
    };
  });
}

Var softmax_rows(const Var& x) {
  const Tensor& tx = x.value();
  check_2d(tx, "softmax input");
  const int rows = tx.rows();
  const int colc = tx.cols();
  if (colc < 1) throw DimensionError("softmax requires at least one column");
  Tensor out({rows, colc});
  for (int i = 0; i < rows; ++i) {
    double mx = tx.at(i, 0);
    for (int j = 1; j < colc; ++j) mx = std::max(mx, tx.at(i, j));
    if (!std::isfinite(mx)) throw NumericError("softmax: non-finite input");
    double sum = 0.0;
    for (int j = 0; j < colc; ++j) {
      const double e = std::exp(tx.at(i, j) - mx);
      out.at(i, j) = e;
      sum += e;
    }
    for (int j = 0; j < colc; ++j) out.at(i, j) /= sum;
  }
  return make_node(std::move(out), {x}, [&](Node* self) {
    auto px = x.node();
    self->pullback = [self, px]() {
      if (!px->requires_grad) return;
      CMap p = cmap(self->value);
      CMap dy = cgmap(self->value);
      RowMat dx(p.rows(), p.cols());
      for (int i = 0; i < p.rows(); ++i) {
        const double dot = p.row(i).dot(dy.row(i));
        dx.row(i) = (p.row(i).array() * (dy.row(i).array() - dot)).matrix();
      }
      accumulate(px.get(), dx);
    };
  });
}

Var row_sum(const Var& x) {
  const Tensor& tx = x.value();
  check_2d(tx, "row_sum input");
  Tensor out({tx.rows(), 1});
  Map(out.data.data(), tx.rows(), 1) = cmap(tx).rowwise().sum();
  return make_node(std::move(out), {x}, [&](Node* self) {
    auto px = x.node();
    self->pullback = [self, px]() {
      if (!px->requires_grad) return;
      CMap dy = cgmap(self->value);
      RowMat dx = dy * RowMat::Ones(1, px->value.cols());
      accumulate(px.get(), dx);
    };
  });
}

Var sum_all(const Var& x) {
  Tensor out = Tensor::scalar(0.0);
  double s = 0.0;
  for (double v : x.value().data) s += v;
  out.data[0] = s;
  return make_node(std::move(out), {x}, [&](Node* self) {
    auto px = x.node();
    self->pullback = [self, px]() {
      if (!px->requires_grad) return;
      const double g = self->value.grad[0];
      accumulate(px.get(), RowMat::Constant(px->value.rows(), px->value.cols(), g));
    };
  });
}

Var mul_const(const Var& x, Tensor c) {
  if (!x.value().same_shape(c)) throw DimensionError("mul_const: shape mismatch");
  Tensor out(x.value().shape);
  for (int64_t i = 0; i < out.size(); ++i) out.data[i] = x.value().data[i] * c.data[i];
  return make_node(std::move(out), {x}, [&](Node* self) {
    auto px = x.node();
    self->pullback = [self, px, c = std::move(c)]() {
      if (!px->requires_grad) return;
      accumulate(px.get(), RowMat(cgmap(self->value).cwiseProduct(cmap(c))));
    };
  });
}

Var dot_const(const Var& x, Tensor c) {
  if (!x.value().same_shape(c)) throw DimensionError("dot_const: shape mismatch");
  double s = 0.0;
  for (int64_t i = 0; i < x.value().size(); ++i) s += x.value().data[i] * c.data[i];
  return make_node(Tensor::scalar(s), {x}, [&](Node* self) {
    auto px = x.node();
    self->pullback = [self, px, c = std::move(c)]() {
      if (!px->requires_grad) return;
      const double g = self->value.grad[0];
      accumulate(px.get(), RowMat(g * cmap(c)));
    };
  });
}

Var gather_cols(const Var& x, std::vector<int> idx) {
  const Tensor& tx = x.value();
  check_2d(tx, "gather input");
  if (static_cast<int>(idx.size()) != tx.rows()) {
    throw DimensionError("gather_cols: one index per row required");
  }
  Tensor out({tx.rows(), 1});
  for (int i = 0; i < tx.rows(); ++i) {
    if (idx[i] < 0 || idx[i] >= tx.cols()) throw DimensionError("gather_cols: index out of range");
    out.data[i] = tx.at(i, idx[i]);
  }
  return make_node(std::move(out), {x}, [&](Node* self) {
    auto px = x.node();
    self->pullback = [self, px, idx = std::move(idx)]() {
      if (!px->requires_grad) return;
      px->value.ensure_grad();
      const int c = px->value.cols();
      for (size_t i = 0; i < idx.size(); ++i) {
        px->value.grad[i * c + idx[i]] += self->value.grad[i];
      }
    };
  });
}

Var select_cols(const Var& x, std::vector<int> cols) {
  const Tensor& tx = x.value();
  check_2d(tx, "select input");
  const int k = static_cast<int>(cols.size());
  Tensor out({tx.rows(), k});
  for (int j = 0; j < k; ++j) {
    if (cols[j] < 0 || cols[j] >= tx.cols()) throw DimensionError("select_cols: column out of range");
  }
  for (int i = 0; i < tx.rows(); ++i) {
    for (int j = 0; j < k; ++j) out.at(i, j) = tx.at(i, cols[j]);
  }
  return make_node(std::move(out), {x}, [&](Node* self) {
    auto px = x.node();
    self->pullback = [self, px, cols = std::move(cols)]() {
      if (!px->requires_grad) return;
      px->value.ensure_grad();
      const int c = px->value.cols();
      const int k = static_cast<int>(cols.size());
      for (int i = 0; i < px->value.rows(); ++i) {
        for (int j = 0; j < k; ++j) {
          px->value.grad[static_cast<size_t>(i) * c + cols[j]] += self->value.grad[static_cast<size_t>(i) * k + j];
        }
      }
    };
  });
}

Var concat_rows(const std::vector<Var>& parts) {
  if (parts.empty()) throw DimensionError("concat_rows: no parts");
  const int c = parts[0].value().cols();
  int total = 0;
  for (const auto& p : parts) {
    if (p.value().cols() != c) throw DimensionError("concat_rows: column mismatch");
    total += p.value().rows();
  }
  Tensor out({total, c});
  int64_t offset = 0;
  for (const auto& p : parts) {
    const auto& d = p.value().data;
    std::copy(d.begin(), d.end(), out.data.begin() + offset);
    offset += d.size();
  }
  return make_node(std::move(out), parts, [&](Node* self) {
    std::vector<std::shared_ptr<Node>> ps;
    ps.reserve(parts.size());
    for (const auto& p : parts) ps.push_back(p.node());
    self->pullback = [self, ps = std::move(ps)]() {
      int64_t offset = 0;
      for (const auto& p : ps) {
        const int64_t n = p->value.size();
        if (p->requires_grad) {
          p->value.ensure_grad();
          for (int64_t i = 0; i < n; ++i) p->value.grad[i] += self->value.grad[offset + i];
        }
        offset += n;
      }
    };
  });
}

Var concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw DimensionError("concat_cols: no parts");
  const int r = parts[0].value().rows();
  int total = 0;
  for (const auto& p : parts) {
    if (p.value().rows() != r) throw DimensionError("concat_cols: row mismatch");
    total += p.value().cols();
  }
  Tensor out({r, total});
  int col0 = 0;
  for (const auto& p : parts) {
    const int pc = p.value().cols();
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < pc; ++j) out.at(i, col0 + j) = p.value().at(i, j);
    }
    col0 += pc;
  }
  return make_node(std::move(out), parts, [&](Node* self) {
    std::vector<std::shared_ptr<Node>> ps;
    ps.reserve(parts.size());
    for (const auto& p : parts) ps.push_back(p.node());
    self->pullback = [self, ps = std::move(ps)]() {
      const int total = self->value.cols();
      const int r = self->value.rows();
      int col0 = 0;
      for (const auto& p : ps) {
        const int pc = p->value.cols();
        if (p->requires_grad) {
          p->value.ensure_grad();
          for (int i = 0; i < r; ++i) {
            for (int j = 0; j < pc; ++j) {
              p->value.grad[static_cast<size_t>(i) * pc + j] +=
                  self->value.grad[static_cast<size_t>(i) * total + col0 + j];
            }
          }
        }
        col0 += pc;
      }
    };
  });
}

Var reshape(const Var& x, std::vector<int> shape) {
  if (Tensor::element_count(shape) != x.value().size()) {
    throw DimensionError("reshape: element count mismatch");
  }
  Tensor out(std::move(shape), x.value().data);
  return make_node(std::move(out), {x}, [&](Node* self) {
    auto px = x.node();
    self->pullback = [self, px]() {
      if (!px->requires_grad) return;
      px->value.ensure_grad();
      for (int64_t i = 0; i < px->value.size(); ++i) px->value.grad[i] += self->value.grad[i];
    };
  });
}

}  // namespace na2q
