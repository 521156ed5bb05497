#include "ircx/tensor.h"

#include <cmath>

#include "ircx/errors.h"

namespace ircx::ad {

int Tape::leaf(Mat value) { return push(std::move(value), nullptr); }

int Tape::push(Mat value, std::function<void(Tape&, int)> back) {
  Node n;
  n.value = std::move(value);
  n.grad = Mat::Zero(n.value.rows(), n.value.cols());
  n.backward = std::move(back);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

void Tape::backward(int root) {
  if (nodes_[root].value.size() != 1)
    throw ArgumentError("backward: root must be a scalar");
  nodes_[root].grad(0, 0) = 1.0;
  for (int id = root; id >= 0; --id) {
    if (nodes_[id].backward && nodes_[id].grad.cwiseAbs().sum() != 0.0)
      nodes_[id].backward(*this, id);
  }
}

int matmul(Tape& t, int x, int w) {
  Mat v = t.val(x) * t.val(w);
  return t.push(std::move(v), [x, w](Tape& t, int self) {
    const Mat& g = t.grad(self);
    t.grad(x).noalias() += g * t.val(w).transpose();
    t.grad(w).noalias() += t.val(x).transpose() * g;
  });
}

int add_bias(Tape& t, int x, int b) {
  if (t.val(b).rows() != 1 || t.val(b).cols() != t.val(x).cols())
    throw ArgumentError("add_bias: bias must be 1 x cols(x)");
  Mat v = t.val(x).rowwise() + t.val(b).row(0);
  return t.push(std::move(v), [x, b](Tape& t, int self) {
    t.grad(x) += t.grad(self);
    t.grad(b).row(0) += t.grad(self).colwise().sum();
  });
}

int add(Tape& t, int a, int b) {
  Mat v = t.val(a) + t.val(b);
  return t.push(std::move(v), [a, b](Tape& t, int self) {
    t.grad(a) += t.grad(self);
    t.grad(b) += t.grad(self);
  });
}

int sub(Tape& t, int a, int b) {
  Mat v = t.val(a) - t.val(b);
  return t.push(std::move(v), [a, b](Tape& t, int self) {
    t.grad(a) += t.grad(self);
    t.grad(b) -= t.grad(self);
  });
}

int mul(Tape& t, int a, int b) {
  Mat v = t.val(a).cwiseProduct(t.val(b));
  return t.push(std::move(v), [a, b](Tape& t, int self) {
    t.grad(a) += t.grad(self).cwiseProduct(t.val(b));
    t.grad(b) += t.grad(self).cwiseProduct(t.val(a));
  });
}

int row_scale(Tape& t, int x, int s) {
  if (t.val(s).cols() != 1 || t.val(s).rows() != t.val(x).rows())
    throw ArgumentError("row_scale: scaler must be (rows(x) x 1)");
  Mat v = t.val(x).array().colwise() * t.val(s).col(0).array();
  return t.push(std::move(v), [x, s](Tape& t, int self) {
    const Mat& g = t.grad(self);
    t.grad(x).array() += g.array().colwise() * t.val(s).col(0).array();
    t.grad(s).col(0) += g.cwiseProduct(t.val(x)).rowwise().sum();
  });
}

int scale(Tape& t, int x, double c) {
  Mat v = t.val(x) * c;
  return t.push(std::move(v), [x, c](Tape& t, int self) {
    t.grad(x) += t.grad(self) * c;
  });
}

int add_const(Tape& t, int x, double c) {
  Mat v = t.val(x).array() + c;
  return t.push(std::move(v), [x](Tape& t, int self) {
    t.grad(x) += t.grad(self);
  });
}

int neg(Tape& t, int x) { return scale(t, x, -1.0); }

int relu(Tape& t, int x) {
  Mat v = t.val(x).cwiseMax(0.0);
  return t.push(std::move(v), [x](Tape& t, int self) {
    t.grad(x).array() +=
        t.grad(self).array() * (t.val(x).array() > 0.0).cast<double>();
  });
}

int softplus(Tape& t, int x) {
  // log(1+exp(x)), stable form x_+ + log1p(exp(-|x|)).
  Mat v = t.val(x).unaryExpr([](double a) {
    return std::max(a, 0.0) + std::log1p(std::exp(-std::abs(a)));
  });
  return t.push(std::move(v), [x](Tape& t, int self) {
    t.grad(x).array() +=
        t.grad(self).array() /
        (1.0 + (-t.val(x).array()).exp());
  });
}

int exp_op(Tape& t, int x) {
  Mat v = t.val(x).array().exp();
  return t.push(std::move(v), [x](Tape& t, int self) {
    t.grad(x).array() += t.grad(self).array() * t.val(self).array();
  });
}

int concat_cols(Tape& t, int a, int b) {
  if (t.val(a).rows() != t.val(b).rows())
    throw ArgumentError("concat_cols: row mismatch");
  Mat v(t.val(a).rows(), t.val(a).cols() + t.val(b).cols());
  v << t.val(a), t.val(b);
  const int ca = static_cast<int>(t.val(a).cols());
  return t.push(std::move(v), [a, b, ca](Tape& t, int self) {
    const Mat& g = t.grad(self);
    t.grad(a) += g.leftCols(ca);
    t.grad(b) += g.rightCols(g.cols() - ca);
  });
}

int slice_cols(Tape& t, int x, int c0, int ncols) {
  Mat v = t.val(x).middleCols(c0, ncols);
  return t.push(std::move(v), [x, c0, ncols](Tape& t, int self) {
    t.grad(x).middleCols(c0, ncols) += t.grad(self);
  });
}

int sum_all(Tape& t, int x) {
  Mat v(1, 1);
  v(0, 0) = t.val(x).sum();
  return t.push(std::move(v), [x](Tape& t, int self) {
    t.grad(x).array() += t.grad(self)(0, 0);
  });
}

int mean_all(Tape& t, int x) {
  const double n = static_cast<double>(t.val(x).size());
  Mat v(1, 1);
  v(0, 0) = t.val(x).sum() / n;
  return t.push(std::move(v), [x, n](Tape& t, int self) {
    t.grad(x).array() += t.grad(self)(0, 0) / n;
  });
}

int gather_rows(Tape& t, int x, std::shared_ptr<const std::vector<int>> idx) {
  const Mat& src = t.val(x);
  Mat v(static_cast<int>(idx->size()), src.cols());
  for (int r = 0; r < v.rows(); ++r) v.row(r) = src.row((*idx)[r]);
  return t.push(std::move(v), [x, idx](Tape& t, int self) {
    const Mat& g = t.grad(self);
    Mat& gx = t.grad(x);
    for (int r = 0; r < g.rows(); ++r) gx.row((*idx)[r]) += g.row(r);
  });
}

int group_softmax(Tape& t, int x, int group) {
  const Mat& src = t.val(x);
  if (src.rows() % group != 0)
    throw ArgumentError("group_softmax: rows not divisible by group");
  Mat v(src.rows(), src.cols());
  const int n = static_cast<int>(src.rows()) / group;
  for (int i = 0; i < n; ++i) {
    auto blk = src.middleRows(i * group, group);
    Eigen::RowVectorXd mx = blk.colwise().maxCoeff();
    Mat e = (blk.rowwise() - mx).array().exp();
    Eigen::RowVectorXd s = e.colwise().sum();
    v.middleRows(i * group, group) = e.array().rowwise() / s.array();
  }
  return t.push(std::move(v), [x, group](Tape& t, int self) {
    const Mat& y = t.val(self);
    const Mat& g = t.grad(self);
    Mat& gx = t.grad(x);
    const int n = static_cast<int>(y.rows()) / group;
    for (int i = 0; i < n; ++i) {
      auto yb = y.middleRows(i * group, group);
      auto gb = g.middleRows(i * group, group);
      Eigen::RowVectorXd dot = (yb.array() * gb.array()).colwise().sum();
      gx.middleRows(i * group, group).array() +=
          yb.array() * (gb.array().rowwise() - dot.array());
    }
  });
}

int group_sum(Tape& t, int x, int group) {
  const Mat& src = t.val(x);
  if (src.rows() % group != 0)
    throw ArgumentError("group_sum: rows not divisible by group");
  const int n = static_cast<int>(src.rows()) / group;
  Mat v(n, src.cols());
  for (int i = 0; i < n; ++i)
    v.row(i) = src.middleRows(i * group, group).colwise().sum();
  return t.push(std::move(v), [x, group](Tape& t, int self) {
    const Mat& g = t.grad(self);
    Mat& gx = t.grad(x);
    for (int i = 0; i < g.rows(); ++i)
      gx.middleRows(i * group, group).rowwise() += g.row(i);
  });
}

int group_max(Tape& t, int x, int group) {
  const Mat& src = t.val(x);
  if (src.rows() % group != 0)
    throw ArgumentError("group_max: rows not divisible by group");
  const int n = static_cast<int>(src.rows()) / group;
  Mat v(n, src.cols());
  auto argmax = std::make_shared<std::vector<int>>(n * src.cols());
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < src.cols(); ++c) {
      int best = 0;
      double bv = src(i * group, c);
      for (int j = 1; j < group; ++j) {
        const double cv = src(i * group + j, c);
        if (cv > bv) {
          bv = cv;
          best = j;
        }
      }
      v(i, c) = bv;
      (*argmax)[i * src.cols() + c] = best;
    }
  }
  return t.push(std::move(v), [x, group, argmax](Tape& t, int self) {
    const Mat& g = t.grad(self);
    Mat& gx = t.grad(x);
    for (int i = 0; i < g.rows(); ++i)
      for (int c = 0; c < g.cols(); ++c)
        gx(i * group + (*argmax)[i * g.cols() + c], c) += g(i, c);
  });
}

int clamped_l1_mean(Tape& t, int pred, const Eigen::VectorXd& gt, double clamp) {
  const Mat& p = t.val(pred);
  if (p.cols() != 1 || p.rows() != gt.size())
    throw ArgumentError("clamped_l1_mean: pred must be (n x 1) matching gt");
  const int n = static_cast<int>(gt.size());
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    acc += std::abs(std::min(p(i, 0), clamp) - std::min(gt(i), clamp));
  Mat v(1, 1);
  v(0, 0) = acc / n;
  Eigen::VectorXd gtc = gt;
  return t.push(std::move(v), [pred, gtc, clamp, n](Tape& t, int self) {
    const double go = t.grad(self)(0, 0) / n;
    const Mat& p = t.val(pred);
    Mat& gp = t.grad(pred);
    for (int i = 0; i < n; ++i) {
      if (p(i, 0) >= clamp) continue;  // saturated: zero gradient
      const double d = p(i, 0) - std::min(gtc(i), clamp);
      gp(i, 0) += go * (d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0));
    }
  });
}

int cross_entropy_mean(Tape& t, int logits,
                       std::shared_ptr<const std::vector<int>> labels) {
  const Mat& z = t.val(logits);
  const int n = static_cast<int>(z.rows());
  const int c = static_cast<int>(z.cols());
  if (static_cast<int>(labels->size()) != n)
    throw ArgumentError("cross_entropy_mean: label count mismatch");
  for (int l : *labels)
    if (l < 0 || l >= c) throw ArgumentError("cross_entropy_mean: label out of range");
  // Cache softmax for the backward pass.
  auto sm = std::make_shared<Mat>(n, c);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double mx = z.row(i).maxCoeff();
    Eigen::RowVectorXd e = (z.row(i).array() - mx).exp();
    const double s = e.sum();
    sm->row(i) = e / s;
    acc -= (z(i, (*labels)[i]) - mx - std::log(s));
  }
  Mat v(1, 1);
  v(0, 0) = acc / n;
  return t.push(std::move(v), [logits, labels, sm, n](Tape& t, int self) {
    const double go = t.grad(self)(0, 0) / n;
    Mat& g = t.grad(logits);
    g += go * (*sm);
    for (int i = 0; i < n; ++i) g(i, (*labels)[i]) -= go;
  });
}

}  // namespace ircx::ad
