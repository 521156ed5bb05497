#pragma once

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <vector>

namespace ircx::ad {

using Mat = Eigen::MatrixXd;

// Reverse-mode tape over dense double matrices. Each op appends a node whose
// backward closure scatters the node's gradient into its inputs. Built per
// forward pass; ids are indices into the tape.
class Tape {
 public:
  int leaf(Mat value);

  const Mat& val(int id) const { return nodes_[id].value; }
  Mat& grad(int id) { return nodes_[id].grad; }
  int size() const { return static_cast<int>(nodes_.size()); }

  // Seeds d(root)/d(root) = 1 (root must be 1x1) and runs the tape backwards.
  void backward(int root);

  int push(Mat value, std::function<void(Tape&, int)> back);

 private:
  struct Node {
    Mat value;
    Mat grad;
    std::function<void(Tape&, int)> backward;
  };
  std::vector<Node> nodes_;
};

// x: (n x i), w: (i x o) -> (n x o)
int matmul(Tape& t, int x, int w);
// Broadcasts bias row b (1 x o) over rows of x.
int add_bias(Tape& t, int x, int b);
int add(Tape& t, int a, int b);
int sub(Tape& t, int a, int b);
int mul(Tape& t, int a, int b);          // elementwise, same shape
int row_scale(Tape& t, int x, int s);    // x (n x c) scaled rowwise by s (n x 1)
int scale(Tape& t, int x, double c);
int add_const(Tape& t, int x, double c);
int neg(Tape& t, int x);
int relu(Tape& t, int x);
int softplus(Tape& t, int x);
int exp_op(Tape& t, int x);
int concat_cols(Tape& t, int a, int b);
int slice_cols(Tape& t, int x, int c0, int ncols);
int sum_all(Tape& t, int x);             // -> 1x1
int mean_all(Tape& t, int x);            // -> 1x1

// Row gather; backward scatter-adds. idx values must be < x.rows().
int gather_rows(Tape& t, int x, std::shared_ptr<const std::vector<int>> idx);

// Ops over consecutive groups of `group` rows (kNN neighborhoods flattened to
// (n*group) rows). Softmax normalizes per column within each group.
int group_softmax(Tape& t, int x, int group);
int group_sum(Tape& t, int x, int group);    // (n*group x c) -> (n x c)
int group_max(Tape& t, int x, int group);    // argmax backward

// mean_i |min(pred_i, c) - min(gt_i, c)|; pred is (n x 1).
int clamped_l1_mean(Tape& t, int pred, const Eigen::VectorXd& gt, double clamp);
// mean_i [-log softmax(logits_i)[label_i]]
int cross_entropy_mean(Tape& t, int logits, std::shared_ptr<const std::vector<int>> labels);

}  // namespace ircx::ad
