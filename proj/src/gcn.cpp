#include "ladies/gcn.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

namespace ladies {

std::vector<Index> GcnModel::dims() const {
  std::vector<Index> d;
  d.reserve(weights.size() + 1);
  if (weights.empty()) return d;
  d.push_back(static_cast<Index>(weights.front().rows()));
  for (const Matrix& w : weights) d.push_back(static_cast<Index>(w.cols()));
  return d;
}

GcnModel init_weights(const std::vector<Index>& dims, Rng& rng) {
  if (dims.size() < 2) {
    throw std::invalid_argument("init_weights: need at least input and output dims");
  }
  GcnModel model;
  model.weights.reserve(dims.size() - 1);
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    const Index din = dims[l];
    const Index dout = dims[l + 1];
    if (din < 1 || dout < 1) {
      throw std::invalid_argument("init_weights: dimensions must be positive");
    }
    const Scalar bound = std::sqrt(6.0 / static_cast<Scalar>(din + dout));
    Matrix w(din, dout);
    Scalar* data = w.data();
    for (Eigen::Index k = 0; k < w.size(); ++k) {
      data[k] = (2.0 * rng.uniform01() - 1.0) * bound;
    }
    model.weights.push_back(std::move(w));
  }
  return model;
}

namespace {

Matrix relu(const Matrix& z) { return z.cwiseMax(0.0); }

// Mean softmax cross-entropy; writes d(loss)/d(logits) if asked.
Scalar softmax_xent(const Matrix& logits, const std::vector<Index>& labels,
                    Matrix* dlogits) {
  const Index b = static_cast<Index>(logits.rows());
  const Index c = static_cast<Index>(logits.cols());
  if (static_cast<Index>(labels.size()) != b) {
    throw std::invalid_argument("loss: got " + std::to_string(labels.size()) +
                                " labels for " + std::to_string(b) + " rows");
  }
  if (dlogits != nullptr) dlogits->resize(b, c);

  Scalar loss = 0.0;
  for (Index i = 0; i < b; ++i) {
    const Index y = labels[static_cast<size_t>(i)];
    if (y < 0 || y >= c) {
      throw std::invalid_argument("loss: label " + std::to_string(y) +
                                  " outside [0, " + std::to_string(c) + ")");
    }
    const Scalar zmax = logits.row(i).maxCoeff();
    const Eigen::RowVectorXd shifted = logits.row(i).array() - zmax;
    const Eigen::RowVectorXd expz = shifted.array().exp();
    const Scalar denom = expz.sum();
    loss += std::log(denom) - shifted[y];
    if (dlogits != nullptr) {
      dlogits->row(i) = expz / denom;
      (*dlogits)(i, y) -= 1.0;
    }
  }
  loss /= static_cast<Scalar>(b);
  if (dlogits != nullptr) *dlogits /= static_cast<Scalar>(b);
  return loss;
}

void check_feature_shape(const GcnModel& model, Eigen::Index feature_cols) {
  if (model.weights.empty()) {
    throw std::invalid_argument("forward: model has no layers");
  }
  if (feature_cols != model.weights.front().rows()) {
    throw std::invalid_argument(
        "forward: features have " + std::to_string(feature_cols) +
        " columns but W^(0) expects " +
        std::to_string(model.weights.front().rows()));
  }
}

}  // namespace

Matrix forward_exact(const GcnModel& model, const Laplacian& p,
                     const Matrix& x) {
  return forward_exact_traced(model, p, x, nullptr);
}

Matrix forward_exact_traced(const GcnModel& model, const Laplacian& p,
                            const Matrix& x, ExactTrace* trace) {
  check_feature_shape(model, x.cols());
  if (x.rows() != p.num_nodes()) {
    throw std::invalid_argument("forward_exact: features have " +
                                std::to_string(x.rows()) + " rows, graph has " +
                                std::to_string(p.num_nodes()) + " nodes");
  }
  const int num_layers = model.num_layers();
  Matrix h = x;
  for (int l = 0; l < num_layers; ++l) {
    Matrix aggregated = p.matrix * h;
    Matrix z = aggregated * model.weights[static_cast<size_t>(l)];
    if (trace != nullptr) {
      trace->inputs.push_back(std::move(h));
      trace->aggregated.push_back(std::move(aggregated));
      trace->pre_activations.push_back(z);
    }
    h = (l + 1 < num_layers) ? relu(z) : std::move(z);
  }
  return h;
}

Matrix forward_sampled(const GcnModel& model, const BatchPlan& plan,
                       const Matrix& x, ForwardTrace* trace) {
  check_feature_shape(model, x.cols());
  const int num_layers = model.num_layers();
  if (static_cast<int>(plan.layers.size()) != num_layers) {
    throw std::invalid_argument(
        "forward_sampled: plan has " + std::to_string(plan.layers.size()) +
        " layers, model has " + std::to_string(num_layers));
  }

  // Gather the Q^0 rows of X.
  Matrix h(plan.input_nodes.size(), x.cols());
  for (Index k = 0; k < plan.input_nodes.size(); ++k) {
    const Index node = plan.input_nodes[k];
    if (node < 0 || node >= x.rows()) {
      throw std::invalid_argument("forward_sampled: input node " +
                                  std::to_string(node) + " out of range");
    }
    h.row(k) = x.row(node);
  }
  if (trace != nullptr) trace->plan = &plan;

  // plan.layers is ordered top-down; walk it bottom-up.
  for (int l = 1; l <= num_layers; ++l) {
    const LayerPlan& layer =
        plan.layers[static_cast<size_t>(num_layers - l)];
    if (layer.p_tilde.cols() != h.rows()) {
      throw std::invalid_argument(
          "forward_sampled: layer " + std::to_string(l) + " expects " +
          std::to_string(layer.p_tilde.cols()) + " lower rows, got " +
          std::to_string(h.rows()));
    }
    Matrix aggregated = layer.p_tilde * h;
    Matrix z = aggregated * model.weights[static_cast<size_t>(l - 1)];
    if (trace != nullptr) {
      trace->inputs.push_back(std::move(h));
      trace->aggregated.push_back(std::move(aggregated));
      trace->pre_activations.push_back(z);
    }
    h = (l < num_layers) ? relu(z) : std::move(z);
  }
  if (!h.allFinite()) {
    throw std::runtime_error(
        "forward_sampled: non-finite logits (training diverged)");
  }
  return h;
}

LossGrad loss_and_grad(const GcnModel& model, const ForwardTrace& trace,
                       const Matrix& logits, const std::vector<Index>& labels) {
  if (trace.plan == nullptr) {
    throw std::invalid_argument("loss_and_grad: trace has no plan attached");
  }
  const int num_layers = model.num_layers();
  if (static_cast<int>(trace.aggregated.size()) != num_layers) {
    throw std::invalid_argument("loss_and_grad: trace depth mismatch");
  }

  LossGrad out;
  out.grads.resize(static_cast<size_t>(num_layers));

  Matrix delta;  // d(loss)/d(Z~^(l)), starting at l = L
  out.loss = softmax_xent(logits, labels, &delta);

  for (int l = num_layers; l >= 1; --l) {
    const size_t j = static_cast<size_t>(l - 1);
    out.grads[j] = trace.aggregated[j].transpose() * delta;
    if (l > 1) {
      const LayerPlan& layer =
          trace.plan->layers[static_cast<size_t>(num_layers - l)];
      Matrix dh = delta * model.weights[j].transpose();
      delta = layer.p_tilde.transpose() * dh;
      // Rectifier mask; derivative at exactly 0 is 0.
      delta.array() *=
          (trace.pre_activations[j - 1].array() > 0.0).cast<Scalar>();
    }
  }
  return out;
}

LossGrad loss_and_grad_exact(const GcnModel& model, const Laplacian& p,
                             const ExactTrace& trace, const Matrix& logits,
                             const std::vector<Index>& batch,
                             const std::vector<Index>& labels) {
  const int num_layers = model.num_layers();
  if (static_cast<int>(trace.aggregated.size()) != num_layers) {
    throw std::invalid_argument("loss_and_grad_exact: trace depth mismatch");
  }
  if (batch.size() != labels.size()) {
    throw std::invalid_argument("loss_and_grad_exact: batch/label size mismatch");
  }

  Matrix batch_logits(static_cast<Index>(batch.size()), logits.cols());
  for (size_t i = 0; i < batch.size(); ++i) {
    batch_logits.row(static_cast<Index>(i)) = logits.row(batch[i]);
  }

  LossGrad out;
  out.grads.resize(static_cast<size_t>(num_layers));

  Matrix dbatch;
  out.loss = softmax_xent(batch_logits, labels, &dbatch);

  // Scatter the batch gradient back to full-graph rows.
  Matrix delta = Matrix::Zero(logits.rows(), logits.cols());
  for (size_t i = 0; i < batch.size(); ++i) {
    delta.row(batch[i]) = dbatch.row(static_cast<Index>(i));
  }

  for (int l = num_layers; l >= 1; --l) {
    const size_t j = static_cast<size_t>(l - 1);
    out.grads[j] = trace.aggregated[j].transpose() * delta;
    if (l > 1) {
      Matrix dh = delta * model.weights[j].transpose();
      delta = p.matrix * dh;  // P is symmetric, so P^T == P entrywise
      delta.array() *=
          (trace.pre_activations[j - 1].array() > 0.0).cast<Scalar>();
    }
  }
  return out;
}

AdamState AdamState::init(const GcnModel& model, Scalar lr) {
  AdamState s;
  s.lr = lr;
  s.m.reserve(model.weights.size());
  s.v.reserve(model.weights.size());
  for (const Matrix& w : model.weights) {
    s.m.push_back(Matrix::Zero(w.rows(), w.cols()));
    s.v.push_back(Matrix::Zero(w.rows(), w.cols()));
  }
  return s;
}

void adam_step(GcnModel& model, AdamState& adam,
               const std::vector<Matrix>& grads) {
  if (grads.size() != model.weights.size()) {
    throw std::invalid_argument("adam_step: gradient count mismatch");
  }
  for (const Matrix& g : grads) {
    if (!g.allFinite()) {
      throw std::runtime_error("adam_step: non-finite gradient");
    }
  }
  adam.step += 1;
  const Scalar bc1 = 1.0 - std::pow(adam.beta1, static_cast<Scalar>(adam.step));
  const Scalar bc2 = 1.0 - std::pow(adam.beta2, static_cast<Scalar>(adam.step));
  for (size_t l = 0; l < grads.size(); ++l) {
    adam.m[l] = adam.beta1 * adam.m[l] + (1.0 - adam.beta1) * grads[l];
    adam.v[l] = adam.beta2 * adam.v[l] +
                (1.0 - adam.beta2) * grads[l].cwiseProduct(grads[l]);
    const Matrix m_hat = adam.m[l] / bc1;
    const Matrix v_hat = adam.v[l] / bc2;
    model.weights[l].array() -=
        adam.lr * m_hat.array() / (v_hat.array().sqrt() + adam.eps);
  }
}

namespace {

constexpr char kCheckpointMagic[8] = {'G', 'C', 'N', 'C', 'K', 'P', 'T', '1'};

template <typename T>
void write_raw(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::ifstream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  return value;
}

}  // namespace

void save_model(const GcnModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("checkpoint: cannot open " + path);
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  const auto dims = model.dims();
  write_raw(out, static_cast<std::uint32_t>(model.num_layers()));
  for (Index d : dims) write_raw(out, static_cast<std::uint32_t>(d));
  for (const Matrix& w : model.weights) {
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        write_raw(out, w(i, j));
      }
    }
  }
  if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

GcnModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw std::runtime_error("checkpoint: bad magic in " + path);
  }
  const auto num_layers = read_raw<std::uint32_t>(in);
  if (num_layers == 0 || num_layers > 1024) {
    throw std::runtime_error("checkpoint: implausible layer count");
  }
  std::vector<Index> dims(num_layers + 1);
  for (auto& d : dims) d = static_cast<Index>(read_raw<std::uint32_t>(in));

  GcnModel model;
  model.weights.reserve(num_layers);
  for (std::uint32_t l = 0; l < num_layers; ++l) {
    Matrix w(dims[l], dims[l + 1]);
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        w(i, j) = read_raw<Scalar>(in);
      }
    }
    model.weights.push_back(std::move(w));
  }
  return model;
}

}  // namespace ladies
