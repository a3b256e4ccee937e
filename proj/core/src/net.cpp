#include "ntklab/net.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ntklab/rng.hpp"

namespace ntklab::net {

namespace {

constexpr std::uint64_t kCheckpointMagic = 0x4e544b4c41423031ULL; // "NTKLAB01"

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xffULL;
    h *= 0x100000001b3ULL;
  }
  return h;
}

} // namespace

void NetSpec::validate() const {
  if (input_dim == 0) throw InvalidInputError("NetSpec: input_dim must be >= 1");
  if (repr_dim == 0) throw InvalidInputError("NetSpec: repr_dim must be >= 1");
  if (heads.empty()) throw InvalidInputError("NetSpec: at least one head required");
  for (std::size_t w : trunk) {
    if (w == 0) throw InvalidInputError("NetSpec: zero-width trunk layer");
  }
  const std::size_t trunk_out = trunk.empty() ? input_dim : trunk.back();
  if (trunk_out != repr_dim) {
    throw InvalidInputError("NetSpec: repr_dim must equal the trunk output width");
  }
  for (const HeadSpec& h : heads) {
    if (h.output_dim == 0) throw InvalidInputError("NetSpec: zero-width head output");
    for (std::size_t w : h.hidden) {
      if (w == 0) throw InvalidInputError("NetSpec: zero-width head layer");
    }
  }
}

std::uint64_t NetSpec::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a(h, input_dim);
  h = fnv1a(h, trunk.size());
  for (std::size_t w : trunk) h = fnv1a(h, w);
  h = fnv1a(h, repr_dim);
  h = fnv1a(h, heads.size());
  for (const HeadSpec& hd : heads) {
    h = fnv1a(h, hd.hidden.size());
    for (std::size_t w : hd.hidden) h = fnv1a(h, w);
    h = fnv1a(h, hd.output_dim);
  }
  h = fnv1a(h, static_cast<std::uint64_t>(activation));
  h = fnv1a(h, seed);
  h = fnv1a(h, use_bias ? 1 : 0);
  return h;
}

TaskBatch::TaskBatch(std::vector<std::vector<double>> in,
                     std::vector<std::vector<std::vector<double>>> tg, std::size_t n_mb)
    : inputs(std::move(in)), targets(std::move(tg)), n_minibatches(n_mb) {
  if (n_minibatches == 0) {
    throw InvalidInputError("TaskBatch: n_minibatches must be >= 1");
  }
  for (const auto& t : targets) {
    if (t.size() != inputs.size()) {
      throw InvalidInputError("TaskBatch: every task needs a target per input");
    }
  }
  const std::size_t usable = (inputs.size() / n_minibatches) * n_minibatches;
  if (usable == 0) {
    throw InvalidInputError("TaskBatch: fewer samples than mini-batches");
  }
  inputs.resize(usable);
  for (auto& t : targets) t.resize(usable);
}

MtlNet::MtlNet(NetSpec spec) : spec_(std::move(spec)) {
  spec_.validate();

  const std::size_t bias = spec_.use_bias ? 1 : 0;
  std::size_t off = 0;
  std::size_t in = spec_.input_dim;
  for (std::size_t w : spec_.trunk) {
    LayerLayout l{in, w, off, off + in * w};
    off = l.bias_off + bias * w;
    trunk_layout_.push_back(l);
    in = w;
  }
  theta_.assign(off, 0.0);

  head_layout_.resize(spec_.heads.size());
  head_params_.resize(spec_.heads.size());
  for (std::size_t t = 0; t < spec_.heads.size(); ++t) {
    std::size_t hoff = 0;
    std::size_t hin = spec_.repr_dim;
    std::vector<std::size_t> widths = spec_.heads[t].hidden;
    widths.push_back(spec_.heads[t].output_dim);
    for (std::size_t w : widths) {
      LayerLayout l{hin, w, hoff, hoff + hin * w};
      hoff = l.bias_off + bias * w;
      head_layout_[t].push_back(l);
      hin = w;
    }
    head_params_[t].assign(hoff, 0.0);
  }
}

std::size_t MtlNet::param_count() const {
  std::size_t n = theta_.size();
  for (const auto& h : head_params_) n += h.size();
  return n;
}

double MtlNet::act(double x) const {
  return spec_.activation == Activation::tanh ? std::tanh(x) : (x > 0.0 ? x : 0.0);
}

double MtlNet::act_deriv(double pre) const {
  if (spec_.activation == Activation::tanh) {
    const double t = std::tanh(pre);
    return 1.0 - t * t;
  }
  // relu'(0) is defined as 0.
  return pre > 0.0 ? 1.0 : 0.0;
}

ForwardTrace MtlNet::forward(const std::vector<std::vector<double>>& inputs) const {
  for (const auto& x : inputs) {
    if (x.size() != spec_.input_dim) {
      throw InvalidInputError("forward: input dimension mismatch");
    }
  }
  const std::size_t m = inputs.size();
  ForwardTrace tr;
  tr.batch = m;
  tr.inputs = inputs;
  tr.trunk_pre.resize(trunk_layout_.size());
  tr.trunk_act.resize(trunk_layout_.size());

  std::vector<std::vector<double>> h = inputs;
  for (std::size_t l = 0; l < trunk_layout_.size(); ++l) {
    const LayerLayout& L = trunk_layout_[l];
    tr.trunk_pre[l].assign(m, std::vector<double>(L.out, 0.0));
    tr.trunk_act[l].assign(m, std::vector<double>(L.out, 0.0));
    for (std::size_t s = 0; s < m; ++s) {
      for (std::size_t o = 0; o < L.out; ++o) {
        double acc = spec_.use_bias ? theta_[L.bias_off + o] : 0.0;
        const double* w = theta_.data() + L.weight_off + o * L.in;
        for (std::size_t i = 0; i < L.in; ++i) acc += w[i] * h[s][i];
        tr.trunk_pre[l][s][o] = acc;
        tr.trunk_act[l][s][o] = act(acc);
      }
    }
    h = tr.trunk_act[l];
  }
  tr.z = h; // empty trunk leaves z = x

  const std::size_t k = spec_.heads.size();
  tr.head_pre.resize(k);
  tr.head_act.resize(k);
  tr.outputs.resize(k);
  for (std::size_t t = 0; t < k; ++t) {
    const auto& layers = head_layout_[t];
    tr.head_pre[t].resize(layers.size());
    tr.head_act[t].resize(layers.size());
    std::vector<std::vector<double>> u = tr.z;
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const LayerLayout& L = layers[l];
      const bool last = (l + 1 == layers.size());
      tr.head_pre[t][l].assign(m, std::vector<double>(L.out, 0.0));
      if (!last) tr.head_act[t][l].assign(m, std::vector<double>(L.out, 0.0));
      for (std::size_t s = 0; s < m; ++s) {
        for (std::size_t o = 0; o < L.out; ++o) {
          double acc = spec_.use_bias ? head_params_[t][L.bias_off + o] : 0.0;
          const double* w = head_params_[t].data() + L.weight_off + o * L.in;
          for (std::size_t i = 0; i < L.in; ++i) acc += w[i] * u[s][i];
          tr.head_pre[t][l][s][o] = acc;
          if (!last) tr.head_act[t][l][s][o] = act(acc);
        }
      }
      u = last ? tr.head_pre[t][l] : tr.head_act[t][l];
    }
    tr.outputs[t] = u;
  }
  return tr;
}

double MtlNet::task_loss(const ForwardTrace& trace, const TaskBatch& batch,
                         std::size_t task) const {
  if (task >= spec_.heads.size()) throw InvalidInputError("task_loss: bad task id");
  const std::size_t m = batch.size();
  if (trace.batch < m) throw InvalidInputError("task_loss: trace smaller than batch");
  double acc = 0.0;
  for (std::size_t s = 0; s < m; ++s) {
    const auto& f = trace.outputs[task][s];
    const auto& y = batch.targets[task][s];
    if (f.size() != y.size()) {
      throw InvalidInputError("task_loss: target dimension mismatch");
    }
    for (std::size_t c = 0; c < f.size(); ++c) {
      const double e = f[c] - y[c];
      acc += 0.5 * e * e;
    }
  }
  return acc / static_cast<double>(m);
}

std::vector<double> MtlNet::task_losses(const ForwardTrace& trace,
                                        const TaskBatch& batch) const {
  std::vector<double> out(batch.task_count());
  for (std::size_t t = 0; t < batch.task_count(); ++t) out[t] = task_loss(trace, batch, t);
  return out;
}

std::vector<double> MtlNet::backprop_head(const ForwardTrace& trace, std::size_t task,
                                          std::size_t sample, std::vector<double> dout,
                                          std::span<double> dhead) const {
  const auto& layers = head_layout_[task];
  const auto& params = head_params_[task];
  for (std::size_t li = layers.size(); li-- > 0;) {
    const LayerLayout& L = layers[li];
    const bool last = (li + 1 == layers.size());
    // dout currently holds d(loss)/d(post-activation of layer li), or
    // d(loss)/d(pre-activation) for the final affine layer.
    std::vector<double> dpre(L.out);
    for (std::size_t o = 0; o < L.out; ++o) {
      dpre[o] = last ? dout[o] : dout[o] * act_deriv(trace.head_pre[task][li][sample][o]);
    }
    const std::vector<double>& in_act =
        li == 0 ? trace.z[sample] : trace.head_act[task][li - 1][sample];
    if (!dhead.empty()) {
      for (std::size_t o = 0; o < L.out; ++o) {
        double* dw = dhead.data() + L.weight_off + o * L.in;
        for (std::size_t i = 0; i < L.in; ++i) dw[i] += dpre[o] * in_act[i];
        if (spec_.use_bias) dhead[L.bias_off + o] += dpre[o];
      }
    }
    std::vector<double> din(L.in, 0.0);
    for (std::size_t o = 0; o < L.out; ++o) {
      const double* w = params.data() + L.weight_off + o * L.in;
      const double d = dpre[o];
      for (std::size_t i = 0; i < L.in; ++i) din[i] += d * w[i];
    }
    dout = std::move(din);
  }
  return dout; // d(loss)/dz for this sample
}

void MtlNet::backprop_trunk(const ForwardTrace& trace, std::size_t sample,
                            std::vector<double> dz, std::span<double> dtheta) const {
  std::vector<double> dout = std::move(dz);
  for (std::size_t li = trunk_layout_.size(); li-- > 0;) {
    const LayerLayout& L = trunk_layout_[li];
    std::vector<double> dpre(L.out);
    for (std::size_t o = 0; o < L.out; ++o) {
      dpre[o] = dout[o] * act_deriv(trace.trunk_pre[li][sample][o]);
    }
    const std::vector<double>& in_act =
        li == 0 ? trace.inputs[sample] : trace.trunk_act[li - 1][sample];
    for (std::size_t o = 0; o < L.out; ++o) {
      double* dw = dtheta.data() + L.weight_off + o * L.in;
      for (std::size_t i = 0; i < L.in; ++i) dw[i] += dpre[o] * in_act[i];
      if (spec_.use_bias) dtheta[L.bias_off + o] += dpre[o];
    }
    if (li == 0) break;
    std::vector<double> din(L.in, 0.0);
    for (std::size_t o = 0; o < L.out; ++o) {
      const double* w = theta_.data() + L.weight_off + o * L.in;
      const double d = dpre[o];
      for (std::size_t i = 0; i < L.in; ++i) din[i] += d * w[i];
    }
    dout = std::move(din);
  }
}

std::vector<double> MtlNet::grad_shared(const TaskBatch& batch, std::size_t task) const {
  const ForwardTrace tr = forward(batch.inputs);
  return grad_shared_range(tr, batch, task, 0, batch.size());
}

std::vector<double> MtlNet::grad_shared_range(const ForwardTrace& trace,
                                              const TaskBatch& batch, std::size_t task,
                                              std::size_t begin, std::size_t end) const {
  if (task >= spec_.heads.size()) throw InvalidInputError("grad_shared: bad task id");
  if (end > batch.size() || begin >= end) {
    throw InvalidInputError("grad_shared_range: bad sample range");
  }
  const double inv_m = 1.0 / static_cast<double>(end - begin);
  std::vector<double> dtheta(theta_.size(), 0.0);
  for (std::size_t s = begin; s < end; ++s) {
    const auto& f = trace.outputs[task][s];
    const auto& y = batch.targets[task][s];
    std::vector<double> dout(f.size());
    for (std::size_t c = 0; c < f.size(); ++c) dout[c] = (f[c] - y[c]) * inv_m;
    std::vector<double> dz = backprop_head(trace, task, s, std::move(dout), {});
    backprop_trunk(trace, s, std::move(dz), dtheta);
  }
  return dtheta;
}

std::vector<double> MtlNet::grad_repr_range(const ForwardTrace& trace,
                                            const TaskBatch& batch, std::size_t task,
                                            std::size_t begin, std::size_t end) const {
  if (task >= spec_.heads.size()) throw InvalidInputError("grad_repr: bad task id");
  if (end > batch.size() || begin >= end) {
    throw InvalidInputError("grad_repr_range: bad sample range");
  }
  const double inv_m = 1.0 / static_cast<double>(end - begin);
  const std::size_t rd = spec_.repr_dim;
  std::vector<double> out((end - begin) * rd, 0.0);
  for (std::size_t s = begin; s < end; ++s) {
    const auto& f = trace.outputs[task][s];
    const auto& y = batch.targets[task][s];
    std::vector<double> dout(f.size());
    for (std::size_t c = 0; c < f.size(); ++c) dout[c] = (f[c] - y[c]) * inv_m;
    std::vector<double> dz = backprop_head(trace, task, s, std::move(dout), {});
    std::copy(dz.begin(), dz.end(), out.begin() + (s - begin) * rd);
  }
  return out;
}

std::vector<double> MtlNet::grad_head(const TaskBatch& batch, std::size_t task) const {
  if (task >= spec_.heads.size()) throw InvalidInputError("grad_head: bad task id");
  const ForwardTrace tr = forward(batch.inputs);
  const double inv_m = 1.0 / static_cast<double>(batch.size());
  std::vector<double> dhead(head_params_[task].size(), 0.0);
  for (std::size_t s = 0; s < batch.size(); ++s) {
    const auto& f = tr.outputs[task][s];
    const auto& y = batch.targets[task][s];
    std::vector<double> dout(f.size());
    for (std::size_t c = 0; c < f.size(); ++c) dout[c] = (f[c] - y[c]) * inv_m;
    backprop_head(tr, task, s, std::move(dout), dhead);
  }
  return dhead;
}

GradSet MtlNet::grad_weighted(const TaskBatch& batch,
                              const std::vector<double>& omegas) const {
  if (omegas.size() != spec_.heads.size()) {
    throw InvalidInputError("grad_weighted: weight count mismatch");
  }
  const ForwardTrace tr = forward(batch.inputs);
  const double inv_m = 1.0 / static_cast<double>(batch.size());
  GradSet g;
  g.shared.assign(theta_.size(), 0.0);
  g.heads.resize(spec_.heads.size());
  for (std::size_t t = 0; t < spec_.heads.size(); ++t) {
    g.heads[t].assign(head_params_[t].size(), 0.0);
  }
  for (std::size_t s = 0; s < batch.size(); ++s) {
    std::vector<double> dz_total(spec_.repr_dim, 0.0);
    for (std::size_t t = 0; t < spec_.heads.size(); ++t) {
      const auto& f = tr.outputs[t][s];
      const auto& y = batch.targets[t][s];
      std::vector<double> dout(f.size());
      for (std::size_t c = 0; c < f.size(); ++c) {
        dout[c] = omegas[t] * (f[c] - y[c]) * inv_m;
      }
      std::vector<double> dz = backprop_head(tr, t, s, std::move(dout), g.heads[t]);
      for (std::size_t r = 0; r < dz_total.size(); ++r) dz_total[r] += dz[r];
    }
    backprop_trunk(tr, s, std::move(dz_total), g.shared);
  }
  return g;
}

std::vector<double> MtlNet::grad_shared_sum_loss(const TaskBatch& batch) const {
  const ForwardTrace tr = forward(batch.inputs);
  std::vector<double> dtheta(theta_.size(), 0.0);
  for (std::size_t s = 0; s < batch.size(); ++s) {
    std::vector<double> dz_total(spec_.repr_dim, 0.0);
    for (std::size_t t = 0; t < spec_.heads.size(); ++t) {
      const auto& f = tr.outputs[t][s];
      const auto& y = batch.targets[t][s];
      std::vector<double> dout(f.size());
      for (std::size_t c = 0; c < f.size(); ++c) dout[c] = f[c] - y[c];
      std::vector<double> dz = backprop_head(tr, t, s, std::move(dout), {});
      for (std::size_t r = 0; r < dz_total.size(); ++r) dz_total[r] += dz[r];
    }
    backprop_trunk(tr, s, std::move(dz_total), dtheta);
  }
  return dtheta;
}

linalg::Matrix MtlNet::jacobian_shared(const std::vector<std::vector<double>>& inputs,
                                       std::size_t task) const {
  if (task >= spec_.heads.size()) throw InvalidInputError("jacobian_shared: bad task id");
  const ForwardTrace tr = forward(inputs);
  const std::size_t od = spec_.heads[task].output_dim;
  linalg::Matrix out(inputs.size() * od, theta_.size());
  for (std::size_t s = 0; s < inputs.size(); ++s) {
    for (std::size_t c = 0; c < od; ++c) {
      std::vector<double> dout(od, 0.0);
      dout[c] = 1.0;
      std::vector<double> dz = backprop_head(tr, task, s, std::move(dout), {});
      backprop_trunk(tr, s, std::move(dz), out.row(s * od + c));
    }
  }
  return out;
}

linalg::Matrix MtlNet::jacobian_repr(const std::vector<std::vector<double>>& inputs,
                                     std::size_t task) const {
  if (task >= spec_.heads.size()) throw InvalidInputError("jacobian_repr: bad task id");
  const ForwardTrace tr = forward(inputs);
  const std::size_t od = spec_.heads[task].output_dim;
  const std::size_t rd = spec_.repr_dim;
  linalg::Matrix out(inputs.size() * od, inputs.size() * rd);
  for (std::size_t s = 0; s < inputs.size(); ++s) {
    for (std::size_t c = 0; c < od; ++c) {
      std::vector<double> dout(od, 0.0);
      dout[c] = 1.0;
      std::vector<double> dz = backprop_head(tr, task, s, std::move(dout), {});
      auto row = out.row(s * od + c);
      std::copy(dz.begin(), dz.end(), row.begin() + s * rd);
    }
  }
  return out;
}

linalg::Matrix MtlNet::jacobian_trunk(const std::vector<std::vector<double>>& inputs) const {
  const ForwardTrace tr = forward(inputs);
  const std::size_t rd = spec_.repr_dim;
  linalg::Matrix out(inputs.size() * rd, theta_.size());
  for (std::size_t s = 0; s < inputs.size(); ++s) {
    for (std::size_t r = 0; r < rd; ++r) {
      std::vector<double> dz(rd, 0.0);
      dz[r] = 1.0;
      backprop_trunk(tr, s, std::move(dz), out.row(s * rd + r));
    }
  }
  return out;
}

MtlNet init(const NetSpec& spec) {
  MtlNet net(spec);
  Rng rng(derive_seed(spec.seed, 0));

  const std::size_t bias = spec.use_bias ? 1 : 0;
  std::size_t in = spec.input_dim;
  std::size_t off = 0;
  for (std::size_t w : spec.trunk) {
    const double std_dev = 1.0 / std::sqrt(static_cast<double>(in));
    for (std::size_t i = 0; i < in * w + bias * w; ++i) {
      net.theta()[off + i] = rng.normal(0.0, std_dev);
    }
    off += in * w + bias * w;
    in = w;
  }
  for (std::size_t t = 0; t < spec.heads.size(); ++t) {
    Rng hr(derive_seed(spec.seed, 1 + t));
    std::size_t hin = spec.repr_dim;
    std::size_t hoff = 0;
    std::vector<std::size_t> widths = spec.heads[t].hidden;
    widths.push_back(spec.heads[t].output_dim);
    for (std::size_t w : widths) {
      const double std_dev = 1.0 / std::sqrt(static_cast<double>(hin));
      for (std::size_t i = 0; i < hin * w + bias * w; ++i) {
        net.head_params(t)[hoff + i] = hr.normal(0.0, std_dev);
      }
      hoff += hin * w + bias * w;
      hin = w;
    }
  }
  return net;
}

void save_params(const MtlNet& net, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("save_params: cannot open " + path.string());
  auto put_u64 = [&](std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
  };
  auto put_f64 = [&](double d) { put_u64(std::bit_cast<std::uint64_t>(d)); };

  put_u64(kCheckpointMagic);
  put_u64(net.spec().hash());
  put_u64(net.param_count());
  for (double v : net.theta()) put_f64(v);
  for (std::size_t t = 0; t < net.task_count(); ++t) {
    for (double v : net.head_params(t)) put_f64(v);
  }
  if (!out) throw IoError("save_params: write failed for " + path.string());
}

void load_params(MtlNet& net, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_params: cannot open " + path.string());
  auto get_u64 = [&]() {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw IoError("load_params: truncated file " + path.string());
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  };
  if (get_u64() != kCheckpointMagic) {
    throw IoError("load_params: not a parameter checkpoint: " + path.string());
  }
  if (get_u64() != net.spec().hash()) {
    throw InvalidInputError("load_params: checkpoint was written for a different spec");
  }
  if (get_u64() != net.param_count()) {
    throw InvalidInputError("load_params: parameter count mismatch");
  }
  for (double& v : net.theta()) v = std::bit_cast<double>(get_u64());
  for (std::size_t t = 0; t < net.task_count(); ++t) {
    for (double& v : net.head_params(t)) v = std::bit_cast<double>(get_u64());
  }
}

} // namespace ntklab::net
