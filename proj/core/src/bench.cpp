#include "ntklab/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "ntklab/rng.hpp"
#include "ntklab/runio.hpp"

namespace ntklab::bench {

std::size_t SynthSpec::task_count() const {
  switch (kind) {
    case SynthKind::multifreq: return freqs.size();
    case SynthKind::scalemix: return scales.size();
    case SynthKind::randlin: return cond.size();
  }
  return 0;
}

void SynthSpec::validate() const {
  if (samples < 2) throw InvalidInputError("SynthSpec: samples must be >= 2");
  if (input_dim == 0) throw InvalidInputError("SynthSpec: input_dim must be >= 1");
  if (noise_std < 0.0) throw InvalidInputError("SynthSpec: noise_std must be >= 0");
  if (task_count() == 0) throw InvalidInputError("SynthSpec: no tasks configured");
  if (kind == SynthKind::multifreq) {
    for (const auto& f : freqs) {
      if (f.empty()) throw InvalidInputError("SynthSpec: empty frequency list");
    }
    if (!amplitudes.empty() && amplitudes.size() != freqs.size()) {
      throw InvalidInputError("SynthSpec: amplitude lists must match tasks");
    }
    if (!(dir_scale > 0.0)) {
      throw InvalidInputError("SynthSpec: dir_scale must be positive");
    }
  }
  if (kind == SynthKind::randlin) {
    for (double c : cond) {
      if (!(c >= 1.0)) throw InvalidInputError("SynthSpec: condition numbers must be >= 1");
    }
  }
}

SynthSpec default_multifreq(std::uint64_t seed) {
  SynthSpec s;
  s.kind = SynthKind::multifreq;
  s.input_dim = 2;
  s.samples = 512;
  s.eval_samples = 128;
  s.noise_std = 0.01;
  s.seed = seed;
  s.freqs = {{1.0}, {3.0}, {7.0}};
  // Amplitude well above the scale of a freshly initialized net's outputs,
  // so the error spectrum at the start of training is target-dominated.
  s.amplitudes = {{5.0}, {5.0}, {5.0}};
  return s;
}

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::vector<double> random_unit(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  double n = 0.0;
  do {
    n = 0.0;
    for (auto& x : v) {
      x = rng.normal();
      n += x * x;
    }
  } while (n == 0.0);
  n = std::sqrt(n);
  for (auto& x : v) x /= n;
  return v;
}

// Orthonormal basis from a seeded Gaussian matrix via Gram-Schmidt.
std::vector<std::vector<double>> random_orthogonal(Rng& rng, std::size_t dim) {
  std::vector<std::vector<double>> q;
  while (q.size() < dim) {
    std::vector<double> v(dim);
    for (auto& x : v) x = rng.normal();
    for (const auto& u : q) {
      double d = 0.0;
      for (std::size_t i = 0; i < dim; ++i) d += u[i] * v[i];
      for (std::size_t i = 0; i < dim; ++i) v[i] -= d * u[i];
    }
    double n = 0.0;
    for (double x : v) n += x * x;
    if (n < 1e-12) continue;
    n = std::sqrt(n);
    for (auto& x : v) x /= n;
    q.push_back(std::move(v));
  }
  return q;
}

struct MultifreqModel {
  // directions[task][freqidx]
  std::vector<std::vector<std::vector<double>>> directions;
};

struct RandlinModel {
  std::vector<std::vector<std::vector<double>>> maps; // [task][row][col]
};

trainer::TaskData sample_split(const SynthSpec& spec, std::size_t count, Rng& xrng,
                               Rng& noise_rng, const MultifreqModel& mf,
                               const std::vector<double>& scalemix_dir,
                               const RandlinModel& rl) {
  trainer::TaskData data;
  data.inputs.resize(count);
  data.targets.assign(spec.task_count(),
                      std::vector<std::vector<double>>(count));
  for (std::size_t s = 0; s < count; ++s) {
    std::vector<double> x(spec.input_dim);
    for (auto& v : x) v = xrng.uniform(-1.0, 1.0);
    data.inputs[s] = x;
    for (std::size_t t = 0; t < spec.task_count(); ++t) {
      std::vector<double> y;
      switch (spec.kind) {
        case SynthKind::multifreq: {
          double acc = 0.0;
          for (std::size_t f = 0; f < spec.freqs[t].size(); ++f) {
            const double amp =
                spec.amplitudes.empty() ? 1.0 : spec.amplitudes[t][f];
            double proj = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
              proj += mf.directions[t][f][i] * x[i];
            }
            acc += amp * std::sin(kTwoPi * spec.freqs[t][f] * proj);
          }
          y = {acc};
          break;
        }
        case SynthKind::scalemix: {
          double proj = 0.0;
          for (std::size_t i = 0; i < x.size(); ++i) proj += scalemix_dir[i] * x[i];
          y = {spec.scales[t] * std::sin(kTwoPi * proj)};
          break;
        }
        case SynthKind::randlin: {
          y.assign(spec.input_dim, 0.0);
          for (std::size_t r = 0; r < spec.input_dim; ++r) {
            for (std::size_t c = 0; c < spec.input_dim; ++c) {
              y[r] += rl.maps[t][r][c] * x[c];
            }
          }
          break;
        }
      }
      if (spec.noise_std > 0.0) {
        for (auto& v : y) v += noise_rng.normal(0.0, spec.noise_std);
      }
      data.targets[t][s] = std::move(y);
    }
  }
  return data;
}

} // namespace

trainer::Dataset generate(const SynthSpec& spec) {
  spec.validate();

  Rng model_rng(derive_seed(spec.seed, 0xA0));
  MultifreqModel mf;
  std::vector<double> scalemix_dir;
  RandlinModel rl;
  switch (spec.kind) {
    case SynthKind::multifreq: {
      mf.directions.resize(spec.task_count());
      for (std::size_t t = 0; t < spec.task_count(); ++t) {
        for (std::size_t f = 0; f < spec.freqs[t].size(); ++f) {
          std::vector<double> dir = random_unit(model_rng, spec.input_dim);
          for (double& v : dir) v *= spec.dir_scale;
          mf.directions[t].push_back(std::move(dir));
        }
      }
      break;
    }
    case SynthKind::scalemix: {
      scalemix_dir = random_unit(model_rng, spec.input_dim);
      break;
    }
    case SynthKind::randlin: {
      const std::size_t d = spec.input_dim;
      for (std::size_t t = 0; t < spec.task_count(); ++t) {
        const auto u = random_orthogonal(model_rng, d);
        const auto v = random_orthogonal(model_rng, d);
        // Singular values decay geometrically from 1 to 1/cond.
        std::vector<double> sv(d);
        for (std::size_t i = 0; i < d; ++i) {
          const double frac = d == 1 ? 0.0 : static_cast<double>(i) / (d - 1);
          sv[i] = std::pow(spec.cond[t], -frac);
        }
        std::vector<std::vector<double>> a(d, std::vector<double>(d, 0.0));
        for (std::size_t r = 0; r < d; ++r) {
          for (std::size_t c = 0; c < d; ++c) {
            double acc = 0.0;
            for (std::size_t i = 0; i < d; ++i) acc += u[i][r] * sv[i] * v[i][c];
            a[r][c] = acc;
          }
        }
        rl.maps.push_back(std::move(a));
      }
      break;
    }
  }

  trainer::Dataset ds;
  {
    Rng xrng(derive_seed(spec.seed, 0xB0));
    Rng nrng(derive_seed(spec.seed, 0xB1));
    ds.train = sample_split(spec, spec.samples, xrng, nrng, mf, scalemix_dir, rl);
  }
  {
    Rng xrng(derive_seed(spec.seed, 0xC0));
    Rng nrng(derive_seed(spec.seed, 0xC1));
    ds.eval = sample_split(spec, spec.eval_samples, xrng, nrng, mf, scalemix_dir, rl);
  }
  return ds;
}

std::vector<double> stl_baseline(const SynthSpec& spec,
                                 const trainer::TrainConfig& train_cfg) {
  const trainer::Dataset full = generate(spec);
  const std::size_t k = spec.task_count();
  if (train_cfg.net_spec.task_count() != k) {
    throw InvalidInputError("stl_baseline: config heads do not match dataset tasks");
  }

  std::vector<double> metrics(k, 0.0);
  for (std::size_t t = 0; t < k; ++t) {
    trainer::TrainConfig cfg = train_cfg;
    cfg.net_spec.heads = {train_cfg.net_spec.heads[t]};
    cfg.strategy = weighting::StrategyKind::ls();

    trainer::Dataset single;
    single.train.inputs = full.train.inputs;
    single.train.targets = {full.train.targets[t]};
    single.eval.inputs = full.eval.inputs;
    single.eval.targets = {full.eval.targets[t]};

    const trainer::RunRecord rec = trainer::train(cfg, single);
    if (!rec.valid) {
      throw NumericalError("stl_baseline: task " + std::to_string(t) +
                           " run aborted: " + rec.abort_reason);
    }
    metrics[t] = rec.final_metrics.at(0);
  }
  return metrics;
}

double delta_m(const std::vector<double>& method_metrics,
               const std::vector<double>& baseline_metrics,
               const std::vector<int>& higher_is_better) {
  const std::size_t s = method_metrics.size();
  if (baseline_metrics.size() != s || higher_is_better.size() != s || s == 0) {
    throw InvalidInputError("delta_m: metric vectors must have equal nonzero length");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < s; ++i) {
    if (baseline_metrics[i] == 0.0) {
      throw InvalidInputError("delta_m: zero baseline metric at index " +
                              std::to_string(i));
    }
    const double sign = higher_is_better[i] ? -1.0 : 1.0;
    acc += sign * (method_metrics[i] - baseline_metrics[i]) / baseline_metrics[i];
  }
  return acc / static_cast<double>(s) * 100.0;
}

std::vector<double> average_ranks(const std::vector<double>& values, bool higher_better) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return higher_better ? values[a] > values[b] : values[a] < values[b];
  });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t m = i; m <= j; ++m) ranks[order[m]] = avg;
    i = j + 1;
  }
  return ranks;
}

std::vector<double> mean_rank(const MetricTable& table) {
  const std::size_t methods = table.methods.size();
  if (methods < 2) throw InvalidInputError("mean_rank: need at least 2 methods");
  if (table.values.size() != methods) {
    throw InvalidInputError("mean_rank: one value row per method");
  }
  const std::size_t metrics = table.higher_is_better.size();
  for (const auto& row : table.values) {
    if (row.size() != metrics) throw InvalidInputError("mean_rank: ragged table");
  }

  std::vector<double> mr(methods, 0.0);
  for (std::size_t m = 0; m < metrics; ++m) {
    std::vector<double> col(methods);
    for (std::size_t i = 0; i < methods; ++i) col[i] = table.values[i][m];
    const std::vector<double> r = average_ranks(col, table.higher_is_better[m] != 0);
    for (std::size_t i = 0; i < methods; ++i) mr[i] += r[i];
  }
  for (double& v : mr) v /= static_cast<double>(metrics);
  return mr;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw InvalidInputError("spearman: need two equally sized series");
  }
  const std::vector<double> ra = average_ranks(a, false);
  const std::vector<double> rb = average_ranks(b, false);
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = ra[i] - ma;
    const double db = rb[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) {
    // A constant series is rank-correlated with anything only trivially.
    return saa == sbb ? 1.0 : 0.0;
  }
  return sab / std::sqrt(saa * sbb);
}

void export_csv(const trainer::TaskData& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary); // binary keeps LF endings
  if (!out) throw IoError("export_csv: cannot open " + path.string());
  if (data.size() == 0) throw InvalidInputError("export_csv: empty dataset");

  const std::size_t d = data.inputs[0].size();
  out << "x0";
  for (std::size_t i = 1; i < d; ++i) out << ",x" << i;
  for (std::size_t t = 0; t < data.task_count(); ++t) {
    for (std::size_t j = 0; j < data.targets[t][0].size(); ++j) {
      out << ",task" << t << "_y" << j;
    }
  }
  out << "\n";
  for (std::size_t s = 0; s < data.size(); ++s) {
    bool first = true;
    auto emit = [&](double v) {
      if (!first) out << ",";
      first = false;
      out << runio::format_double(v);
    };
    for (double v : data.inputs[s]) emit(v);
    for (std::size_t t = 0; t < data.task_count(); ++t) {
      for (double v : data.targets[t][s]) emit(v);
    }
    out << "\n";
  }
  if (!out) throw IoError("export_csv: write failed for " + path.string());
}

trainer::TaskData import_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("import_csv: cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw ConfigError("import_csv: empty file " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> cols;
  {
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
  }
  std::size_t d = 0;
  while (d < cols.size() && cols[d] == "x" + std::to_string(d)) ++d;
  if (d == 0) throw ConfigError("import_csv: header must start with x0: " + path.string());

  // Group task columns: task{t}_y{j} in task-major order.
  std::vector<std::size_t> task_dims;
  for (std::size_t i = d; i < cols.size(); ++i) {
    std::size_t t = 0, j = 0;
    if (std::sscanf(cols[i].c_str(), "task%zu_y%zu", &t, &j) != 2) {
      throw ConfigError("import_csv: unexpected column '" + cols[i] + "' in " +
                        path.string());
    }
    if (t == task_dims.size()) {
      task_dims.push_back(0);
    } else if (t + 1 != task_dims.size()) {
      throw ConfigError("import_csv: task columns out of order in " + path.string());
    }
    if (j != task_dims.back()) {
      throw ConfigError("import_csv: target columns out of order in " + path.string());
    }
    ++task_dims.back();
  }
  if (task_dims.empty()) {
    throw ConfigError("import_csv: no target columns in " + path.string());
  }

  trainer::TaskData data;
  data.targets.resize(task_dims.size());
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> vals;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t next = line.find(',', pos);
      const std::string_view field(line.data() + pos,
                                   (next == std::string::npos ? line.size() : next) - pos);
      double v = 0.0;
      const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
      if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
        throw ConfigError("import_csv: bad number at " + path.string() + ":" +
                          std::to_string(lineno));
      }
      vals.push_back(v);
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    if (vals.size() != cols.size()) {
      throw ConfigError("import_csv: wrong field count at " + path.string() + ":" +
                        std::to_string(lineno));
    }
    data.inputs.emplace_back(vals.begin(), vals.begin() + d);
    std::size_t off = d;
    for (std::size_t t = 0; t < task_dims.size(); ++t) {
      data.targets[t].emplace_back(vals.begin() + off, vals.begin() + off + task_dims[t]);
      off += task_dims[t];
    }
  }
  return data;
}

} // namespace ntklab::bench
