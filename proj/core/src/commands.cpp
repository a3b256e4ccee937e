#include "ntklab/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include "ntklab/bench.hpp"

namespace ntklab::commands {

namespace fs = std::filesystem;

namespace {

void require_fresh_dir(const fs::path& dir) {
  std::error_code ec;
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) throw IoError("output path is not a directory: " + dir.string());
    if (!fs::is_empty(dir, ec)) {
      throw IoError("refusing to write into non-empty directory: " + dir.string());
    }
  } else if (!fs::create_directories(dir, ec)) {
    throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  }
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw IoError("write failed: " + path.string());
}

/// Runs jobs on up to `workers` threads. Each job owns disjoint state; any
/// exception is rethrown after all threads join.
void run_jobs(std::vector<std::function<void()>>& jobs, std::size_t workers) {
  workers = std::max<std::size_t>(1, std::min(workers, jobs.size()));
  if (workers == 1) {
    for (auto& j : jobs) j();
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= jobs.size()) break;
        try {
          jobs[i]();
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

trainer::RunRecord train_checked(const trainer::TrainConfig& cfg,
                                 const trainer::Dataset& data, const std::string& what) {
  trainer::RunRecord rec = trainer::train(cfg, data);
  if (!rec.valid) {
    throw NumericalError(what + " aborted: " + rec.abort_reason);
  }
  return rec;
}

} // namespace

fs::path run_train(const config::RunConfig& cfg, const fs::path& out_dir) {
  require_fresh_dir(out_dir);
  const trainer::Dataset data = bench::generate(cfg.data);
  const trainer::RunRecord rec = trainer::train(cfg.train, data);
  runio::save_run(rec, cfg, out_dir);
  if (!rec.valid) {
    throw NumericalError("training aborted: " + rec.abort_reason +
                         " (partial archive written to " + out_dir.string() + ")");
  }
  return out_dir;
}

BenchResult run_bench_suite(const config::SuiteConfig& cfg, const fs::path& out_dir,
                            std::size_t workers, bool save_archives) {
  if (save_archives) require_fresh_dir(out_dir);

  BenchResult result;
  result.methods = cfg.methods;
  result.seeds = cfg.seeds;
  const std::size_t k = cfg.base.data.task_count();
  const std::size_t n_seeds = cfg.seeds.size();

  result.metrics.assign(cfg.methods.size(),
                        std::vector<std::vector<double>>(n_seeds, std::vector<double>(k)));
  result.stl_metrics.assign(n_seeds, std::vector<double>(k));

  auto child_config = [&](const std::string& method, std::uint64_t seed) {
    config::RunConfig child = cfg.base;
    const auto strat = weighting::strategy_from_string(method);
    if (!strat) throw ConfigError("bench: unknown method '" + method + "'");
    if (strat == weighting::Strategy::NTKMTL) {
      child.train.strategy = weighting::StrategyKind::ntkmtl();
    } else if (strat == weighting::Strategy::NTKMTL_SR) {
      child.train.strategy = weighting::StrategyKind::ntkmtl_sr();
    } else {
      child.train.strategy = weighting::StrategyKind{*strat};
    }
    child.train.strategy.temperature = cfg.base.train.strategy.temperature;
    child.train.strategy.ema = cfg.base.train.strategy.ema;
    child.train.seed = seed;
    child.train.net_spec.seed = seed;
    return child;
  };

  std::vector<std::function<void()>> jobs;
  // STL baselines: one single-head run per (task, seed).
  for (std::size_t si = 0; si < n_seeds; ++si) {
    for (std::size_t t = 0; t < k; ++t) {
      jobs.push_back([&, si, t]() {
        config::RunConfig child = child_config("ls", cfg.seeds[si]);
        trainer::TrainConfig stl_cfg = child.train;
        stl_cfg.net_spec.heads = {child.train.net_spec.heads[t]};

        trainer::Dataset full = bench::generate(child.data);
        trainer::Dataset single;
        single.train.inputs = full.train.inputs;
        single.train.targets = {full.train.targets[t]};
        single.eval.inputs = full.eval.inputs;
        single.eval.targets = {full.eval.targets[t]};

        const trainer::RunRecord rec = train_checked(
            stl_cfg, single, "stl task " + std::to_string(t));
        result.stl_metrics[si][t] = rec.final_metrics.at(0);
        if (save_archives) {
          config::RunConfig archived = child;
          archived.train = stl_cfg;
          runio::save_run(rec, archived,
                          out_dir / ("stl-t" + std::to_string(t) + "-s" +
                                     std::to_string(cfg.seeds[si])));
        }
      });
    }
  }
  for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
    for (std::size_t si = 0; si < n_seeds; ++si) {
      jobs.push_back([&, mi, si]() {
        const config::RunConfig child = child_config(cfg.methods[mi], cfg.seeds[si]);
        const trainer::Dataset data = bench::generate(child.data);
        const trainer::RunRecord rec =
            train_checked(child.train, data, cfg.methods[mi] + " run");
        result.metrics[mi][si] = rec.final_metrics;
        if (save_archives) {
          runio::save_run(rec, child,
                          out_dir / (cfg.methods[mi] + "-s" +
                                     std::to_string(cfg.seeds[si])));
        }
      });
    }
  }
  run_jobs(jobs, workers);

  // Reduction, fixed order. All metrics are losses (lower is better).
  const std::vector<int> directions(k, 0);
  result.delta_m.assign(cfg.methods.size(), std::vector<double>(n_seeds, 0.0));
  for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
    for (std::size_t si = 0; si < n_seeds; ++si) {
      result.delta_m[mi][si] =
          bench::delta_m(result.metrics[mi][si], result.stl_metrics[si], directions);
    }
  }

  result.mean_table.methods = cfg.methods;
  result.mean_table.higher_is_better = directions;
  result.mean_table.values.assign(cfg.methods.size(), std::vector<double>(k, 0.0));
  result.mean_delta_m.assign(cfg.methods.size(), 0.0);
  for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
    for (std::size_t si = 0; si < n_seeds; ++si) {
      for (std::size_t t = 0; t < k; ++t) {
        result.mean_table.values[mi][t] += result.metrics[mi][si][t];
      }
      result.mean_delta_m[mi] += result.delta_m[mi][si];
    }
    for (std::size_t t = 0; t < k; ++t) {
      result.mean_table.values[mi][t] /= static_cast<double>(n_seeds);
    }
    result.mean_delta_m[mi] /= static_cast<double>(n_seeds);
  }
  result.mean_rank = bench::mean_rank(result.mean_table);

  if (save_archives) {
    std::ostringstream table;
    table << "method";
    for (std::size_t t = 0; t < k; ++t) table << "\tloss" << t;
    table << "\tdelta_m\tmr\n";
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
      table << cfg.methods[mi];
      for (std::size_t t = 0; t < k; ++t) {
        table << "\t" << runio::format_double(result.mean_table.values[mi][t]);
      }
      table << "\t" << runio::format_double(result.mean_delta_m[mi]) << "\t"
            << runio::format_double(result.mean_rank[mi]) << "\n";
    }
    write_text(out_dir / "table.tsv", table.str());

    std::ostringstream per_seed;
    per_seed << "method\tseed";
    for (std::size_t t = 0; t < k; ++t) per_seed << "\tloss" << t;
    per_seed << "\tdelta_m\n";
    for (std::size_t si = 0; si < n_seeds; ++si) {
      per_seed << "stl\t" << cfg.seeds[si];
      for (std::size_t t = 0; t < k; ++t) {
        per_seed << "\t" << runio::format_double(result.stl_metrics[si][t]);
      }
      per_seed << "\t" << runio::format_double(0.0) << "\n";
    }
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
      for (std::size_t si = 0; si < n_seeds; ++si) {
        per_seed << cfg.methods[mi] << "\t" << cfg.seeds[si];
        for (std::size_t t = 0; t < k; ++t) {
          per_seed << "\t" << runio::format_double(result.metrics[mi][si][t]);
        }
        per_seed << "\t" << runio::format_double(result.delta_m[mi][si]) << "\n";
      }
    }
    write_text(out_dir / "per_seed.tsv", per_seed.str());
  }

  return result;
}

DynamicsResult run_dynamics_experiment(const config::DynamicsConfig& cfg) {
  cfg.validate();

  // Noiseless multi-frequency targets, one frequency per task.
  bench::SynthSpec data_spec;
  data_spec.kind = bench::SynthKind::multifreq;
  data_spec.input_dim = cfg.input_dim;
  data_spec.samples = cfg.samples;
  data_spec.eval_samples = 2;
  data_spec.noise_std = 0.0;
  data_spec.seed = cfg.seed;
  for (std::size_t t = 0; t < cfg.tasks; ++t) {
    data_spec.freqs.push_back({static_cast<double>(t + 1)});
  }

  const trainer::Dataset data = bench::generate(data_spec);

  net::NetSpec spec;
  spec.input_dim = cfg.input_dim;
  spec.trunk = {cfg.width};
  spec.repr_dim = cfg.width;
  spec.heads.assign(cfg.tasks, net::HeadSpec{{}, 1});
  spec.activation = net::Activation::tanh;
  spec.seed = derive_seed(cfg.seed, 0xD1);

  net::MtlNet model = net::init(spec);
  const net::TaskBatch batch(data.train.inputs, data.train.targets, 1);

  const ntk::ExtendedNtk kernel =
      ntk::extended_ntk(model, batch, ntk::Granularity::per_sample());
  const linalg::EigenDecomp eig = linalg::sym_eig(kernel.assembled);

  const std::vector<double> y = trainer::stack_targets(data.train);
  std::vector<double> o0;
  {
    const net::ForwardTrace tr = model.forward(batch.inputs);
    for (std::size_t t = 0; t < cfg.tasks; ++t) {
      for (std::size_t s = 0; s < batch.size(); ++s) {
        o0.insert(o0.end(), tr.outputs[t][s].begin(), tr.outputs[t][s].end());
      }
    }
  }

  trainer::FlowTrajectory traj =
      trainer::gradient_flow(model, data.train, cfg.eta, cfg.t_end, cfg.dt,
                             cfg.record_points);

  // Frozen-kernel prediction at each recorded time, via the decomposition.
  const std::size_t dim = kernel.assembled.dim();
  auto predict = [&](double t) {
    std::vector<double> p(dim, 0.0);
    std::vector<double> e0(dim);
    for (std::size_t i = 0; i < dim; ++i) e0[i] = o0[i] - y[i];
    // Q exp(-eta*Lambda*t) Q^T e0
    std::vector<double> proj(dim, 0.0);
    for (std::size_t j = 0; j < dim; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < dim; ++i) s += eig.eigenvectors(i, j) * e0[i];
      proj[j] = s * std::exp(-cfg.eta * eig.eigenvalues[j] * t);
    }
    for (std::size_t i = 0; i < dim; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < dim; ++j) s += eig.eigenvectors(i, j) * proj[j];
      p[i] = y[i] + s;
    }
    return p;
  };

  DynamicsResult result;
  result.eigenvalues = eig.eigenvalues;

  double num = 0.0, den = 0.0;
  std::vector<std::vector<double>> projections;
  projections.reserve(traj.times.size());
  for (std::size_t s = 0; s < traj.times.size(); ++s) {
    const std::vector<double> pred = predict(traj.times[s]);
    const std::vector<double>& act = traj.outputs[s];
    for (std::size_t i = 0; i < dim; ++i) {
      const double d = pred[i] - act[i];
      num += d * d;
      den += act[i] * act[i];
    }
    projections.push_back(dynamics::eigenbasis_projection(eig, act, y));
  }
  result.trajectory_rel_err = std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
  result.prediction_ok = result.trajectory_rel_err <= cfg.rel_err_max;

  result.report = dynamics::fit_decay(traj.times, projections, eig.eigenvalues, cfg.eta);

  // Top-3 eigencomponents with trustworthy fits must decay at ~ eta*lambda.
  result.rates_ok = true;
  for (std::size_t j = 0; j < std::min<std::size_t>(3, dim); ++j) {
    if (!result.report.included[j] || result.report.r_squared[j] <= 0.95) continue;
    const double expected = cfg.eta * eig.eigenvalues[j];
    const double rel = std::abs(result.report.fitted_rates[j] - expected) /
                       std::max(expected, 1e-300);
    result.worst_rate_rel_err = std::max(result.worst_rate_rel_err, rel);
    ++result.top_checked;
    if (rel > cfg.rate_tol) result.rates_ok = false;
  }
  if (result.top_checked == 0) result.rates_ok = false;

  std::vector<double> lam, rate;
  for (std::size_t j = 0; j < dim; ++j) {
    if (!result.report.included[j]) continue;
    lam.push_back(eig.eigenvalues[j]);
    rate.push_back(result.report.fitted_rates[j]);
  }
  result.spearman = lam.size() >= 2 ? bench::spearman(lam, rate) : 0.0;
  result.spearman_ok = result.spearman >= cfg.spearman_min;

  return result;
}

DynamicsResult run_dynamics(const config::DynamicsConfig& cfg, const fs::path& out_dir) {
  require_fresh_dir(out_dir);
  const DynamicsResult result = run_dynamics_experiment(cfg);

  write_text(out_dir / "config.toml", config::write_dynamics_config(cfg));
  runio::save_decay(result.report, out_dir);
  runio::emit_plotdata(out_dir, runio::PlotKind::decay_fit, out_dir / "plots", "dynamics");

  std::ostringstream summary;
  summary << "trajectory_rel_err = " << runio::format_double(result.trajectory_rel_err)
          << " (max " << runio::format_double(cfg.rel_err_max) << ")\n"
          << "top_rate_rel_err = " << runio::format_double(result.worst_rate_rel_err)
          << " over " << result.top_checked << " components (max "
          << runio::format_double(cfg.rate_tol) << ")\n"
          << "spearman = " << runio::format_double(result.spearman) << " (min "
          << runio::format_double(cfg.spearman_min) << ")\n"
          << "prediction_ok = " << (result.prediction_ok ? "true" : "false") << "\n"
          << "rates_ok = " << (result.rates_ok ? "true" : "false") << "\n"
          << "spearman_ok = " << (result.spearman_ok ? "true" : "false") << "\n";
  write_text(out_dir / "summary.txt", summary.str());
  return result;
}

SweepResult run_sweep(const config::SweepConfig& cfg, const std::string& param,
                      const std::vector<double>& values, const fs::path& out_dir,
                      std::size_t workers) {
  if (values.empty()) throw ConfigError("sweep: no values given");
  require_fresh_dir(out_dir);

  const std::size_t n_seeds = cfg.seeds.size();
  // records[value][seed]
  std::vector<std::vector<trainer::RunRecord>> records(
      values.size(), std::vector<trainer::RunRecord>(n_seeds));

  std::vector<std::function<void()>> jobs;
  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    for (std::size_t si = 0; si < n_seeds; ++si) {
      jobs.push_back([&, vi, si]() {
        config::RunConfig child = cfg.base;
        config::set_param(child, param, values[vi]);
        child.train.seed = cfg.seeds[si];
        child.train.net_spec.seed = cfg.seeds[si];
        const trainer::Dataset data = bench::generate(child.data);
        trainer::RunRecord rec =
            train_checked(child.train, data, "sweep " + param + " child");

        std::string pname = param;
        std::replace(pname.begin(), pname.end(), '.', '_');
        runio::save_run(rec, child,
                        out_dir / (pname + "=" + runio::format_double(values[vi]) + "-s" +
                                   std::to_string(cfg.seeds[si])));
        records[vi][si] = std::move(rec);
      });
    }
  }
  run_jobs(jobs, workers);

  SweepResult result;
  result.param = param;
  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    SweepRow row;
    row.value = values[vi];
    double time_acc = 0.0;
    double loss_acc = 0.0;
    std::size_t loss_count = 0;
    for (std::size_t si = 0; si < n_seeds; ++si) {
      time_acc += records[vi][si].total_wall_time_s;
      for (double l : records[vi][si].final_metrics) {
        loss_acc += l;
        ++loss_count;
      }
    }
    row.mean_wall_time_s = time_acc / static_cast<double>(n_seeds);
    row.mean_eval_loss = loss_count ? loss_acc / static_cast<double>(loss_count) : 0.0;

    // Across-seed variance of the weight trajectories, averaged over rows
    // and tasks. Rows align because the cadence and iteration count match.
    if (n_seeds >= 2) {
      const std::size_t n_rows = records[vi][0].rows.size();
      const std::size_t k = records[vi][0].rows.empty()
                                ? 0
                                : records[vi][0].rows[0].omegas.size();
      double var_acc = 0.0;
      std::size_t var_count = 0;
      for (std::size_t r = 0; r < n_rows; ++r) {
        for (std::size_t t = 0; t < k; ++t) {
          double mean = 0.0;
          for (std::size_t si = 0; si < n_seeds; ++si) {
            mean += records[vi][si].rows[r].omegas[t];
          }
          mean /= static_cast<double>(n_seeds);
          double var = 0.0;
          for (std::size_t si = 0; si < n_seeds; ++si) {
            const double d = records[vi][si].rows[r].omegas[t] - mean;
            var += d * d;
          }
          var_acc += var / static_cast<double>(n_seeds - 1);
          ++var_count;
        }
      }
      row.omega_seed_variance = var_count ? var_acc / static_cast<double>(var_count) : 0.0;
    }
    result.rows.push_back(row);
  }

  std::stable_sort(result.rows.begin(), result.rows.end(),
                   [](const SweepRow& a, const SweepRow& b) { return a.value < b.value; });

  std::ostringstream summary;
  summary << "value\tmean_wall_time_s\tomega_seed_variance\tmean_eval_loss\n";
  for (const SweepRow& r : result.rows) {
    summary << runio::format_double(r.value) << "\t"
            << runio::format_double(r.mean_wall_time_s) << "\t"
            << runio::format_double(r.omega_seed_variance) << "\t"
            << runio::format_double(r.mean_eval_loss) << "\n";
  }
  write_text(out_dir / "summary.tsv", summary.str());
  return result;
}

void run_report(const std::vector<fs::path>& archives, const fs::path& out_dir) {
  if (archives.empty()) throw ConfigError("report: no archives given");
  require_fresh_dir(out_dir);

  std::ostringstream summary;
  for (const fs::path& dir : archives) {
    const std::string label = dir.filename().string();
    if (fs::exists(dir / runio::ArchivePaths::rows)) {
      runio::emit_plotdata(dir, runio::PlotKind::loss_curves, out_dir, label);
      runio::emit_plotdata(dir, runio::PlotKind::weight_trajectories, out_dir, label);
      runio::emit_plotdata(dir, runio::PlotKind::eig_trajectories, out_dir, label);
      const runio::LoadedRun run = runio::load_run(dir);
      summary << label << ": "
              << (run.record.valid ? "valid" : "invalid (" + run.record.abort_reason + ")")
              << ", rows " << run.record.rows.size() << ", final losses [";
      for (std::size_t t = 0; t < run.record.final_metrics.size(); ++t) {
        if (t) summary << ", ";
        summary << runio::format_double(run.record.final_metrics[t]);
      }
      summary << "]\n";
    }
    if (fs::exists(dir / runio::ArchivePaths::decay)) {
      runio::emit_plotdata(dir, runio::PlotKind::decay_fit, out_dir, label);
      summary << label << ": decay report present\n";
    }
  }
  write_text(out_dir / "summary.txt", summary.str());
}

int run(const Command& cmd) {
  try {
    // Validate paths up front, before any computation.
    if (cmd.kind != Command::Kind::report) {
      if (cmd.config_path.empty() || !fs::exists(cmd.config_path)) {
        throw ConfigError("config file not found: " + cmd.config_path.string());
      }
    }
    if (cmd.out_dir.empty()) throw ConfigError("no output directory given");
    for (const fs::path& a : cmd.archives) {
      if (!fs::exists(a)) throw IoError("archive not found: " + a.string());
    }

    switch (cmd.kind) {
      case Command::Kind::train: {
        config::Doc doc = config::Doc::parse_file(cmd.config_path);
        config::RunConfig cfg = config::parse_run_config(doc);
        doc.reject_unknown();
        if (cmd.seed_override) {
          cfg.train.seed = *cmd.seed_override;
          cfg.train.net_spec.seed = *cmd.seed_override;
        }
        run_train(cfg, cmd.out_dir);
        std::cout << "archive: " << cmd.out_dir.string() << "\n";
        break;
      }
      case Command::Kind::bench: {
        config::Doc doc = config::Doc::parse_file(cmd.config_path);
        config::SuiteConfig cfg = config::parse_suite_config(doc);
        doc.reject_unknown();
        if (cmd.seed_override) cfg.seeds = {*cmd.seed_override};
        const BenchResult r = run_bench_suite(cfg, cmd.out_dir, cmd.workers);
        std::cout << "method\tdelta_m\tmr\n";
        for (std::size_t mi = 0; mi < r.methods.size(); ++mi) {
          std::cout << r.methods[mi] << "\t" << runio::format_double(r.mean_delta_m[mi])
                    << "\t" << runio::format_double(r.mean_rank[mi]) << "\n";
        }
        break;
      }
      case Command::Kind::dynamics: {
        config::Doc doc = config::Doc::parse_file(cmd.config_path);
        config::DynamicsConfig cfg = config::parse_dynamics_config(doc);
        doc.reject_unknown();
        if (cmd.seed_override) cfg.seed = *cmd.seed_override;
        const DynamicsResult r = run_dynamics(cfg, cmd.out_dir);
        std::cout << "trajectory_rel_err " << runio::format_double(r.trajectory_rel_err)
                  << ", spearman " << runio::format_double(r.spearman) << "\n";
        if (!r.prediction_ok || !r.rates_ok || !r.spearman_ok) {
          throw NumericalError("dynamics validation failed, see " +
                               (cmd.out_dir / "summary.txt").string());
        }
        break;
      }
      case Command::Kind::sweep: {
        if (cmd.sweep_param.empty()) throw ConfigError("sweep: --param required");
        if (cmd.sweep_values.empty()) throw ConfigError("sweep: --values required");
        config::Doc doc = config::Doc::parse_file(cmd.config_path);
        config::SweepConfig cfg = config::parse_sweep_config(doc);
        doc.reject_unknown();
        if (cmd.seed_override) cfg.seeds = {*cmd.seed_override};
        const SweepResult r =
            run_sweep(cfg, cmd.sweep_param, cmd.sweep_values, cmd.out_dir, cmd.workers);
        std::cout << "value\twall_time_s\tomega_var\n";
        for (const SweepRow& row : r.rows) {
          std::cout << runio::format_double(row.value) << "\t"
                    << runio::format_double(row.mean_wall_time_s) << "\t"
                    << runio::format_double(row.omega_seed_variance) << "\n";
        }
        break;
      }
      case Command::Kind::report: {
        run_report(cmd.archives, cmd.out_dir);
        std::cout << "report written to " << cmd.out_dir.string() << "\n";
        break;
      }
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidInputError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "i/o failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

} // namespace ntklab::commands
