#include "ntklab/runio.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

namespace ntklab::runio {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text, const std::string& context) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError(context + ": cannot parse number '" + text + "'");
  }
  return v;
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    const std::size_t next = line.find('\t', pos);
    out.push_back(line.substr(pos, (next == std::string::npos ? line.size() : next) - pos));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw IoError("write failed: " + path.string());
}

std::ifstream open_for_read(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  return in;
}

} // namespace

fs::path save_run(const trainer::RunRecord& record, const config::RunConfig& cfg,
                  const fs::path& dir) {
  std::error_code ec;
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) throw IoError("save_run: not a directory: " + dir.string());
    if (!fs::is_empty(dir, ec)) {
      throw IoError("save_run: refusing to write into non-empty directory: " + dir.string());
    }
  } else if (!fs::create_directories(dir, ec)) {
    throw IoError("save_run: cannot create " + dir.string() + ": " + ec.message());
  }

  const std::size_t k = cfg.train.net_spec.task_count();

  write_file(dir / ArchivePaths::config, config::write_run_config(cfg));

  {
    std::ostringstream meta;
    meta << "[meta]\n";
    meta << "schema_version = " << kSchemaVersion << "\n";
    meta << "code_version = \"" << kCodeVersion << "\"\n";
    meta << "seed = " << cfg.train.seed << "\n";
    meta << "tasks = " << k << "\n";
    meta << "valid = " << (record.valid ? "true" : "false") << "\n";
    if (!record.abort_reason.empty()) {
      meta << "abort_reason = \"" << record.abort_reason << "\"\n";
    }
    meta << "wall_time_s = " << format_double(record.total_wall_time_s) << "\n";
    meta << "written_at = \"" << now_iso8601() << "\"\n";
    write_file(dir / ArchivePaths::meta, meta.str());
  }

  {
    std::ostringstream rows;
    rows << "iter";
    for (std::size_t t = 0; t < k; ++t) rows << "\tloss" << t;
    for (std::size_t t = 0; t < k; ++t) rows << "\tomega" << t;
    for (std::size_t t = 0; t < k; ++t) rows << "\tlambda" << t;
    rows << "\n";
    for (const trainer::RunRow& r : record.rows) {
      rows << r.iteration;
      for (double v : r.losses) rows << "\t" << format_double(v);
      for (double v : r.omegas) rows << "\t" << format_double(v);
      for (double v : r.lambdas) rows << "\t" << format_double(v);
      rows << "\n";
    }
    write_file(dir / ArchivePaths::rows, rows.str());
  }

  {
    std::ostringstream timing;
    timing << "iter\twall_time_s\n";
    for (const trainer::RunRow& r : record.rows) {
      timing << r.iteration << "\t" << format_double(r.wall_time_s) << "\n";
    }
    write_file(dir / ArchivePaths::timing, timing.str());
  }

  {
    std::ostringstream metrics;
    metrics << "task\teval_loss\n";
    for (std::size_t t = 0; t < record.final_metrics.size(); ++t) {
      metrics << t << "\t" << format_double(record.final_metrics[t]) << "\n";
    }
    write_file(dir / ArchivePaths::metrics, metrics.str());
  }

  return dir;
}

LoadedRun load_run(const fs::path& dir) {
  if (!fs::exists(dir / ArchivePaths::meta) || !fs::exists(dir / ArchivePaths::config)) {
    throw IoError("load_run: not a run archive (missing meta/config): " + dir.string());
  }

  LoadedRun out;

  config::Doc meta = config::Doc::parse_file(dir / ArchivePaths::meta);
  const std::int64_t schema = meta.get_int("meta", "schema_version");
  if (schema != kSchemaVersion) {
    throw ConfigError("load_run: unsupported schema version " + std::to_string(schema) +
                      " in " + (dir / ArchivePaths::meta).string());
  }
  out.record.valid = meta.get_bool("meta", "valid");
  out.record.abort_reason = meta.get_string("meta", "abort_reason", std::string());
  out.record.total_wall_time_s = meta.get_real("meta", "wall_time_s", 0.0);
  meta.consume_section("meta");

  config::Doc cfg_doc = config::Doc::parse_file(dir / ArchivePaths::config);
  out.config = config::parse_run_config(cfg_doc);
  cfg_doc.reject_unknown();
  out.record.config = out.config.train;

  const std::size_t k = out.config.train.net_spec.task_count();
  {
    const fs::path path = dir / ArchivePaths::rows;
    std::ifstream raw = open_for_read(path);
    std::stringstream buf;
    buf << raw.rdbuf();
    const std::string content = buf.str();
    if (content.empty()) throw ConfigError(path.string() + ":1: missing header");
    if (content.back() != '\n') {
      const std::size_t lines = static_cast<std::size_t>(
          std::count(content.begin(), content.end(), '\n'));
      throw ConfigError(path.string() + ": truncated final line (last good line " +
                        std::to_string(lines) + ")");
    }
    std::istringstream in(content);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError(path.string() + ":1: missing header");
    const std::size_t expected = 1 + 3 * k;
    if (split_tabs(line).size() != expected) {
      throw ConfigError(path.string() + ":1: header has wrong column count");
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      const std::vector<std::string> f = split_tabs(line);
      if (f.size() != expected) {
        throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                          ": wrong field count (last good line " + std::to_string(lineno - 1) +
                          ")");
      }
      trainer::RunRow row;
      const std::string ctx = path.string() + ":" + std::to_string(lineno);
      row.iteration = static_cast<std::size_t>(parse_double(f[0], ctx));
      for (std::size_t t = 0; t < k; ++t) row.losses.push_back(parse_double(f[1 + t], ctx));
      for (std::size_t t = 0; t < k; ++t) {
        row.omegas.push_back(parse_double(f[1 + k + t], ctx));
      }
      for (std::size_t t = 0; t < k; ++t) {
        row.lambdas.push_back(parse_double(f[1 + 2 * k + t], ctx));
      }
      out.record.rows.push_back(std::move(row));
    }
  }

  {
    const fs::path path = dir / ArchivePaths::timing;
    if (fs::exists(path)) {
      std::ifstream in = open_for_read(path);
      std::string line;
      std::getline(in, line); // header
      std::size_t i = 0;
      std::size_t lineno = 1;
      while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::vector<std::string> f = split_tabs(line);
        if (f.size() != 2 || i >= out.record.rows.size()) {
          throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                            ": does not match rows.tsv");
        }
        out.record.rows[i++].wall_time_s =
            parse_double(f[1], path.string() + ":" + std::to_string(lineno));
      }
    }
  }

  {
    const fs::path path = dir / ArchivePaths::metrics;
    if (fs::exists(path)) {
      std::ifstream in = open_for_read(path);
      std::string line;
      std::getline(in, line); // header
      std::size_t lineno = 1;
      while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::vector<std::string> f = split_tabs(line);
        if (f.size() != 2) {
          throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected 2 fields");
        }
        out.record.final_metrics.push_back(
            parse_double(f[1], path.string() + ":" + std::to_string(lineno)));
      }
    }
  }

  return out;
}

void save_decay(const dynamics::DecayReport& report, const fs::path& dir) {
  std::ostringstream out;
  out << "# eta = " << format_double(report.eta) << ", horizon = " << report.horizon << "\n";
  out << "component\tlambda\tfitted_rate\tr_squared\tincluded\n";
  for (std::size_t j = 0; j < report.eigenvalues.size(); ++j) {
    out << j << "\t" << format_double(report.eigenvalues[j]) << "\t"
        << format_double(report.included[j] ? report.fitted_rates[j] : 0.0) << "\t"
        << format_double(report.included[j] ? report.r_squared[j] : 0.0) << "\t"
        << (report.included[j] ? 1 : 0) << "\n";
  }
  write_file(dir / ArchivePaths::decay, out.str());
}

dynamics::DecayReport load_decay(const fs::path& dir) {
  const fs::path path = dir / ArchivePaths::decay;
  if (!fs::exists(path)) {
    throw IoError("load_decay: no decay report in " + dir.string());
  }
  std::ifstream in = open_for_read(path);
  dynamics::DecayReport rep;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') {
      // Comment header carries eta and horizon.
      const std::size_t eta_pos = line.find("eta = ");
      if (eta_pos != std::string::npos) {
        const std::size_t comma = line.find(',', eta_pos);
        rep.eta = parse_double(line.substr(eta_pos + 6, comma - eta_pos - 6),
                               path.string() + ":" + std::to_string(lineno));
        const std::size_t h_pos = line.find("horizon = ");
        if (h_pos != std::string::npos) {
          rep.horizon = static_cast<std::size_t>(
              parse_double(line.substr(h_pos + 10), path.string()));
        }
      }
      continue;
    }
    if (line.rfind("component", 0) == 0) continue;
    const std::vector<std::string> f = split_tabs(line);
    if (f.size() != 5) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected 5 fields");
    }
    const std::string ctx = path.string() + ":" + std::to_string(lineno);
    rep.eigenvalues.push_back(parse_double(f[1], ctx));
    rep.fitted_rates.push_back(parse_double(f[2], ctx));
    rep.r_squared.push_back(parse_double(f[3], ctx));
    rep.included.push_back(f[4] == "1");
  }
  return rep;
}

std::vector<fs::path> emit_plotdata(const fs::path& archive_dir, PlotKind kind,
                                    const fs::path& out_dir, const std::string& label) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);

  std::vector<fs::path> written;
  std::ostringstream manifest;
  std::string file_name;
  std::ostringstream body;
  std::vector<std::string> columns;

  if (kind == PlotKind::decay_fit) {
    const dynamics::DecayReport rep = load_decay(archive_dir);
    file_name = "decay_fit__" + label + ".dat";
    columns = {"lambda", "fitted_rate", "r_squared"};
    for (std::size_t j = 0; j < rep.eigenvalues.size(); ++j) {
      if (!rep.included[j]) continue;
      body << format_double(rep.eigenvalues[j]) << " " << format_double(rep.fitted_rates[j])
           << " " << format_double(rep.r_squared[j]) << "\n";
    }
  } else {
    const LoadedRun run = load_run(archive_dir);
    if (run.record.rows.empty()) {
      throw IoError("emit_plotdata: archive has no rows: " + archive_dir.string());
    }
    const std::size_t k = run.config.train.net_spec.task_count();
    const std::size_t eig_every = run.config.train.eig_record_every;
    switch (kind) {
      case PlotKind::loss_curves: {
        file_name = "loss_curves__" + label + ".dat";
        columns = {"iter"};
        for (std::size_t t = 0; t < k; ++t) columns.push_back("loss_t" + std::to_string(t));
        for (const auto& r : run.record.rows) {
          body << r.iteration;
          for (double v : r.losses) body << " " << format_double(v);
          body << "\n";
        }
        break;
      }
      case PlotKind::weight_trajectories: {
        file_name = "weight_trajectories__" + label + ".dat";
        columns = {"iter"};
        for (std::size_t t = 0; t < k; ++t) columns.push_back("omega_t" + std::to_string(t));
        for (const auto& r : run.record.rows) {
          body << r.iteration;
          for (double v : r.omegas) body << " " << format_double(v);
          body << "\n";
        }
        break;
      }
      case PlotKind::eig_trajectories: {
        file_name = "eig_trajectories__" + label + ".dat";
        columns = {"iter"};
        for (std::size_t t = 0; t < k; ++t) columns.push_back("lambda_t" + std::to_string(t));
        for (const auto& r : run.record.rows) {
          if (r.iteration % eig_every != 0) continue;
          body << r.iteration;
          for (double v : r.lambdas) body << " " << format_double(v);
          body << "\n";
        }
        break;
      }
      case PlotKind::decay_fit:
        break; // handled above
    }
  }

  const fs::path file_path = out_dir / file_name;
  write_file(file_path, body.str());
  written.push_back(file_path);

  manifest << file_name;
  for (const std::string& c : columns) manifest << "\t" << c;
  manifest << "\n";

  const fs::path manifest_path = out_dir / "manifest.tsv";
  // Append so several series can share one manifest.
  std::ofstream mf(manifest_path, std::ios::binary | std::ios::app);
  if (!mf) throw IoError("cannot open " + manifest_path.string());
  mf << manifest.str();
  written.push_back(manifest_path);
  return written;
}

} // namespace ntklab::runio
