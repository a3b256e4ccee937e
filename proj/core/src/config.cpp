#include "ntklab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ntklab/runio.hpp"

namespace ntklab::config {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool parse_scalar(const std::string& text, Doc::Value& v) {
  if (text == "true" || text == "false") {
    v.type = Doc::Value::Type::boolean;
    v.b = (text == "true");
    return true;
  }
  if (text.size() >= 2 && text.front() == '"' && text.back() == '"') {
    v.type = Doc::Value::Type::string;
    v.s = text.substr(1, text.size() - 2);
    return true;
  }
  // Integer first; fall back to real.
  {
    std::int64_t i = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), i);
    if (res.ec == std::errc() && res.ptr == text.data() + text.size()) {
      v.type = Doc::Value::Type::integer;
      v.i = i;
      return true;
    }
  }
  {
    double d = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), d);
    if (res.ec == std::errc() && res.ptr == text.data() + text.size()) {
      v.type = Doc::Value::Type::real;
      v.d = d;
      return true;
    }
  }
  return false;
}

} // namespace

Doc Doc::parse_string(const std::string& text, const std::string& name) {
  Doc doc;
  doc.name_ = name;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // Strip comments outside of strings.
    bool in_str = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_str = !in_str;
      if (line[i] == '#' && !in_str) {
        line.resize(i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(name + ":" + std::to_string(lineno) + ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        throw ConfigError(name + ":" + std::to_string(lineno) + ": empty section name");
      }
      doc.sections_[section];
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(name + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string rhs = trim(line.substr(eq + 1));
    if (key.empty() || rhs.empty()) {
      throw ConfigError(name + ":" + std::to_string(lineno) + ": expected key = value");
    }
    if (doc.sections_[section].count(key)) {
      throw ConfigError(name + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }

    Value v;
    v.line = lineno;
    if (rhs.front() == '[') {
      if (rhs.back() != ']') {
        throw ConfigError(name + ":" + std::to_string(lineno) + ": unterminated array");
      }
      v.type = Value::Type::array;
      const std::string inner = trim(rhs.substr(1, rhs.size() - 2));
      if (!inner.empty()) {
        std::size_t pos = 0;
        while (pos <= inner.size()) {
          std::size_t next = inner.find(',', pos);
          const std::string item =
              trim(inner.substr(pos, (next == std::string::npos ? inner.size() : next) - pos));
          Value elem;
          elem.line = lineno;
          if (item.empty() || !parse_scalar(item, elem)) {
            throw ConfigError(name + ":" + std::to_string(lineno) + ": bad array element '" +
                              item + "'");
          }
          v.array.push_back(std::move(elem));
          if (next == std::string::npos) break;
          pos = next + 1;
        }
      }
    } else if (!parse_scalar(rhs, v)) {
      throw ConfigError(name + ":" + std::to_string(lineno) + ": cannot parse value '" + rhs +
                        "' for key '" + key + "'");
    }
    doc.sections_[section][key] = std::move(v);
  }
  return doc;
}

Doc Doc::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("config: cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_string(text.str(), path.string());
}

const Doc::Value* Doc::find(const std::string& section, const std::string& key) const {
  const auto sit = sections_.find(section);
  if (sit == sections_.end()) return nullptr;
  const auto kit = sit->second.find(key);
  if (kit == sit->second.end()) return nullptr;
  kit->second.consumed = true;
  return &kit->second;
}

void Doc::fail(const std::string& what) const { throw ConfigError(name_ + ": " + what); }

bool Doc::has(const std::string& section, const std::string& key) const {
  const auto sit = sections_.find(section);
  return sit != sections_.end() && sit->second.count(key) > 0;
}

bool Doc::has_section(const std::string& section) const {
  return sections_.count(section) > 0;
}

std::int64_t Doc::get_int(const std::string& section, const std::string& key,
                          std::optional<std::int64_t> fallback) const {
  const Value* v = find(section, key);
  if (!v) {
    if (fallback) return *fallback;
    fail("missing key [" + section + "] " + key);
  }
  if (v->type != Value::Type::integer) {
    fail("key [" + section + "] " + key + " must be an integer (line " +
         std::to_string(v->line) + ")");
  }
  return v->i;
}

double Doc::get_real(const std::string& section, const std::string& key,
                     std::optional<double> fallback) const {
  const Value* v = find(section, key);
  if (!v) {
    if (fallback) return *fallback;
    fail("missing key [" + section + "] " + key);
  }
  if (v->type == Value::Type::integer) return static_cast<double>(v->i);
  if (v->type != Value::Type::real) {
    fail("key [" + section + "] " + key + " must be a number (line " +
         std::to_string(v->line) + ")");
  }
  return v->d;
}

bool Doc::get_bool(const std::string& section, const std::string& key,
                   std::optional<bool> fallback) const {
  const Value* v = find(section, key);
  if (!v) {
    if (fallback) return *fallback;
    fail("missing key [" + section + "] " + key);
  }
  if (v->type != Value::Type::boolean) {
    fail("key [" + section + "] " + key + " must be a boolean (line " +
         std::to_string(v->line) + ")");
  }
  return v->b;
}

std::string Doc::get_string(const std::string& section, const std::string& key,
                            std::optional<std::string> fallback) const {
  const Value* v = find(section, key);
  if (!v) {
    if (fallback) return *fallback;
    fail("missing key [" + section + "] " + key);
  }
  if (v->type != Value::Type::string) {
    fail("key [" + section + "] " + key + " must be a string (line " +
         std::to_string(v->line) + ")");
  }
  return v->s;
}

std::vector<std::int64_t> Doc::get_int_array(const std::string& section,
                                             const std::string& key, bool required) const {
  const Value* v = find(section, key);
  if (!v) {
    if (!required) return {};
    fail("missing key [" + section + "] " + key);
  }
  if (v->type != Value::Type::array) {
    fail("key [" + section + "] " + key + " must be an array (line " +
         std::to_string(v->line) + ")");
  }
  std::vector<std::int64_t> out;
  for (const Value& e : v->array) {
    if (e.type != Value::Type::integer) {
      fail("key [" + section + "] " + key + " must hold integers (line " +
           std::to_string(v->line) + ")");
    }
    out.push_back(e.i);
  }
  return out;
}

std::vector<double> Doc::get_real_array(const std::string& section, const std::string& key,
                                        bool required) const {
  const Value* v = find(section, key);
  if (!v) {
    if (!required) return {};
    fail("missing key [" + section + "] " + key);
  }
  if (v->type != Value::Type::array) {
    fail("key [" + section + "] " + key + " must be an array (line " +
         std::to_string(v->line) + ")");
  }
  std::vector<double> out;
  for (const Value& e : v->array) {
    if (e.type == Value::Type::integer) {
      out.push_back(static_cast<double>(e.i));
    } else if (e.type == Value::Type::real) {
      out.push_back(e.d);
    } else {
      fail("key [" + section + "] " + key + " must hold numbers (line " +
           std::to_string(v->line) + ")");
    }
  }
  return out;
}

std::vector<std::string> Doc::get_string_array(const std::string& section,
                                               const std::string& key, bool required) const {
  const Value* v = find(section, key);
  if (!v) {
    if (!required) return {};
    fail("missing key [" + section + "] " + key);
  }
  if (v->type != Value::Type::array) {
    fail("key [" + section + "] " + key + " must be an array (line " +
         std::to_string(v->line) + ")");
  }
  std::vector<std::string> out;
  for (const Value& e : v->array) {
    if (e.type != Value::Type::string) {
      fail("key [" + section + "] " + key + " must hold strings (line " +
           std::to_string(v->line) + ")");
    }
    out.push_back(e.s);
  }
  return out;
}

void Doc::consume_section(const std::string& section) {
  auto sit = sections_.find(section);
  if (sit == sections_.end()) return;
  for (auto& [k, v] : sit->second) v.consumed = true;
}

void Doc::reject_unknown() const {
  std::vector<std::string> strays;
  for (const auto& [sec, keys] : sections_) {
    for (const auto& [key, v] : keys) {
      if (!v.consumed) {
        strays.push_back("[" + sec + "] " + key + " (line " + std::to_string(v.line) + ")");
      }
    }
  }
  if (!strays.empty()) {
    std::string msg = name_ + ": unknown key(s): ";
    for (std::size_t i = 0; i < strays.size(); ++i) {
      if (i) msg += ", ";
      msg += strays[i];
    }
    throw ConfigError(msg);
  }
}

namespace {

bench::SynthSpec parse_data(Doc& doc) {
  bench::SynthSpec spec;
  const std::string kind = doc.get_string("data", "kind", std::string("multifreq"));
  if (kind == "multifreq") {
    spec.kind = bench::SynthKind::multifreq;
  } else if (kind == "scalemix") {
    spec.kind = bench::SynthKind::scalemix;
  } else if (kind == "randlin") {
    spec.kind = bench::SynthKind::randlin;
  } else {
    throw ConfigError(doc.name() + ": unknown data kind '" + kind + "'");
  }
  spec.input_dim = static_cast<std::size_t>(doc.get_int("data", "input_dim", 2));
  spec.samples = static_cast<std::size_t>(doc.get_int("data", "samples", 512));
  spec.eval_samples = static_cast<std::size_t>(doc.get_int("data", "eval_samples", 128));
  spec.noise_std = doc.get_real("data", "noise_std", 0.0);
  spec.seed = static_cast<std::uint64_t>(doc.get_int("data", "seed", 0));
  switch (spec.kind) {
    case bench::SynthKind::multifreq: {
      const std::vector<double> fs = doc.get_real_array("data", "freqs");
      const double amp = doc.get_real("data", "amplitude", 1.0);
      spec.dir_scale = doc.get_real("data", "dir_scale", 0.35);
      for (double f : fs) {
        spec.freqs.push_back({f});
        spec.amplitudes.push_back({amp});
      }
      break;
    }
    case bench::SynthKind::scalemix:
      spec.scales = doc.get_real_array("data", "scales");
      break;
    case bench::SynthKind::randlin:
      spec.cond = doc.get_real_array("data", "cond");
      break;
  }
  spec.validate();
  return spec;
}

weighting::StrategyKind parse_strategy(Doc& doc) {
  weighting::StrategyKind kind;
  const std::string s = doc.get_string("strategy", "kind", std::string("ls"));
  const auto parsed = weighting::strategy_from_string(s);
  if (!parsed) throw ConfigError(doc.name() + ": unknown strategy '" + s + "'");
  kind.strategy = *parsed;
  const std::int64_t default_n = kind.strategy == weighting::Strategy::NTKMTL_SR ? 4 : 1;
  kind.n = static_cast<std::size_t>(doc.get_int("strategy", "n", default_n));
  kind.temperature = doc.get_real("strategy", "temperature", 2.0);
  kind.ema = doc.get_real("strategy", "ema", 0.0);
  kind.validate();
  return kind;
}

net::NetSpec parse_net(Doc& doc) {
  net::NetSpec spec;
  const auto trunk = doc.get_int_array("net", "trunk");
  for (std::int64_t w : trunk) {
    if (w <= 0) throw ConfigError(doc.name() + ": trunk widths must be positive");
    spec.trunk.push_back(static_cast<std::size_t>(w));
  }
  const std::string act = doc.get_string("net", "activation", std::string("tanh"));
  if (act == "tanh") {
    spec.activation = net::Activation::tanh;
  } else if (act == "relu") {
    spec.activation = net::Activation::relu;
  } else {
    throw ConfigError(doc.name() + ": unknown activation '" + act + "'");
  }
  spec.seed = static_cast<std::uint64_t>(doc.get_int("net", "seed", 0));
  // heads are attached by finalize_net once the data block is known
  return spec;
}

std::vector<std::size_t> parse_head_hidden(Doc& doc) {
  std::vector<std::size_t> out;
  for (std::int64_t w : doc.get_int_array("net", "head_hidden", false)) {
    if (w <= 0) throw ConfigError(doc.name() + ": head widths must be positive");
    out.push_back(static_cast<std::size_t>(w));
  }
  return out;
}

} // namespace

void finalize_net(RunConfig& cfg) {
  net::NetSpec& n = cfg.train.net_spec;
  n.input_dim = cfg.data.input_dim;
  n.repr_dim = n.trunk.empty() ? n.input_dim : n.trunk.back();
  if (n.heads.empty()) {
    net::HeadSpec head;
    head.output_dim = cfg.data.output_dim();
    n.heads.assign(cfg.data.task_count(), head);
  }
  n.validate();
}

RunConfig parse_run_config(Doc& doc) {
  RunConfig cfg;
  cfg.data = parse_data(doc);
  cfg.train.strategy = parse_strategy(doc);
  cfg.train.net_spec = parse_net(doc);

  const std::vector<std::size_t> head_hidden = parse_head_hidden(doc);
  net::HeadSpec head;
  head.hidden = head_hidden;
  head.output_dim = cfg.data.output_dim();
  cfg.train.net_spec.heads.assign(cfg.data.task_count(), head);

  cfg.train.lr = doc.get_real("run", "lr", 0.1);
  cfg.train.iterations = static_cast<std::size_t>(doc.get_int("run", "iterations", 1000));
  cfg.train.batch_size = static_cast<std::size_t>(doc.get_int("run", "batch_size", 64));
  cfg.train.record_every =
      static_cast<std::size_t>(doc.get_int("run", "record_every", 10));
  cfg.train.eig_record_every =
      static_cast<std::size_t>(doc.get_int("run", "eig_record_every", 100));
  cfg.train.seed = static_cast<std::uint64_t>(doc.get_int("run", "seed", 0));
  const std::string est = doc.get_string("run", "diag_estimator", std::string("sr"));
  if (est == "sr") {
    cfg.train.diag_estimator = trainer::DiagEstimator::sr;
  } else if (est == "full") {
    cfg.train.diag_estimator = trainer::DiagEstimator::full_theta;
  } else {
    throw ConfigError(doc.name() + ": diag_estimator must be 'sr' or 'full'");
  }
  cfg.train.diag_n = static_cast<std::size_t>(doc.get_int("run", "diag_n", 4));

  finalize_net(cfg);
  cfg.train.validate();
  return cfg;
}

SuiteConfig parse_suite_config(Doc& doc) {
  SuiteConfig cfg;
  cfg.base = parse_run_config(doc);
  cfg.methods = doc.get_string_array("suite", "methods", false);
  if (cfg.methods.empty()) {
    if (doc.has("suite", "methods")) {
      throw ConfigError(doc.name() + ": suite methods list is empty");
    }
    cfg.methods = {"ls", "si", "rlw", "dwa", "ntkmtl", "ntkmtl_sr"};
  }
  for (const std::string& m : cfg.methods) {
    if (!weighting::strategy_from_string(m)) {
      throw ConfigError(doc.name() + ": unknown method '" + m + "' in suite");
    }
  }
  std::vector<std::int64_t> seeds = doc.get_int_array("suite", "seeds", false);
  if (seeds.empty()) seeds = {1, 2, 3};
  for (std::int64_t s : seeds) cfg.seeds.push_back(static_cast<std::uint64_t>(s));
  return cfg;
}

SweepConfig parse_sweep_config(Doc& doc) {
  SweepConfig cfg;
  cfg.base = parse_run_config(doc);
  std::vector<std::int64_t> seeds = doc.get_int_array("sweep", "seeds", false);
  if (seeds.empty()) seeds = {1, 2, 3};
  for (std::int64_t s : seeds) cfg.seeds.push_back(static_cast<std::uint64_t>(s));
  return cfg;
}

void DynamicsConfig::validate() const {
  if (width == 0 || tasks == 0 || samples == 0 || input_dim == 0) {
    throw ConfigError("dynamics: width, tasks, samples, input_dim must be >= 1");
  }
  if (!(eta > 0.0) || !(t_end > 0.0) || !(dt > 0.0) || dt > eta) {
    throw ConfigError("dynamics: need eta > 0, t_end > 0 and 0 < dt <= eta");
  }
  if (record_points < 5) throw ConfigError("dynamics: record_points must be >= 5");
}

DynamicsConfig parse_dynamics_config(Doc& doc) {
  DynamicsConfig cfg;
  cfg.width = static_cast<std::size_t>(doc.get_int("dynamics", "width", 512));
  cfg.tasks = static_cast<std::size_t>(doc.get_int("dynamics", "tasks", 2));
  cfg.samples = static_cast<std::size_t>(doc.get_int("dynamics", "samples", 8));
  cfg.input_dim = static_cast<std::size_t>(doc.get_int("dynamics", "input_dim", 2));
  cfg.eta = doc.get_real("dynamics", "eta", 1e-3);
  cfg.t_end = doc.get_real("dynamics", "t_end", 200.0);
  cfg.dt = doc.get_real("dynamics", "dt", 1e-3);
  cfg.record_points =
      static_cast<std::size_t>(doc.get_int("dynamics", "record_points", 50));
  cfg.seed = static_cast<std::uint64_t>(doc.get_int("dynamics", "seed", 0));
  cfg.rel_err_max = doc.get_real("dynamics", "rel_err_max", 0.10);
  cfg.rate_tol = doc.get_real("dynamics", "rate_tol", 0.20);
  cfg.spearman_min = doc.get_real("dynamics", "spearman_min", 0.9);
  cfg.validate();
  return cfg;
}

namespace {

void write_data(std::ostringstream& out, const bench::SynthSpec& d) {
  out << "[data]\n";
  switch (d.kind) {
    case bench::SynthKind::multifreq: out << "kind = \"multifreq\"\n"; break;
    case bench::SynthKind::scalemix: out << "kind = \"scalemix\"\n"; break;
    case bench::SynthKind::randlin: out << "kind = \"randlin\"\n"; break;
  }
  out << "input_dim = " << d.input_dim << "\n";
  out << "samples = " << d.samples << "\n";
  out << "eval_samples = " << d.eval_samples << "\n";
  out << "noise_std = " << runio::format_double(d.noise_std) << "\n";
  out << "seed = " << d.seed << "\n";
  auto write_real_array = [&](const char* key, const std::vector<double>& v) {
    out << key << " = [";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out << ", ";
      out << runio::format_double(v[i]);
    }
    out << "]\n";
  };
  if (d.kind == bench::SynthKind::multifreq) {
    std::vector<double> fs;
    for (const auto& f : d.freqs) fs.push_back(f.at(0));
    write_real_array("freqs", fs);
    const double amp = d.amplitudes.empty() ? 1.0 : d.amplitudes[0][0];
    out << "amplitude = " << runio::format_double(amp) << "\n";
    out << "dir_scale = " << runio::format_double(d.dir_scale) << "\n";
  } else if (d.kind == bench::SynthKind::scalemix) {
    write_real_array("scales", d.scales);
  } else {
    write_real_array("cond", d.cond);
  }
}

void write_run_body(std::ostringstream& out, const RunConfig& cfg) {
  const trainer::TrainConfig& t = cfg.train;
  out << "[run]\n";
  out << "lr = " << runio::format_double(t.lr) << "\n";
  out << "iterations = " << t.iterations << "\n";
  out << "batch_size = " << t.batch_size << "\n";
  out << "record_every = " << t.record_every << "\n";
  out << "eig_record_every = " << t.eig_record_every << "\n";
  out << "seed = " << t.seed << "\n";
  out << "diag_estimator = \""
      << (t.diag_estimator == trainer::DiagEstimator::sr ? "sr" : "full") << "\"\n";
  out << "diag_n = " << t.diag_n << "\n";
  out << "\n[strategy]\n";
  out << "kind = \"" << weighting::to_string(t.strategy.strategy) << "\"\n";
  out << "n = " << t.strategy.n << "\n";
  out << "temperature = " << runio::format_double(t.strategy.temperature) << "\n";
  out << "ema = " << runio::format_double(t.strategy.ema) << "\n";
  out << "\n[net]\n";
  out << "trunk = [";
  for (std::size_t i = 0; i < t.net_spec.trunk.size(); ++i) {
    if (i) out << ", ";
    out << t.net_spec.trunk[i];
  }
  out << "]\n";
  out << "activation = \""
      << (t.net_spec.activation == net::Activation::tanh ? "tanh" : "relu") << "\"\n";
  out << "seed = " << t.net_spec.seed << "\n";
  if (!t.net_spec.heads.empty() && !t.net_spec.heads[0].hidden.empty()) {
    out << "head_hidden = [";
    for (std::size_t i = 0; i < t.net_spec.heads[0].hidden.size(); ++i) {
      if (i) out << ", ";
      out << t.net_spec.heads[0].hidden[i];
    }
    out << "]\n";
  }
  out << "\n";
  write_data(out, cfg.data);
}

} // namespace

std::string write_run_config(const RunConfig& cfg) {
  std::ostringstream out;
  write_run_body(out, cfg);
  return out.str();
}

std::string write_suite_config(const SuiteConfig& cfg) {
  std::ostringstream out;
  out << "[suite]\n";
  out << "methods = [";
  for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
    if (i) out << ", ";
    out << "\"" << cfg.methods[i] << "\"";
  }
  out << "]\n";
  out << "seeds = [";
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
    if (i) out << ", ";
    out << cfg.seeds[i];
  }
  out << "]\n\n";
  write_run_body(out, cfg.base);
  return out.str();
}

std::string write_dynamics_config(const DynamicsConfig& cfg) {
  std::ostringstream out;
  out << "[dynamics]\n";
  out << "width = " << cfg.width << "\n";
  out << "tasks = " << cfg.tasks << "\n";
  out << "samples = " << cfg.samples << "\n";
  out << "input_dim = " << cfg.input_dim << "\n";
  out << "eta = " << runio::format_double(cfg.eta) << "\n";
  out << "t_end = " << runio::format_double(cfg.t_end) << "\n";
  out << "dt = " << runio::format_double(cfg.dt) << "\n";
  out << "record_points = " << cfg.record_points << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "rel_err_max = " << runio::format_double(cfg.rel_err_max) << "\n";
  out << "rate_tol = " << runio::format_double(cfg.rate_tol) << "\n";
  out << "spearman_min = " << runio::format_double(cfg.spearman_min) << "\n";
  return out.str();
}

void set_param(RunConfig& cfg, const std::string& name, double value) {
  auto as_int = [&](const char* what, double min) {
    if (value < min || value != std::floor(value)) {
      throw ConfigError(std::string("sweep: ") + what + " needs an integer >= " +
                        runio::format_double(min) + ", got " + runio::format_double(value));
    }
    return static_cast<std::size_t>(value);
  };
  auto as_count = [&](const char* what) { return as_int(what, 1.0); };
  if (name == "strategy.n") {
    cfg.train.strategy.n = as_count("strategy.n");
  } else if (name == "strategy.temperature") {
    cfg.train.strategy.temperature = value;
  } else if (name == "strategy.ema") {
    cfg.train.strategy.ema = value;
  } else if (name == "run.lr") {
    cfg.train.lr = value;
  } else if (name == "run.iterations") {
    cfg.train.iterations = as_count("run.iterations");
  } else if (name == "run.batch_size") {
    cfg.train.batch_size = as_count("run.batch_size");
  } else if (name == "run.seed") {
    cfg.train.seed = as_int("run.seed", 0.0);
  } else if (name == "data.noise_std") {
    cfg.data.noise_std = value;
  } else if (name == "data.samples") {
    cfg.data.samples = as_count("data.samples");
  } else if (name == "net.seed") {
    cfg.train.net_spec.seed = as_int("net.seed", 0.0);
  } else {
    throw ConfigError("sweep: unknown parameter '" + name + "'");
  }
  cfg.train.strategy.validate();
  cfg.train.validate();
}

} // namespace ntklab::config
