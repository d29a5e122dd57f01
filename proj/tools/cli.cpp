#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

#include "macrolight/errors.hpp"

namespace macrolight::cli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

int to_int(std::string_view token, std::string_view context) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ConfigError("invalid integer '" + std::string(token) + "' in '" + std::string(context) +
                      "'");
  }
  return v;
}

double to_real(std::string_view token, std::string_view context) {
  const std::string s(token);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size() || !std::isfinite(v)) {
    throw ConfigError("invalid number '" + s + "' in '" + std::string(context) + "'");
  }
  return v;
}

std::string cell_text(const Cell& c) {
  struct Visitor {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(const std::string& v) const {
      if (v.find_first_of(",\"\n") == std::string::npos) return v;
      std::string q = "\"";
      for (char ch : v) {
        if (ch == '"') q += '"';
        q += ch;
      }
      return q + "\"";
    }
  };
  return std::visit(Visitor{}, c);
}

nlohmann::ordered_json cell_json(const Cell& c) {
  struct Visitor {
    nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
    nlohmann::ordered_json operator()(long long v) const { return v; }
    nlohmann::ordered_json operator()(double v) const {
      if (!std::isfinite(v)) return nullptr;
      return std::stod(format_double(v));
    }
    nlohmann::ordered_json operator()(const std::string& v) const { return v; }
  };
  return std::visit(Visitor{}, c);
}

Cell angle_or_empty(const std::vector<double>& angles, std::size_t i) {
  if (i < angles.size()) return angles[i];
  return std::monostate{};
}

std::vector<std::pair<std::string, std::string>> base_meta(const std::string& command,
                                                           const RunConfig& config) {
  return {{"macrolight", MACROLIGHT_VERSION}, {"command", command}, {"config", config.describe()}};
}

}  // namespace

OptimizeOptions RunConfig::optimize_options() const {
  OptimizeOptions o;
  o.grid.resolution = grid;
  o.refine = refine;
  return o;
}

void RunConfig::validate() const {
  if (input.n < 0 || input.m < 0) throw ConfigError("photon numbers must be nonnegative");
  if (input.total() > kDefaultMaxPhotons) {
    throw ConfigError("N + M exceeds the supported maximum of " +
                      std::to_string(kDefaultMaxPhotons));
  }
  if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("--r must lie in [0, 1]");
  if (grid < 8) throw ConfigError("--grid must be at least 8");
  if (jobs < 1) throw ConfigError("--jobs must be at least 1");
  (void)parsed_scheme();
}

std::string RunConfig::describe() const {
  std::ostringstream os;
  os << "n=" << input.n << " m=" << input.m << " r=" << format_double(r) << " scheme=" << scheme
     << " grid=" << grid << " refine=" << (refine ? "true" : "false");
  return os.str();
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

Format parse_format(std::string_view text) {
  if (text == "csv") return Format::Csv;
  if (text == "json") return Format::Json;
  throw ConfigError("unknown format '" + std::string(text) + "' (expected csv or json)");
}

void write_table(const Table& table, Format format, std::ostream& os) {
  if (format == Format::Json) {
    nlohmann::ordered_json doc;
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    for (const auto& [k, v] : table.meta) meta[k] = v;
    doc["meta"] = meta;
    doc["columns"] = table.columns;
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
      nlohmann::ordered_json obj = nlohmann::ordered_json::object();
      for (std::size_t i = 0; i < table.columns.size() && i < row.size(); ++i) {
        obj[table.columns[i]] = cell_json(row[i]);
      }
      doc["rows"].push_back(obj);
    }
    os << doc.dump(2) << '\n';
    return;
  }
  for (const auto& [k, v] : table.meta) os << "# " << k << ": " << v << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    os << (i ? "," : "") << table.columns[i];
  }
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
    os << '\n';
  }
}

std::vector<Outcome> parse_outcomes(std::string_view text) {
  std::vector<Outcome> out;
  for (const auto& port : split(text, ':')) {
    const auto parts = split(port, ',');
    if (parts.size() != 2) {
      throw ConfigError("invalid outcome '" + port + "' in '" + std::string(text) +
                        "' (expected x,y)");
    }
    const Outcome w{to_int(parts[0], text), to_int(parts[1], text)};
    if (w.wx < 0 || w.wy < 0) {
      throw ConfigError("invalid outcome '" + port + "': counts must be nonnegative");
    }
    out.push_back(w);
  }
  if (out.empty() || out.size() > 3) {
    throw ConfigError("outcome sequence '" + std::string(text) + "' must cover 1 to 3 ports");
  }
  return out;
}

std::vector<int> parse_int_range(std::string_view text) {
  std::vector<int> out;
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ':');
    if (parts.size() < 2 || parts.size() > 3) {
      throw ConfigError("invalid range '" + std::string(text) + "' (expected a:b or a:b:step)");
    }
    const int lo = to_int(parts[0], text);
    const int hi = to_int(parts[1], text);
    const int step = parts.size() == 3 ? to_int(parts[2], text) : 1;
    if (step < 1) throw ConfigError("invalid range '" + std::string(text) + "': step must be >= 1");
    for (int v = lo; v <= hi; v += step) out.push_back(v);
  } else {
    for (const auto& tok : split(text, ',')) out.push_back(to_int(tok, text));
  }
  if (out.empty()) throw ConfigError("range '" + std::string(text) + "' is empty");
  return out;
}

std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> out;
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) {
      throw ConfigError("invalid real range '" + std::string(text) + "' (expected a:b:step)");
    }
    const double lo = to_real(parts[0], text);
    const double hi = to_real(parts[1], text);
    const double step = to_real(parts[2], text);
    if (!(step > 0)) throw ConfigError("invalid range '" + std::string(text) + "': step must be > 0");
    for (long i = 0;; ++i) {
      const double v = lo + static_cast<double>(i) * step;
      if (v > hi + 1e-12 * std::max(1.0, std::fabs(hi))) break;
      out.push_back(v);
    }
  } else {
    for (const auto& tok : split(text, ',')) out.push_back(to_real(tok, text));
  }
  if (out.empty()) throw ConfigError("range '" + std::string(text) + "' is empty");
  return out;
}

Table run_probe(const RunConfig& config, const ProbeRequest& request) {
  config.validate();
  const Scheme scheme = config.parsed_scheme();
  const auto& w = request.outcomes;
  if (w.empty() || w.size() > 3) throw ConfigError("--outcome must list 1 to 3 ports");
  std::vector<double> thetas = request.thetas;
  thetas.resize(3, 0.0);

  std::vector<PortConfig> ports;
  for (std::size_t i = 0; i < w.size(); ++i) ports.push_back({thetas[i], config.r});
  double p = 0.0;
  switch (w.size()) {
    case 1:
      p = prob_one_port(w[0], config.input, ports[0]).value();
      break;
    case 2:
      p = prob_two_port({w[0], w[1]}, config.input, {ports[0], ports[1]}).value();
      break;
    default:
      p = prob_three_port({w[0], w[1], w[2]}, config.input, {ports[0], ports[1], ports[2]})
              .value();
      break;
  }

  std::string outcome_text;
  std::string labels;
  bool accepted = true;
  for (std::size_t i = 0; i < w.size(); ++i) {
    outcome_text += (i ? ":" : "") + std::to_string(w[i].wx) + "," + std::to_string(w[i].wy);
    if (auto label = classify(w[i], scheme)) {
      labels += to_char(*label);
    } else {
      accepted = false;
    }
  }

  Table t;
  t.command = "probe";
  t.meta = base_meta("probe", config);
  t.columns = {"n", "m", "r", "scheme", "ports", "theta1", "theta2", "theta3",
               "outcome", "probability", "events"};
  std::vector<Cell> row{static_cast<long long>(config.input.n),
                        static_cast<long long>(config.input.m),
                        config.r,
                        scheme.render(),
                        static_cast<long long>(w.size())};
  for (std::size_t i = 0; i < 3; ++i) {
    row.push_back(i < w.size() ? Cell{thetas[i]} : Cell{std::monostate{}});
  }
  row.push_back(outcome_text);
  row.push_back(p);
  row.push_back(accepted ? labels : std::string("discard"));
  t.rows.push_back(std::move(row));
  return t;
}

Table run_kmax(const RunConfig& config) {
  config.validate();
  const Scheme scheme = config.parsed_scheme();
  const WitnessReport rep = kmax(scheme, config.input, config.r, config.optimize_options());
  Table t;
  t.command = "kmax";
  t.meta = base_meta("kmax", config);
  t.columns = {"n", "m", "r", "scheme", "grid", "refined", "kmax",
               "theta1", "theta2", "theta3", "evaluations"};
  t.rows.push_back({static_cast<long long>(config.input.n), static_cast<long long>(config.input.m),
                    config.r, scheme.render(), static_cast<long long>(config.grid),
                    std::string(rep.refined ? "true" : "false"), rep.value, rep.angles[0],
                    rep.angles[1], rep.angles[2], static_cast<long long>(rep.evaluations)});
  return t;
}

Table run_nsit(const RunConfig& config, int order) {
  config.validate();
  if (order != 2 && order != 3) throw ConfigError("--order must be 2 or 3");
  const Scheme scheme = config.parsed_scheme();
  const WitnessReport rep = order == 2 ? v12(scheme, config.input, config.r, config.optimize_options())
                                       : v123(scheme, config.input, config.r, config.optimize_options());
  Table t;
  t.command = "nsit";
  t.meta = base_meta("nsit", config);
  t.columns = {"n", "m", "r", "scheme", "grid", "refined", "order", "v",
               "theta1", "theta2", "theta3", "evaluations"};
  t.rows.push_back({static_cast<long long>(config.input.n), static_cast<long long>(config.input.m),
                    config.r, scheme.render(), static_cast<long long>(config.grid),
                    std::string(rep.refined ? "true" : "false"), static_cast<long long>(order),
                    rep.value, angle_or_empty(rep.angles, 0), angle_or_empty(rep.angles, 1),
                    angle_or_empty(rep.angles, 2), static_cast<long long>(rep.evaluations)});
  return t;
}

Witness parse_witness(std::string_view text) {
  if (text == "kmax") return Witness::Kmax;
  if (text == "v12") return Witness::V12;
  if (text == "v123") return Witness::V123;
  throw ConfigError("unknown witness '" + std::string(text) + "' (expected kmax, v12 or v123)");
}

std::string witness_name(Witness w) {
  switch (w) {
    case Witness::Kmax:
      return "kmax";
    case Witness::V12:
      return "v12";
    case Witness::V123:
      return "v123";
  }
  return "kmax";
}

SweepSpec make_sweep(const RunConfig& config, const std::vector<std::string>& axes,
                     const std::string& m_rule, const std::string& witness) {
  SweepSpec spec;
  spec.n = {config.input.n};
  spec.m = {config.input.m};
  spec.r = {config.r};
  spec.schemes = {config.scheme};
  spec.witness = parse_witness(witness);
  for (const auto& axis : axes) {
    const auto eq = axis.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("invalid axis '" + axis + "' (expected key=values)");
    }
    const std::string key = trim(std::string_view(axis).substr(0, eq));
    const std::string_view values = std::string_view(axis).substr(eq + 1);
    if (key == "n") {
      spec.n = parse_int_range(values);
    } else if (key == "m") {
      spec.m = parse_int_range(values);
    } else if (key == "r") {
      spec.r = parse_real_list(values);
    } else if (key == "scheme") {
      spec.schemes.clear();
      for (const auto& s : split(values, ',')) spec.schemes.push_back(Scheme::parse(s).render());
      if (spec.schemes.empty()) throw ConfigError("scheme axis is empty");
    } else {
      throw ConfigError("unknown axis '" + key + "' (expected n, m, r or scheme)");
    }
  }
  if (!m_rule.empty()) {
    if (m_rule != "equal" && m_rule != "sixth") {
      throw ConfigError("unknown --m-rule '" + m_rule + "' (expected equal or sixth)");
    }
    spec.m_rule = m_rule;
  }
  for (double r : spec.r) {
    if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("r axis value outside [0, 1]");
  }
  for (int n : spec.n) {
    if (n < 0) throw ConfigError("n axis value must be nonnegative");
  }
  for (int m : spec.m) {
    if (m < 0) throw ConfigError("m axis value must be nonnegative");
  }
  return spec;
}

Table run_sweep(const RunConfig& config, const SweepSpec& spec) {
  config.validate();
  struct CellSpec {
    FockInput in;
    double r;
    std::string scheme;
  };
  std::vector<CellSpec> cells;
  for (int n : spec.n) {
    std::vector<int> ms = spec.m;
    if (spec.m_rule == "equal") ms = {n};
    if (spec.m_rule == "sixth") ms = {sixth_of(n)};
    for (int m : ms) {
      for (double r : spec.r) {
        for (const auto& s : spec.schemes) cells.push_back({{n, m}, r, s});
      }
    }
  }

  Table t;
  t.command = "sweep";
  t.meta = base_meta("sweep", config);
  t.meta.emplace_back("witness", witness_name(spec.witness));
  if (spec.m_rule) t.meta.emplace_back("m_rule", *spec.m_rule);
  const bool three = spec.witness != Witness::V12;
  t.columns = {"n", "m", "r", "scheme", witness_name(spec.witness), "theta1", "theta2"};
  if (three) t.columns.push_back("theta3");
  t.columns.push_back("error");

  const OptimizeOptions options = config.optimize_options();
  t.rows = parallel_map<std::vector<Cell>>(config.jobs, cells.size(), [&](std::size_t i) {
    const CellSpec& c = cells[i];
    std::vector<Cell> row{static_cast<long long>(c.in.n), static_cast<long long>(c.in.m), c.r,
                          c.scheme};
    const std::size_t n_angles = three ? 3 : 2;
    try {
      const Scheme scheme = Scheme::parse(c.scheme);
      if (c.in.total() > kDefaultMaxPhotons) throw CapacityError("N + M exceeds maximum");
      WitnessReport rep;
      switch (spec.witness) {
        case Witness::Kmax:
          rep = kmax(scheme, c.in, c.r, options);
          break;
        case Witness::V12:
          rep = v12(scheme, c.in, c.r, options);
          break;
        case Witness::V123:
          rep = v123(scheme, c.in, c.r, options);
          break;
      }
      row.push_back(rep.value);
      for (std::size_t a = 0; a < n_angles; ++a) row.push_back(angle_or_empty(rep.angles, a));
      row.push_back(std::string{});
    } catch (const std::exception& e) {
      row.push_back(std::monostate{});
      for (std::size_t a = 0; a < n_angles; ++a) row.push_back(std::monostate{});
      row.push_back(std::string(e.what()));
    }
    return row;
  });
  return t;
}

int dispatch(const RunConfig& config, const std::function<Table()>& body, std::ostream& os,
             std::ostream& err) {
  try {
    const Table table = body();
    if (config.out.empty()) {
      write_table(table, config.format, os);
    } else {
      std::ofstream file(config.out);
      if (!file) {
        err << "error: cannot open output file '" << config.out << "'\n";
        return kExitInvalidConfig;
      }
      write_table(table, config.format, file);
    }
    return kExitOk;
  } catch (const EmptyPostSelection& e) {
    err << "error: empty post-selection: " << e.what() << '\n';
    return kExitEmptyPostSelection;
  } catch (const NotEnoughPhotons& e) {
    err << "error: not enough photons: " << e.what() << '\n';
    return kExitNotEnoughPhotons;
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  }
}

}  // namespace macrolight::cli
