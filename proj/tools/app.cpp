#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "cli.hpp"
#include "macrolight/errors.hpp"

namespace macrolight::cli {

namespace {

const std::vector<std::string> kCommands{"probe", "kmax", "nsit", "sweep", "figure"};

struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<ConfigEntry> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::vector<ConfigEntry> entries;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(number) + ": expected 'key = value'");
    }
    ConfigEntry e{strip(line.substr(0, eq)), strip(line.substr(eq + 1)), number};
    if (e.key.rfind("--", 0) == 0) e.key.erase(0, 2);
    if (e.key.empty()) throw ConfigError(path + ":" + std::to_string(number) + ": empty key");
    if (e.value.size() >= 2 && e.value.front() == '"' && e.value.back() == '"') {
      e.value = e.value.substr(1, e.value.size() - 2);
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

bool truthy(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config key '" + key + "' expects a boolean, got '" + v + "'");
}

// Turns config entries into flags the chosen subcommand understands. Keys
// that belong to some other subcommand are skipped; unknown keys are errors.
std::vector<std::string> config_flags(const std::vector<ConfigEntry>& entries, CLI::App& app,
                                      CLI::App& sub) {
  std::vector<std::string> out;
  for (const auto& e : entries) {
    std::string key = e.key;
    std::string value = e.value;
    if (key == "refine") {
      key = "no-refine";
      value = truthy(value, e.key) ? "false" : "true";
    }
    const std::string flag = "--" + key;
    const CLI::Option* opt = sub.get_option_no_throw(flag);
    if (opt == nullptr) {
      const bool known = std::any_of(kCommands.begin(), kCommands.end(), [&](const std::string& c) {
        return app.get_subcommand(c)->get_option_no_throw(flag) != nullptr;
      });
      if (!known) throw ConfigError("unknown config key '" + e.key + "' on line " + std::to_string(e.line));
      continue;
    }
    if (key == "no-refine") {
      if (truthy(value, e.key)) out.push_back(flag);
    } else {
      out.push_back(flag);
      out.push_back(value);
    }
  }
  return out;
}

void add_common(CLI::App* sub, RunConfig& c, std::string& format) {
  sub->add_option("--n", c.input.n, "photons in the x mode");
  sub->add_option("--m", c.input.m, "photons in the y mode");
  sub->add_option("--r", c.r, "beam-splitter reflectivity");
  sub->add_option("--scheme", c.scheme, "s<w>, f<wmax> or b<wmin>-<wmax>");
  sub->add_option("--grid", c.grid, "angle grid points per axis");
  sub->add_flag("--no-refine{false}", c.refine, "skip simplex refinement");
  sub->add_option("--out", c.out, "output file (default stdout)");
  sub->add_option("--format", format, "csv or json");
  sub->add_option("--jobs", c.jobs, "worker threads");
}

}  // namespace

int run_app(const std::vector<std::string>& args_in, std::ostream& os, std::ostream& err) {
  CLI::App app{"macrolight: macrorealism tests for light polarization on Fock states", "macrolight"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(MACROLIGHT_VERSION));
  std::string config_path;
  app.add_option("--config", config_path, "file of 'key = value' defaults");

  RunConfig config;
  std::string format = "csv";

  auto* probe = app.add_subcommand("probe", "probability of one outcome sequence");
  add_common(probe, config, format);
  std::vector<double> thetas(3, 0.0);
  std::string outcome;
  probe->add_option("--theta,--theta1", thetas[0], "first analyzer angle (rad)");
  probe->add_option("--theta2", thetas[1], "second analyzer angle (rad)");
  probe->add_option("--theta3", thetas[2], "third analyzer angle (rad)");
  probe->add_option("--outcome", outcome, "x,y[:x,y[:x,y]]")->required();

  auto* kmax_cmd = app.add_subcommand("kmax", "maximal Leggett-Garg K over the angles");
  add_common(kmax_cmd, config, format);

  auto* nsit = app.add_subcommand("nsit", "minimal Bhattacharyya coefficient V");
  add_common(nsit, config, format);
  int order = 2;
  nsit->add_option("--order", order, "2 for V(1)2, 3 for V(1)23");

  auto* sweep = app.add_subcommand("sweep", "witness over a lattice of inputs");
  add_common(sweep, config, format);
  std::vector<std::string> axes;
  std::string m_rule;
  std::string witness = "kmax";
  sweep->add_option("--axis", axes, "key=values with key in n, m, r, scheme")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  sweep->add_option("--m-rule", m_rule, "equal or sixth: derive m from n");
  sweep->add_option("--witness", witness, "kmax, v12 or v123");

  auto* figure = app.add_subcommand("figure", "dataset for one of the paper figures");
  {
    figure->add_option("--grid", config.grid, "angle grid points per axis");
    figure->add_flag("--no-refine{false}", config.refine, "skip simplex refinement");
    figure->add_option("--out", config.out, "output file (default stdout)");
    figure->add_option("--format", format, "csv or json");
    figure->add_option("--jobs", config.jobs, "worker threads");
  }
  FigureRequest req;
  int fig_n = 0, fig_n_min = 0, fig_n_max = 0, fig_n_step = 0, fig_m_step = 0;
  double fig_r = 0.0;
  std::string r_list, omega_list;
  figure->add_option("id", req.id, "fig2a, fig2b, fig4a, fig4b, fig5a, fig5b, fig6, fig7 or fig8")
      ->required();
  auto* o_n = figure->add_option("--n", fig_n, "photon number N (fig5a, fig5b, fig8)");
  auto* o_n_min = figure->add_option("--n-min", fig_n_min, "smallest N");
  auto* o_n_max = figure->add_option("--n-max", fig_n_max, "largest N (fig2b also caps M)");
  auto* o_n_step = figure->add_option("--n-step", fig_n_step, "N stride");
  auto* o_m_step = figure->add_option("--m-step", fig_m_step, "M stride");
  auto* o_r = figure->add_option("--r", fig_r, "reflectivity (fig5a F2 curve, fig5b, fig8)");
  figure->add_option("--r-list", r_list, "reflectivities (fig6, fig7), list or a:b:step");
  figure->add_option("--omega-list", omega_list, "Sharp omegas (fig4a, fig4b)");

  std::vector<std::string> args = args_in;
  try {
    // Pull --config out first so its entries can sit right behind the
    // subcommand name, ahead of the user's own flags.
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) {
        config_path = args[i + 1];
        args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
        break;
      }
      if (args[i].rfind("--config=", 0) == 0) {
        config_path = args[i].substr(9);
        args.erase(args.begin() + static_cast<long>(i));
        break;
      }
    }
    if (!config_path.empty()) {
      const auto entries = read_config_file(config_path);
      const auto it = std::find_first_of(args.begin(), args.end(), kCommands.begin(), kCommands.end());
      if (it != args.end()) {
        const auto flags = config_flags(entries, app, *app.get_subcommand(*it));
        args.insert(it + 1, flags.begin(), flags.end());
      }
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, os, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, os, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, os, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  }

  try {
    config.format = parse_format(format);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  }

  std::function<Table()> body;
  if (probe->parsed()) {
    body = [&] {
      ProbeRequest pr;
      pr.outcomes = parse_outcomes(outcome);
      pr.thetas = thetas;
      return run_probe(config, pr);
    };
  } else if (kmax_cmd->parsed()) {
    body = [&] { return run_kmax(config); };
  } else if (nsit->parsed()) {
    body = [&] { return run_nsit(config, order); };
  } else if (sweep->parsed()) {
    body = [&] { return run_sweep(config, make_sweep(config, axes, m_rule, witness)); };
  } else {
    body = [&] {
      if (o_n->count()) req.n = fig_n;
      if (o_n_min->count()) req.n_min = fig_n_min;
      if (o_n_max->count()) req.n_max = fig_n_max;
      if (o_n_step->count()) req.n_step = fig_n_step;
      if (o_m_step->count()) req.m_step = fig_m_step;
      if (o_r->count()) req.r = fig_r;
      if (!r_list.empty()) req.r_list = parse_real_list(r_list);
      if (!omega_list.empty()) req.omega_list = parse_int_range(omega_list);
      return run_figure(config, req);
    };
  }
  return dispatch(config, body, os, err);
}

}  // namespace macrolight::cli
