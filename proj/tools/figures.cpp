#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cli.hpp"
#include "macrolight/errors.hpp"

namespace macrolight::cli {

namespace {

std::vector<int> span_of(int lo, int hi, int step) {
  if (step < 1) throw ConfigError("figure step must be >= 1");
  if (lo < 0) throw ConfigError("figure range must start at a nonnegative value");
  std::vector<int> out;
  for (int v = lo; v <= hi; v += step) out.push_back(v);
  if (out.empty()) throw ConfigError("figure range is empty");
  return out;
}

std::string join(const std::vector<int>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << format_double(v[i]);
  return os.str();
}

std::string range_text(const std::vector<int>& v) {
  if (v.size() < 2) return join(v);
  return std::to_string(v.front()) + ":" + std::to_string(v.back()) + ":" +
         std::to_string(v[1] - v[0]);
}

void stamp(Table& t, const std::string& id, const std::string& params) {
  t.command = "figure";
  for (auto& [k, v] : t.meta) {
    if (k == "command") v = "figure " + id;
  }
  t.meta.emplace_back("figure", id);
  t.meta.emplace_back("parameters", params);
}

Table fig2a(const RunConfig& config) {
  const Scheme s = Scheme::sharp(1);
  const FockInput in{1, 1};
  const AngleGrid grid{config.grid};
  grid.validate();
  const double theta1 = std::numbers::pi / 2;
  // r only rescales Sharp probabilities, so any value in (0, 1) gives the same K.
  const double r = 0.5;
  EventEvaluator events(s, in, r);
  const auto angles = grid.angles();

  Table t;
  t.meta = {{"macrolight", MACROLIGHT_VERSION}, {"command", "figure"}, {"config", config.describe()}};
  t.columns = {"n", "m", "r", "scheme", "theta1", "theta2", "theta3", "k"};
  for (double a2 : angles) {
    for (double a3 : angles) {
      t.rows.push_back({1LL, 1LL, r, s.render(), theta1, a2, a3, lgi_k(events, theta1, a2, a3)});
    }
  }
  stamp(t, "fig2a", "theta1=pi/2 theta2,theta3 over " + std::to_string(grid.resolution) +
                        "-point grid on [0,pi)");
  return t;
}

Table fig_sweep(const RunConfig& config, const std::string& id, SweepSpec spec,
                const std::string& params) {
  Table t = run_sweep(config, spec);
  stamp(t, id, params);
  return t;
}

Table fig_nsit(const RunConfig& config, const std::string& id, const Scheme& s, int n,
               const std::vector<int>& ms, double r) {
  const OptimizeOptions options = config.optimize_options();
  Table t;
  t.meta = {{"macrolight", MACROLIGHT_VERSION}, {"command", "figure"}, {"config", config.describe()}};
  t.columns = {"n", "m", "r", "scheme", "v12", "v12_theta1", "v12_theta2",
               "v123", "v123_theta1", "v123_theta2", "v123_theta3", "error"};
  t.rows = parallel_map<std::vector<Cell>>(config.jobs, ms.size(), [&](std::size_t i) {
    const FockInput in{n, ms[i]};
    std::vector<Cell> row{static_cast<long long>(n), static_cast<long long>(ms[i]), r, s.render()};
    std::string error;
    auto add = [&](auto&& compute, std::size_t n_angles) {
      try {
        if (in.total() > kDefaultMaxPhotons) throw CapacityError("N + M exceeds maximum");
        const WitnessReport rep = compute();
        row.push_back(rep.value);
        for (std::size_t a = 0; a < n_angles; ++a) row.push_back(rep.angles.at(a));
      } catch (const std::exception& e) {
        for (std::size_t a = 0; a <= n_angles; ++a) row.push_back(std::monostate{});
        if (error.empty()) error = e.what();
      }
    };
    add([&] { return v12(s, in, r, options); }, 2);
    add([&] { return v123(s, in, r, options); }, 3);
    row.push_back(error);
    return row;
  });
  std::ostringstream params;
  params << "n=" << n << " m=" << range_text(ms) << " r=" << format_double(r)
         << " scheme=" << s.render();
  stamp(t, id, params.str());
  return t;
}

Table fig6(const RunConfig& config, const FigureRequest& req) {
  const std::vector<double> rs =
      req.r_list.empty() ? std::vector<double>{0.02, 0.05, 0.1, 0.2, 0.4} : req.r_list;
  const int limit = req.n_max.value_or(16000);
  const int start = req.n_min.value_or(6);
  if (start < 1 || limit < start) throw ConfigError("fig6 needs 1 <= n-min <= n-max");
  if (start + sixth_of(limit) > kDefaultMaxPhotons || limit + sixth_of(limit) > kDefaultMaxPhotons) {
    throw ConfigError("fig6 n-max exceeds the supported photon number");
  }
  for (double r : rs) {
    if (!(r > 0.0 && r < 1.0)) throw ConfigError("fig6 r values must lie in (0, 1)");
  }
  const std::vector<Scheme> schemes{Scheme::blurred(3, 4), Scheme::blurred(2, 4)};
  struct Job {
    double r;
    Scheme s;
  };
  std::vector<Job> jobs;
  for (double r : rs) {
    for (const auto& s : schemes) jobs.push_back({r, s});
  }
  const OptimizeOptions options = config.optimize_options();

  Table t;
  t.meta = {{"macrolight", MACROLIGHT_VERSION}, {"command", "figure"}, {"config", config.describe()}};
  t.columns = {"r", "scheme", "n_c", "m_c", "last_violating", "evaluated", "error"};
  t.rows = parallel_map<std::vector<Cell>>(config.jobs, jobs.size(), [&](std::size_t i) {
    const Job& j = jobs[i];
    std::vector<Cell> row{j.r, j.s.render()};
    try {
      const CriticalSearch cs = find_critical_n(j.s, j.r, options, start, limit);
      if (cs.n_c) {
        row.push_back(static_cast<long long>(*cs.n_c));
        row.push_back(static_cast<long long>(sixth_of(*cs.n_c)));
      } else {
        row.push_back(std::monostate{});
        row.push_back(std::monostate{});
      }
      row.push_back(cs.last_violating ? Cell{static_cast<long long>(*cs.last_violating)}
                                      : Cell{std::monostate{}});
      row.push_back(static_cast<long long>(cs.samples.size()));
      row.push_back(std::string(cs.n_c ? "" : "no crossing below n-max"));
    } catch (const std::exception& e) {
      for (int k = 0; k < 4; ++k) row.push_back(std::monostate{});
      row.push_back(std::string(e.what()));
    }
    return row;
  });
  stamp(t, "fig6", "m=round(n/6) r=" + join(rs) + " n-min=" + std::to_string(start) +
                       " n-max=" + std::to_string(limit) + " growth=1.5");
  return t;
}

}  // namespace

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"fig2a", "fig2b", "fig4a", "fig4b", "fig5a",
                                            "fig5b", "fig6",  "fig7",  "fig8"};
  return ids;
}

Table run_figure(const RunConfig& config, const FigureRequest& req) {
  const auto& ids = figure_ids();
  if (std::find(ids.begin(), ids.end(), req.id) == ids.end()) {
    std::string known;
    for (const auto& id : ids) known += (known.empty() ? "" : ", ") + id;
    throw ConfigError("unknown figure '" + req.id + "' (expected one of " + known + ")");
  }
  if (config.grid < 8) throw ConfigError("--grid must be at least 8");
  if (config.jobs < 1) throw ConfigError("--jobs must be at least 1");
  if (req.r && !(*req.r > 0.0 && *req.r < 1.0)) throw ConfigError("--r must lie in (0, 1)");

  if (req.id == "fig2a") return fig2a(config);

  SweepSpec spec;
  spec.r = {0.1};
  if (req.id == "fig2b") {
    spec.n = span_of(req.n_min.value_or(1), req.n_max.value_or(100), req.n_step.value_or(1));
    spec.m = span_of(0, req.n_max.value_or(100), req.m_step.value_or(1));
    spec.schemes = {"s2"};
    return fig_sweep(config, "fig2b", spec,
                     "n=" + range_text(spec.n) + " m=" + range_text(spec.m) + " scheme=s2");
  }
  if (req.id == "fig4a" || req.id == "fig4b") {
    const bool sixth = req.id == "fig4a";
    spec.n = span_of(req.n_min.value_or(sixth ? 6 : 1), req.n_max.value_or(sixth ? 600 : 30),
                     req.n_step.value_or(sixth ? 6 : 1));
    spec.m_rule = sixth ? "sixth" : "equal";
    spec.m = {0};
    const std::vector<int> omegas = req.omega_list.empty() ? std::vector<int>{2, 3, 4} : req.omega_list;
    for (int w : omegas) spec.schemes.push_back(Scheme::sharp(w).render());
    return fig_sweep(config, req.id, spec,
                     "n=" + range_text(spec.n) + (sixth ? " m=round(n/6)" : " m=n") +
                         " omega=" + join(omegas));
  }
  const int n_big = req.n.value_or(5000);
  if (n_big < 0 || n_big > kDefaultMaxPhotons) throw ConfigError("--n out of range");
  const std::vector<int> ms = span_of(0, n_big, req.m_step.value_or(50));
  if (n_big + ms.back() > kDefaultMaxPhotons) {
    throw ConfigError("N + M exceeds the supported maximum of " + std::to_string(kDefaultMaxPhotons));
  }
  if (req.id == "fig5a") {
    const double r = req.r.value_or(0.1);
    spec.n = {n_big};
    spec.m = ms;
    spec.r = {r};
    spec.schemes = {"s2", "f2"};
    return fig_sweep(config, "fig5a", spec,
                     "n=" + std::to_string(n_big) + " m=" + range_text(ms) +
                         " schemes=s2,f2 r=" + format_double(r));
  }
  if (req.id == "fig5b") return fig_nsit(config, "fig5b", Scheme::sharp(2), n_big, ms, req.r.value_or(0.1));
  if (req.id == "fig8") return fig_nsit(config, "fig8", Scheme::fair(2), n_big, ms, req.r.value_or(0.01));
  if (req.id == "fig6") return fig6(config, req);

  // fig7
  spec.n = span_of(req.n_min.value_or(12), req.n_max.value_or(300), req.n_step.value_or(12));
  spec.m_rule = "sixth";
  spec.m = {0};
  spec.r = req.r_list.empty() ? parse_real_list("0.1:0.9:0.1") : req.r_list;
  for (double r : spec.r) {
    if (!(r > 0.0 && r < 1.0)) throw ConfigError("fig7 r values must lie in (0, 1)");
  }
  spec.schemes = {"f4"};
  Table t = fig_sweep(config, "fig7", spec,
                      "n=" + range_text(spec.n) + " m=round(n/6) r=" + join(spec.r) + " scheme=f4");
  t.columns.push_back("violation");
  for (auto& row : t.rows) {
    const Cell& k = row[4];
    if (const double* v = std::get_if<double>(&k)) {
      row.push_back(static_cast<long long>(*v > 1.0 + kViolationMargin ? 1 : 0));
    } else {
      row.push_back(std::monostate{});
    }
  }
  return t;
}

}  // namespace macrolight::cli
