#pragma once

// Command implementations behind the `macrolight` executable. Each command
// builds a Table; `main` only parses flags, writes the table and maps
// exceptions to exit codes.

#include <atomic>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "macrolight/cascade.hpp"
#include "macrolight/events.hpp"
#include "macrolight/witnesses.hpp"

namespace macrolight::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInvalidConfig = 2,
  kExitEmptyPostSelection = 3,
  kExitNotEnoughPhotons = 4,
};

enum class Format { Csv, Json };

struct RunConfig {
  FockInput input{1, 1};
  double r = 0.1;
  std::string scheme = "s1";
  int grid = 60;
  bool refine = true;
  std::string out;  // empty: stdout
  Format format = Format::Csv;
  int jobs = 1;

  Scheme parsed_scheme() const { return Scheme::parse(scheme); }
  OptimizeOptions optimize_options() const;
  // Throws ConfigError on out-of-range values.
  void validate() const;
  std::string describe() const;
};

using Cell = std::variant<std::monostate, long long, double, std::string>;

struct Table {
  std::string command;
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

// CSV: '#'-prefixed metadata lines, a header row, then one line per row with
// doubles printed to 12 significant digits. JSON carries the same content.
void write_table(const Table& table, Format format, std::ostream& os);
std::string format_double(double v);
Format parse_format(std::string_view text);

// "x,y[:x,y[:x,y]]"
std::vector<Outcome> parse_outcomes(std::string_view text);

// "a:b" or "a:b:step" (inclusive) or "v1,v2,...". Throws ConfigError when
// malformed or empty.
std::vector<int> parse_int_range(std::string_view text);
std::vector<double> parse_real_list(std::string_view text);

// Runs fn(i) for i in [0, count) on `jobs` threads; results come back in
// index order regardless of scheduling.
template <typename T>
std::vector<T> parallel_map(int jobs, std::size_t count, const std::function<T(std::size_t)>& fn) {
  std::vector<T> results(count);
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) results[i] = fn(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) results[i] = fn(i);
    });
  }
  for (auto& t : pool) t.join();
  return results;
}

struct ProbeRequest {
  std::vector<Outcome> outcomes;
  std::vector<double> thetas;  // one per port
};
Table run_probe(const RunConfig& config, const ProbeRequest& request);

Table run_kmax(const RunConfig& config);
Table run_nsit(const RunConfig& config, int order);

enum class Witness { Kmax, V12, V123 };
Witness parse_witness(std::string_view text);
std::string witness_name(Witness w);

struct SweepSpec {
  std::vector<int> n;
  std::vector<int> m;
  std::optional<std::string> m_rule;  // "equal" or "sixth": m follows n
  std::vector<double> r;
  std::vector<std::string> schemes;
  Witness witness = Witness::Kmax;
};
// Applies "key=spec" axis strings (n, m, r, scheme) on top of the config.
SweepSpec make_sweep(const RunConfig& config, const std::vector<std::string>& axes,
                     const std::string& m_rule, const std::string& witness);
Table run_sweep(const RunConfig& config, const SweepSpec& spec);

struct FigureRequest {
  std::string id;
  std::optional<int> n;
  std::optional<int> n_min, n_max, n_step;
  std::optional<int> m_step;
  std::optional<double> r;
  std::vector<double> r_list;
  std::vector<int> omega_list;
};
const std::vector<std::string>& figure_ids();
Table run_figure(const RunConfig& config, const FigureRequest& request);

// Runs `body`, writes its table to config.out (or `os`), and maps library
// exceptions to exit codes with a message on `err`.
int dispatch(const RunConfig& config, const std::function<Table()>& body, std::ostream& os,
             std::ostream& err);

// Full command line (without the program name). A `--config FILE` of
// `key = value` lines supplies defaults that explicit flags override.
int run_app(const std::vector<std::string>& args, std::ostream& os, std::ostream& err);

}  // namespace macrolight::cli
