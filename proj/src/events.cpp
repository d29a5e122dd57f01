#include "macrolight/events.hpp"

#include <algorithm>
#include <charconv>
#include <string>

#include "macrolight/errors.hpp"

namespace macrolight {

namespace {

int parse_count(std::string_view token, std::string_view whole) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ConfigError("invalid scheme '" + std::string(whole) + "': bad count '" +
                      std::string(token) + "'");
  }
  return value;
}

bool counts_ok(int c, const Scheme& s) {
  return c == 0 || (c >= s.omega_min() && c <= s.omega_max());
}

SignedLog sum_of(std::vector<SignedLog>& terms) { return signed_sum(terms); }

}  // namespace

char to_char(EventLabel label) { return label == EventLabel::X ? 'X' : 'Y'; }

Scheme Scheme::sharp(int omega) {
  if (omega < 1) throw ConfigError("sharp scheme needs omega >= 1");
  return {Kind::Sharp, omega, omega};
}

Scheme Scheme::blurred(int omega_min, int omega_max) {
  if (omega_min < 1 || omega_max < omega_min) {
    throw ConfigError("blurred scheme needs 1 <= omega_min <= omega_max");
  }
  return {Kind::Blurred, omega_min, omega_max};
}

Scheme Scheme::parse(std::string_view text) {
  if (text.size() < 2) throw ConfigError("invalid scheme '" + std::string(text) + "'");
  const char head = text.front();
  const std::string_view rest = text.substr(1);
  switch (head) {
    case 's':
    case 'S':
      return sharp(parse_count(rest, text));
    case 'f':
    case 'F':
      return fair(parse_count(rest, text));
    case 'b':
    case 'B': {
      const auto dash = rest.find('-');
      if (dash == std::string_view::npos) {
        throw ConfigError("invalid scheme '" + std::string(text) +
                          "': expected b<min>-<max>, missing '-'");
      }
      return blurred(parse_count(rest.substr(0, dash), text),
                     parse_count(rest.substr(dash + 1), text));
    }
    default:
      throw ConfigError("invalid scheme '" + std::string(text) + "': unknown kind '" +
                        std::string(1, head) + "'");
  }
}

std::string Scheme::render() const {
  if (kind_ == Kind::Sharp) return "s" + std::to_string(lo_);
  if (lo_ == 1) return "f" + std::to_string(hi_);
  return "b" + std::to_string(lo_) + "-" + std::to_string(hi_);
}

std::optional<EventLabel> classify(Outcome w, const Scheme& s) {
  if (s.kind() == Scheme::Kind::Sharp) {
    if (w.wx == s.omega_min() && w.wy == 0) return EventLabel::X;
    if (w.wy == s.omega_min() && w.wx == 0) return EventLabel::Y;
    return std::nullopt;
  }
  if (!counts_ok(w.wx, s) || !counts_ok(w.wy, s)) return std::nullopt;
  if (w.wx > w.wy) return EventLabel::X;
  if (w.wy > w.wx) return EventLabel::Y;
  return std::nullopt;
}

std::vector<std::pair<Outcome, EventLabel>> accepted_outcomes(const Scheme& s, int max_total) {
  std::vector<int> counts{0};
  for (int c = s.omega_min(); c <= std::min(s.omega_max(), max_total); ++c) counts.push_back(c);
  std::vector<std::pair<Outcome, EventLabel>> out;
  for (int wx : counts) {
    for (int wy : counts) {
      const Outcome w{wx, wy};
      if (w.total() > max_total) continue;
      if (auto label = classify(w, s)) out.emplace_back(w, *label);
    }
  }
  return out;
}

EventEvaluator::EventEvaluator(Scheme scheme, FockInput in, double r)
    : scheme_(scheme), engine_(in, r), accepted_(accepted_outcomes(scheme, in.total())) {}

EventProbs1 EventEvaluator::one(double theta) {
  std::array<std::vector<SignedLog>, 2> terms;
  const ScaledState start = engine_.initial();
  for (const auto& [w, a] : accepted_) {
    const ScaledState s1 = engine_.apply(start, theta, w);
    terms[event_index(a)].push_back(s1.squared_norm());
  }
  return {sum_of(terms[0]), sum_of(terms[1])};
}

EventProbs2 EventEvaluator::two(double theta1, double theta2) {
  const double last[] = {theta2};
  return two_row(theta1, last).front();
}

EventProbs3 EventEvaluator::three(double theta1, double theta2, double theta3) {
  const double last[] = {theta3};
  return three_row(theta1, theta2, last).front();
}

std::vector<EventProbs2> EventEvaluator::two_row(double theta1, std::span<const double> last) {
  const ScaledState start = engine_.initial();
  const int budget = engine_.input().total();
  std::vector<std::pair<ScaledState, EventLabel>> firsts;
  for (const auto& [w1, a] : accepted_) {
    ScaledState s1 = engine_.apply(start, theta1, w1);
    if (!s1.is_zero()) firsts.emplace_back(std::move(s1), a);
  }

  std::vector<EventProbs2> out;
  out.reserve(last.size());
  std::array<std::vector<SignedLog>, 4> terms;
  for (double theta2 : last) {
    for (auto& t : terms) t.clear();
    for (const auto& [s1, a] : firsts) {
      for (const auto& [w2, b] : accepted_) {
        if (s1.detected + w2.total() > budget) continue;
        terms[event_index(a, b)].push_back(engine_.apply(s1, theta2, w2).squared_norm());
      }
    }
    EventProbs2 probs;
    for (int i = 0; i < 4; ++i) probs[i] = sum_of(terms[i]);
    out.push_back(probs);
  }
  return out;
}

std::vector<EventProbs3> EventEvaluator::three_row(double theta1, double theta2,
                                                   std::span<const double> last) {
  const ScaledState start = engine_.initial();
  const int budget = engine_.input().total();
  // (state after two ports, index 2a + b)
  std::vector<std::pair<ScaledState, int>> seconds;
  for (const auto& [w1, a] : accepted_) {
    const ScaledState s1 = engine_.apply(start, theta1, w1);
    if (s1.is_zero()) continue;
    for (const auto& [w2, b] : accepted_) {
      if (s1.detected + w2.total() > budget) continue;
      ScaledState s2 = engine_.apply(s1, theta2, w2);
      if (!s2.is_zero()) seconds.emplace_back(std::move(s2), event_index(a, b));
    }
  }

  std::vector<EventProbs3> out;
  out.reserve(last.size());
  std::array<std::vector<SignedLog>, 8> terms;
  for (double theta3 : last) {
    for (auto& t : terms) t.clear();
    for (const auto& [s2, ab] : seconds) {
      for (const auto& [w3, c] : accepted_) {
        if (s2.detected + w3.total() > budget) continue;
        terms[2 * ab + event_index(c)].push_back(engine_.apply(s2, theta3, w3).squared_norm());
      }
    }
    EventProbs3 probs;
    for (int i = 0; i < 8; ++i) probs[i] = sum_of(terms[i]);
    out.push_back(probs);
  }
  return out;
}

double event_prob_one(EventLabel a, const Scheme& s, FockInput in, PortConfig port) {
  std::vector<SignedLog> terms;
  for (const auto& [w, label] : accepted_outcomes(s, in.total())) {
    if (label == a) terms.push_back(prob_one_port(w, in, port).probability);
  }
  return signed_sum(terms).to_double();
}

double event_prob_two(EventLabel a, EventLabel b, const Scheme& s, FockInput in,
                      std::array<PortConfig, 2> ports) {
  const auto accepted = accepted_outcomes(s, in.total());
  std::vector<SignedLog> terms;
  for (const auto& [w1, l1] : accepted) {
    if (l1 != a) continue;
    for (const auto& [w2, l2] : accepted) {
      if (l2 != b || w1.total() + w2.total() > in.total()) continue;
      terms.push_back(prob_two_port({w1, w2}, in, ports).probability);
    }
  }
  return signed_sum(terms).to_double();
}

double event_prob_three(EventLabel a, EventLabel b, EventLabel c, const Scheme& s, FockInput in,
                        std::array<PortConfig, 3> ports) {
  const auto accepted = accepted_outcomes(s, in.total());
  std::vector<SignedLog> terms;
  for (const auto& [w1, l1] : accepted) {
    if (l1 != a) continue;
    for (const auto& [w2, l2] : accepted) {
      if (l2 != b || w1.total() + w2.total() > in.total()) continue;
      for (const auto& [w3, l3] : accepted) {
        if (l3 != c || w1.total() + w2.total() + w3.total() > in.total()) continue;
        terms.push_back(prob_three_port({w1, w2, w3}, in, ports).probability);
      }
    }
  }
  return signed_sum(terms).to_double();
}

}  // namespace macrolight
