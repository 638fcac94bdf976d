// SPDX-License-Identifier: Apache-2.0
#include "mimomac/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mimomac/analysis.hpp"
#include "mimomac/errors.hpp"

namespace mimomac {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool to_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

double number(std::string_view key, std::string_view value, int line) {
  double out = 0.0;
  if (!to_double(value, out)) throw ConfigError("'" + std::string(key) + "': expected a number, got '" + std::string(value) + "'", line);
  return out;
}

std::uint64_t integer(std::string_view key, std::string_view value, int line) {
  value = trim(value);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("'" + std::string(key) + "': expected a non-negative integer, got '" + std::string(value) + "'",
                      line);
  }
  return out;
}

// "<x> dB" or a bare linear value.
double level(std::string_view key, std::string_view value, int line) {
  value = trim(value);
  const std::string low = lower(value);
  if (low.size() > 2 && low.ends_with("db")) return db_to_linear(number(key, value.substr(0, value.size() - 2), line));
  if (low.size() > 3 && low.ends_with("lin")) return number(key, value.substr(0, value.size() - 3), line);
  return number(key, value, line);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CorrelationSpec correlation(std::string_view key, std::string_view value, int line) {
  value = trim(value);
  CorrelationSpec spec;
  const std::string low = lower(value);
  if (low == "identity") return spec;
  if (low.starts_with("exp")) {
    spec.kind = CorrelationSpec::Kind::exponential;
    spec.t = number(key, value.substr(3), line);
    if (!(spec.t >= 0.0 && spec.t <= 1.0)) throw ConfigError("'" + std::string(key) + "': t must lie in [0, 1]", line);
    return spec;
  }
  if (!value.empty() && value.front() == '[') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(value);
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("'" + std::string(key) + "': malformed matrix literal", line);
    }
    if (!j.is_array() || j.empty()) throw ConfigError("'" + std::string(key) + "': matrix must be a non-empty array", line);
    for (const auto& row : j) {
      if (!row.is_array() || row.size() != j.size())
        throw ConfigError("'" + std::string(key) + "': matrix must be square", line);
      for (const auto& e : row) {
        const bool real = e.is_number();
        const bool pair = e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number();
        if (!real && !pair)
          throw ConfigError("'" + std::string(key) + "': entries must be numbers or [re, im] pairs", line);
      }
    }
    spec.kind = CorrelationSpec::Kind::explicit_matrix;
    spec.matrix_text = j.dump();
    return spec;
  }
  throw ConfigError("'" + std::string(key) + "': expected identity, exp <t> or a matrix literal", line);
}

std::vector<double> grid(std::string_view key, std::string_view value, int line) {
  value = trim(value);
  std::vector<double> out;
  if (!value.empty() && value.front() == '[') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(value);
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("'" + std::string(key) + "': malformed array", line);
    }
    if (!j.is_array()) throw ConfigError("'" + std::string(key) + "': expected an array", line);
    for (const auto& e : j) {
      if (!e.is_number()) throw ConfigError("'" + std::string(key) + "': entries must be numbers", line);
      out.push_back(e.get<double>());
    }
  } else {
    try {
      out = parse_range(value);
    } catch (const DomainError& e) {
      throw ConfigError("'" + std::string(key) + "': " + e.what(), line);
    }
  }
  try {
    check_p_grid(out);
  } catch (const DomainError& e) {
    throw ConfigError("'" + std::string(key) + "': " + e.what(), line);
  }
  return out;
}

}  // namespace

HermitianMatrix CorrelationSpec::build(std::size_t n) const {
  switch (kind) {
    case Kind::identity:
      return HermitianMatrix::identity(n);
    case Kind::exponential:
      return exp_correlation(n, t);
    case Kind::explicit_matrix: {
      const auto j = nlohmann::json::parse(matrix_text);
      CMatrix m(j.size(), j.size());
      for (std::size_t r = 0; r < j.size(); ++r)
        for (std::size_t c = 0; c < j.size(); ++c) {
          const auto& e = j[r][c];
          m(r, c) = e.is_array() ? cplx(e[0].get<double>(), e[1].get<double>()) : cplx(e.get<double>(), 0.0);
        }
      return HermitianMatrix(std::move(m));
    }
  }
  return HermitianMatrix::identity(n);
}

std::string CorrelationSpec::text() const {
  switch (kind) {
    case Kind::identity:
      return "identity";
    case Kind::exponential:
      return "exp " + fmt(t);
    case Kind::explicit_matrix:
      return matrix_text;
  }
  return "identity";
}

std::vector<double> parse_range(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ':') {
      parts.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  double a = 0.0;
  double step = 0.0;
  double b = 0.0;
  if (parts.size() != 3 || !to_double(parts[0], a) || !to_double(parts[1], step) || !to_double(parts[2], b))
    throw DomainError("expected start:step:stop");
  if (!(step > 0.0) || !(b >= a)) throw DomainError("range needs step > 0 and stop >= start");
  const auto n = static_cast<std::size_t>(std::floor((b - a) / step + 0.5));
  std::vector<double> out;
  for (std::size_t i = 0; i <= n; ++i) {
    // Round to 12 decimals so that 0:0.05:1 yields 0.15, not 0.15000000000000002.
    const double v = a + static_cast<double>(i) * step;
    out.push_back(std::round(v * 1e12) / 1e12);
  }
  return out;
}

ScenarioConfig parse_config(std::string_view text) {
  ScenarioConfig cfg;
  std::set<std::string> seen;
  std::map<std::string, int> line_of;
  bool has_p = false;
  bool has_grid = false;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) {
      if (eol == text.size()) break;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value', got '" + std::string(line) + "'", line_no);
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (value.empty()) throw ConfigError("'" + key + "': missing value", line_no);
    if (!seen.insert(key).second) throw ConfigError("duplicate key '" + key + "'", line_no);
    line_of[key] = line_no;

    auto& sc = cfg.scenario;
    if (key == "n_t") {
      sc.n_t = integer(key, value, line_no);
    } else if (key == "n_r") {
      sc.n_r = integer(key, value, line_no);
    } else if (key == "snr") {
      sc.eta = level(key, value, line_no);
    } else if (key == "power_1") {
      sc.power_1 = level(key, value, line_no);
    } else if (key == "power_2") {
      sc.power_2 = level(key, value, line_no);
    } else if (key == "rx_corr") {
      cfg.rx_corr = correlation(key, value, line_no);
    } else if (key == "tx_corr_1") {
      cfg.tx_corr_1 = correlation(key, value, line_no);
    } else if (key == "tx_corr_2") {
      cfg.tx_corr_2 = correlation(key, value, line_no);
    } else if (key == "p") {
      sc.p = number(key, value, line_no);
      if (!(sc.p >= 0.0 && sc.p <= 1.0)) throw ConfigError("'p' must lie in [0, 1]", line_no);
      has_p = true;
    } else if (key == "p_grid") {
      cfg.p_grid = grid(key, value, line_no);
      has_grid = true;
    } else if (key == "game") {
      const std::string g = lower(value);
      if (g == "tpa") {
        cfg.game = Game::tpa;
      } else if (g == "spa") {
        cfg.game = Game::spa;
      } else {
        throw ConfigError("'game': expected tpa or spa, got '" + std::string(value) + "'", line_no);
      }
    } else if (key == "mc.trials") {
      cfg.mc.trials = integer(key, value, line_no);
      if (cfg.mc.trials == 0) throw ConfigError("'mc.trials' must be >= 1", line_no);
    } else if (key == "mc.seed") {
      cfg.mc.master_seed = integer(key, value, line_no);
    } else if (key == "mc.workers") {
      cfg.mc.workers = static_cast<unsigned>(integer(key, value, line_no));
    } else if (key == "solver.tolerance") {
      cfg.solver.tolerance = number(key, value, line_no);
      if (!(cfg.solver.tolerance > 0.0)) throw ConfigError("'solver.tolerance' must be positive", line_no);
    } else if (key == "solver.max_rounds") {
      cfg.solver.max_rounds = static_cast<int>(integer(key, value, line_no));
      if (cfg.solver.max_rounds < 1) throw ConfigError("'solver.max_rounds' must be >= 1", line_no);
    } else if (key == "output") {
      cfg.output = std::string(value);
    } else {
      throw ConfigError("unknown key '" + key + "'", line_no);
    }
    if (eol == text.size()) break;
  }

  if (has_p && has_grid) throw ConfigError("give either 'p' or 'p_grid', not both", line_of["p_grid"]);
  if (!has_grid) cfg.p_grid = {cfg.scenario.p};

  auto& sc = cfg.scenario;
  auto build = [&](const CorrelationSpec& spec, std::size_t n, const char* key) {
    try {
      HermitianMatrix m = spec.build(n);
      if (m.dim() != n) {
        throw ConfigError(std::string("'") + key + "': matrix dimension " + std::to_string(m.dim()) + " does not match " +
                              std::to_string(n),
                          line_of.count(key) ? line_of[key] : 0);
      }
      if (std::abs(m.trace() - static_cast<double>(n)) > 1e-9) throw DomainError("trace must equal its dimension");
      if (!is_psd(m)) throw DomainError("matrix is not positive semidefinite");
      return m;
    } catch (const DomainError& e) {
      throw ConfigError(std::string("'") + key + "': " + e.what(), line_of.count(key) ? line_of[key] : 0);
    }
  };
  if (sc.n_t == 0 || sc.n_r == 0) throw ConfigError("antenna counts must be positive", line_of.count("n_t") ? line_of["n_t"] : line_of["n_r"]);
  sc.rx_corr = build(cfg.rx_corr, sc.n_r, "rx_corr");
  sc.tx_corr_1 = build(cfg.tx_corr_1, sc.n_t, "tx_corr_1");
  sc.tx_corr_2 = build(cfg.tx_corr_2, sc.n_t, "tx_corr_2");
  try {
    sc.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string dump_config(const ScenarioConfig& cfg) {
  const auto& sc = cfg.scenario;
  std::ostringstream os;
  os << "n_t = " << sc.n_t << "\n";
  os << "n_r = " << sc.n_r << "\n";
  os << "snr = " << fmt(sc.eta) << "\n";
  os << "power_1 = " << fmt(sc.power_1) << "\n";
  os << "power_2 = " << fmt(sc.power_2) << "\n";
  os << "rx_corr = " << cfg.rx_corr.text() << "\n";
  os << "tx_corr_1 = " << cfg.tx_corr_1.text() << "\n";
  os << "tx_corr_2 = " << cfg.tx_corr_2.text() << "\n";
  if (cfg.p_grid.size() == 1 && cfg.p_grid[0] == sc.p) {
    os << "p = " << fmt(sc.p) << "\n";
  } else {
    os << "p_grid = [";
    for (std::size_t i = 0; i < cfg.p_grid.size(); ++i) os << (i ? ", " : "") << fmt(cfg.p_grid[i]);
    os << "]\n";
  }
  os << "game = " << (cfg.game == Game::tpa ? "tpa" : "spa") << "\n";
  os << "mc.trials = " << cfg.mc.trials << "\n";
  os << "mc.seed = " << cfg.mc.master_seed << "\n";
  os << "mc.workers = " << cfg.mc.workers << "\n";
  os << "solver.tolerance = " << fmt(cfg.solver.tolerance) << "\n";
  os << "solver.max_rounds = " << cfg.solver.max_rounds << "\n";
  if (!cfg.output.empty()) os << "output = " << cfg.output << "\n";
  return os.str();
}

std::string scenario_hash(const ScenarioConfig& config) {
  // Worker count and output path do not affect results.
  ScenarioConfig canonical = config;
  canonical.mc.workers = 0;
  canonical.output.clear();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump_config(canonical)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace mimomac
