#include "fidbench/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <variant>

#include "fidbench/error.hpp"

namespace fidbench {

namespace {

// Minimal TOML reader: [table] headers, bare keys, and basic-string, integer,
// float and boolean values. Enough for the flat experiment config.
using TomlValue = std::variant<std::int64_t, double, bool, std::string>;

struct TomlEntry {
  TomlValue value;
  int line;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_bare_key(std::string_view key) {
  if (key.empty()) return false;
  for (char c : key) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  }
  return true;
}

// Strips a trailing comment that is not inside a string.
std::string_view strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (in_string && c == '\\') {
      ++i;
    } else if (c == '"') {
      in_string = !in_string;
    } else if (c == '#' && !in_string) {
      return line.substr(0, i);
    }
  }
  return line;
}

std::optional<TomlValue> parse_value(std::string_view raw) {
  if (raw.empty()) return std::nullopt;
  if (raw == "true") return TomlValue(true);
  if (raw == "false") return TomlValue(false);
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"') return std::nullopt;
    std::string out;
    for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
      char c = raw[i];
      if (c == '"') return std::nullopt;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (++i + 1 > raw.size() - 1) return std::nullopt;
      switch (raw[i]) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        default: return std::nullopt;
      }
    }
    return TomlValue(std::move(out));
  }

  std::string digits;
  for (char c : raw) {
    if (c != '_') digits.push_back(c);
  }
  std::string_view num = digits;
  if (!num.empty() && num.front() == '+') num.remove_prefix(1);
  bool looks_float = num.find_first_of(".eE") != std::string_view::npos;
  if (!looks_float) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
    if (ec == std::errc() && ptr == num.data() + num.size()) return TomlValue(v);
    return std::nullopt;
  }
  // strtod under the "C" locale; from_chars for double is missing in older libstdc++.
  std::string owned(num);
  std::istringstream is(owned);
  is.imbue(std::locale::classic());
  double v = 0.0;
  is >> v;
  if (!is.fail() && is.eof()) return TomlValue(v);
  return std::nullopt;
}

std::map<std::string, TomlEntry> parse_toml(std::string_view text, const std::string& source) {
  std::map<std::string, TomlEntry> entries;
  std::string table;
  int line_no = 0;
  std::size_t pos = 0;
  auto fail = [&](const std::string& msg) -> FormatError {
    return FormatError(source + ":" + std::to_string(line_no) + ": " + msg);
  };
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = trim(strip_comment(text.substr(pos, end - pos)));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw fail("malformed table header");
      std::string_view name = trim(line.substr(1, line.size() - 2));
      if (!is_bare_key(name)) throw fail("invalid table name");
      table = std::string(name);
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw fail("expected key = value");
    std::string_view key = trim(line.substr(0, eq));
    if (!is_bare_key(key)) throw fail("invalid key \"" + std::string(key) + "\"");
    auto value = parse_value(trim(line.substr(eq + 1)));
    if (!value) throw fail("cannot parse value for \"" + std::string(key) + "\"");
    std::string full = table.empty() ? std::string(key) : table + "." + std::string(key);
    if (entries.count(full)) throw fail("duplicate key \"" + full + "\"");
    entries.emplace(full, TomlEntry{std::move(*value), line_no});
  }
  return entries;
}

}  // namespace

std::vector<ConfigIssue> check_config(const ExperimentConfig& cfg) {
  std::vector<ConfigIssue> issues;
  if (cfg.dimension < 2) issues.push_back({"dimension", "must be >= 2"});
  if (cfg.n_particles < 10) issues.push_back({"n_particles", "must be >= 10"});
  if (cfg.n_shots < 0) issues.push_back({"n_shots", "must be >= 0"});
  if (cfg.n_trials < 1) issues.push_back({"n_trials", "must be >= 1"});
  if (cfg.report_every < 0) issues.push_back({"report_every", "must be >= 1"});
  if (!(cfg.resample.a > 0.0 && cfg.resample.a <= 1.0)) {
    issues.push_back({"resample.a", "must satisfy 0 < a <= 1"});
  }
  if (!(cfg.resample.epsilon >= 0.0 && cfg.resample.epsilon < 1.0)) {
    issues.push_back({"resample.epsilon", "must satisfy 0 <= epsilon < 1"});
  }
  if (!(cfg.resample.ess_fraction >= 0.0 && cfg.resample.ess_fraction <= 1.0)) {
    issues.push_back({"resample.ess_fraction", "must lie in [0, 1]"});
  }
  return issues;
}

void require_valid(const ExperimentConfig& cfg, const std::string& origin) {
  auto issues = check_config(cfg);
  if (issues.empty()) return;
  std::string msg;
  for (const auto& issue : issues) {
    if (!msg.empty()) msg += "\n";
    msg += origin + ": " + issue.field + " " + issue.message;
  }
  throw FormatError(msg);
}

ExperimentConfig parse_config_toml(std::string_view text, const std::string& source) {
  auto entries = parse_toml(text, source);
  ExperimentConfig cfg;

  for (const auto& [key, entry] : entries) {
    auto fail = [&](const std::string& msg) {
      return FormatError(source + ":" + std::to_string(entry.line) + ": " + key + " " + msg);
    };
    auto as_int = [&]() -> std::int64_t {
      if (auto* v = std::get_if<std::int64_t>(&entry.value)) return *v;
      throw fail("must be an integer");
    };
    auto as_real = [&]() -> double {
      if (auto* v = std::get_if<double>(&entry.value)) return *v;
      if (auto* v = std::get_if<std::int64_t>(&entry.value)) return static_cast<double>(*v);
      throw fail("must be a number");
    };
    auto as_string = [&]() -> const std::string& {
      if (auto* v = std::get_if<std::string>(&entry.value)) return *v;
      throw fail("must be a string");
    };
    auto as_small_int = [&]() -> int {
      std::int64_t v = as_int();
      if (v < -(1LL << 30) || v > (1LL << 30)) throw fail("is out of range");
      return static_cast<int>(v);
    };

    if (key == "dimension") {
      cfg.dimension = as_small_int();
    } else if (key == "prior") {
      auto p = parse_prior(as_string());
      if (!p) throw fail("must be one of haar_pure, hilbert_schmidt, bures, arcsine");
      cfg.prior = *p;
    } else if (key == "n_particles") {
      cfg.n_particles = as_small_int();
    } else if (key == "n_shots") {
      cfg.n_shots = as_small_int();
    } else if (key == "n_trials") {
      cfg.n_trials = as_small_int();
    } else if (key == "measurement") {
      auto m = parse_measurement(as_string());
      if (!m) throw fail("must be one of covariant_rank1, haar_basis");
      cfg.measurement = *m;
    } else if (key == "seed") {
      std::int64_t v = as_int();
      if (v < 0) throw fail("must be non-negative");
      cfg.seed = static_cast<std::uint64_t>(v);
    } else if (key == "report_every") {
      cfg.report_every = as_small_int();
      if (cfg.report_every < 1) throw fail("must be >= 1");
    } else if (key == "resample.a") {
      cfg.resample.a = as_real();
    } else if (key == "resample.ess_fraction") {
      cfg.resample.ess_fraction = as_real();
    } else if (key == "resample.epsilon") {
      cfg.resample.epsilon = as_real();
    } else if (key == "resample.pure_preserving") {
      auto* v = std::get_if<bool>(&entry.value);
      if (!v) throw fail("must be a boolean");
      cfg.resample.pure_preserving = *v;
    } else {
      throw fail("is not a recognized setting");
    }
  }

  for (const auto& issue : check_config(cfg)) {
    auto it = entries.find(issue.field);
    std::string where = it == entries.end() ? source : source + ":" + std::to_string(it->second.line);
    throw FormatError(where + ": " + issue.field + " " + issue.message);
  }
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_toml(buf.str(), path);
}

std::string config_to_toml(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(17);
  os << "dimension = " << cfg.dimension << "\n"
     << "prior = \"" << to_string(cfg.prior) << "\"\n"
     << "n_particles = " << cfg.n_particles << "\n"
     << "n_shots = " << cfg.n_shots << "\n"
     << "n_trials = " << cfg.n_trials << "\n"
     << "measurement = \"" << to_string(cfg.measurement) << "\"\n"
     << "seed = " << cfg.seed << "\n";
  if (cfg.report_every > 0) os << "report_every = " << cfg.report_every << "\n";
  auto real = [&](double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);  // shortest round-trip form
    std::string s(buf, res.ptr);
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
  };
  os << "\n[resample]\n"
     << "a = " << real(cfg.resample.a) << "\n"
     << "ess_fraction = " << real(cfg.resample.ess_fraction) << "\n"
     << "epsilon = " << real(cfg.resample.epsilon) << "\n"
     << "pure_preserving = " << (cfg.resample.pure_preserving ? "true" : "false") << "\n";
  return os.str();
}

}  // namespace fidbench
