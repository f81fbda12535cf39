#include "adia/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace adia {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::parse_string(const std::string& text) {
  Config cfg;
  cfg.text_ = text;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t comment = line.find_first_of("#;");
    std::string body = (comment == std::string::npos) ? line : line.substr(0, comment);
    std::string t = trim(body);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigParseError("unterminated section header",
                               lineno, static_cast<int>(body.find('[')) + 1);
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty()) throw ConfigParseError("empty section name", lineno, 1);
      continue;
    }
    size_t eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigParseError("expected 'key = value'", lineno,
                             static_cast<int>(body.find_first_not_of(" \t")) + 1);
    std::string key = trim(body.substr(0, eq));
    std::string val = trim(body.substr(eq + 1));
    if (key.empty()) throw ConfigParseError("empty key", lineno, 1);
    if (cfg.data_[section].count(key))
      throw ConfigParseError("duplicate key '" + key + "'", lineno, 1);
    cfg.data_[section][key] = val;
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

bool Config::has(const std::string& section, const std::string& key) const {
  auto s = data_.find(section);
  return s != data_.end() && s->second.count(key) > 0;
}

std::optional<std::string> Config::get(const std::string& section, const std::string& key) const {
  auto s = data_.find(section);
  if (s == data_.end()) return std::nullopt;
  auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

std::string Config::require(const std::string& section, const std::string& key) const {
  auto v = get(section, key);
  if (!v) throw std::runtime_error("missing required config key [" + section + "] " + key);
  return *v;
}

std::string Config::get_str(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
  auto v = get(section, key);
  return v ? *v : fallback;
}

double Config::require_num(const std::string& section, const std::string& key) const {
  std::string v = require(section, key);
  char* end = nullptr;
  double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw std::runtime_error("config key [" + section + "] " + key + " is not a number: " + v);
  return x;
}

double Config::get_num(const std::string& section, const std::string& key, double fallback) const {
  if (!has(section, key)) return fallback;
  return require_num(section, key);
}

int Config::get_int(const std::string& section, const std::string& key, int fallback) const {
  return static_cast<int>(get_num(section, key, fallback));
}

std::vector<double> Config::get_num_list(const std::string& section, const std::string& key) const {
  std::vector<double> out;
  auto v = get(section, key);
  if (!v) return out;
  std::istringstream ss(*v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::string t = trim(item);
    if (t.empty()) continue;
    char* end = nullptr;
    double x = std::strtod(t.c_str(), &end);
    if (end == t.c_str() || *end != '\0')
      throw std::runtime_error("config key [" + section + "] " + key +
                               " has a non-numeric entry: " + t);
    out.push_back(x);
  }
  return out;
}

std::map<std::string, std::string> Config::section(const std::string& name) const {
  auto s = data_.find(name);
  if (s == data_.end()) return {};
  return s->second;
}

}  // namespace adia
