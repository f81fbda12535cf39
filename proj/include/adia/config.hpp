#ifndef ADIA_CONFIG_HPP
#define ADIA_CONFIG_HPP

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace adia {

/// Parse failure with source position, reported as file:line:col.
struct ConfigParseError : std::runtime_error {
  ConfigParseError(const std::string& what, int line_, int col_)
      : std::runtime_error(what + " (line " + std::to_string(line_) + ", column " +
                           std::to_string(col_) + ")"),
        line(line_),
        col(col_) {}
  int line, col;
};

/// Sectioned key = value text config. '#' and ';' start comments, keys are
/// unique per section, values are raw strings trimmed of whitespace.
class Config {
 public:
  static Config parse_string(const std::string& text);
  static Config parse_file(const std::string& path);  // throws on IO failure too

  bool has(const std::string& section, const std::string& key) const;
  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  std::string require(const std::string& section, const std::string& key) const;

  std::string get_str(const std::string& section, const std::string& key,
                      const std::string& fallback) const;
  double get_num(const std::string& section, const std::string& key, double fallback) const;
  double require_num(const std::string& section, const std::string& key) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  std::vector<double> get_num_list(const std::string& section, const std::string& key) const;

  /// All keys of one section (used to forward catalog parameters).
  std::map<std::string, std::string> section(const std::string& name) const;

  const std::string& text() const { return text_; }

 private:
  std::map<std::string, std::map<std::string, std::string>> data_;
  std::string text_;
};

}  // namespace adia

#endif
