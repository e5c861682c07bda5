#pragma once

// Plain-text key-value documents with [section] headers:
//
//   # comment
//   [weight]
//   type = box
//   alpha0 = 0.5
//
// Keys keep their source line so schema errors can point at them.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dodiff::kv {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line, std::string key)
      : std::runtime_error(what), line_(line), key_(std::move(key)) {}
  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

struct Entry {
  std::string value;
  int line = 0;
};

class Section {
 public:
  Section() = default;
  Section(std::string name, int line) : name_(std::move(name)), line_(line) {}

  const std::string& name() const { return name_; }
  int line() const { return line_; }
  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  void set(const std::string& key, std::string value, int line = 0);
  const std::map<std::string, Entry>& entries() const { return entries_; }

  std::string text(const std::string& key) const;
  std::string text_or(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  long integer(const std::string& key) const;
  long integer_or(const std::string& key, long fallback) const;
  std::optional<double> optional_number(const std::string& key) const;
  /// Comma or whitespace separated numbers.
  std::vector<double> numbers(const std::string& key) const;
  /// Groups separated by '|', each a list of numbers.
  std::vector<std::vector<double>> number_groups(const std::string& key) const;

  /// Reject keys outside `allowed` (reports the first offender's line).
  void require_only(const std::vector<std::string>& allowed) const;

 private:
  [[noreturn]] void fail(const std::string& key, const std::string& msg) const;

  std::string name_;
  int line_ = 0;
  std::map<std::string, Entry> entries_;
};

class Document {
 public:
  static Document parse(std::string_view text);

  bool has(const std::string& section) const;
  const Section& section(const std::string& name) const;
  Section& section_mut(const std::string& name);
  const std::vector<Section>& sections() const { return sections_; }

  std::string serialize() const;

 private:
  std::vector<Section> sections_;
};

std::string format_number(double v);
std::string format_numbers(const std::vector<double>& v);

}  // namespace dodiff::kv
