#include "dodiff/kvdoc.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>

namespace dodiff::kv {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> to_double(std::string_view s) {
  const std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  double v = 0.0;
  const auto* first = t.data();
  const auto* last = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return v;
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

void Section::set(const std::string& key, std::string value, int line) {
  entries_[key] = Entry{std::move(value), line};
}

void Section::fail(const std::string& key, const std::string& msg) const {
  const auto it = entries_.find(key);
  const int line = it != entries_.end() ? it->second.line : line_;
  throw ConfigError("[" + name_ + "] " + key + " (line " + std::to_string(line) +
                        "): " + msg,
                    line, key);
}

std::string Section::text(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) fail(key, "missing required key");
  return it->second.value;
}

std::string Section::text_or(const std::string& key,
                             const std::string& fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second.value;
}

double Section::number(const std::string& key) const {
  const auto v = to_double(text(key));
  if (!v) fail(key, "expected a number, got '" + text(key) + "'");
  return *v;
}

double Section::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

long Section::integer(const std::string& key) const {
  const double v = number(key);
  if (v != static_cast<double>(static_cast<long>(v)))
    fail(key, "expected an integer, got '" + text(key) + "'");
  return static_cast<long>(v);
}

long Section::integer_or(const std::string& key, long fallback) const {
  return has(key) ? integer(key) : fallback;
}

std::optional<double> Section::optional_number(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return number(key);
}

std::vector<double> Section::numbers(const std::string& key) const {
  std::vector<double> out;
  for (const auto& tok : split_list(text(key))) {
    const auto v = to_double(tok);
    if (!v) fail(key, "expected a number list, bad token '" + tok + "'");
    out.push_back(*v);
  }
  return out;
}

std::vector<std::vector<double>> Section::number_groups(
    const std::string& key) const {
  std::vector<std::vector<double>> out;
  const std::string all = text(key);
  std::size_t start = 0;
  while (true) {
    const auto bar = all.find('|', start);
    const std::string part = all.substr(start, bar == std::string::npos
                                                   ? std::string::npos
                                                   : bar - start);
    std::vector<double> group;
    for (const auto& tok : split_list(part)) {
      const auto v = to_double(tok);
      if (!v) fail(key, "expected numbers, bad token '" + tok + "'");
      group.push_back(*v);
    }
    if (group.empty()) fail(key, "empty coefficient group");
    out.push_back(std::move(group));
    if (bar == std::string::npos) break;
    start = bar + 1;
  }
  return out;
}

void Section::require_only(const std::vector<std::string>& allowed) const {
  for (const auto& [key, entry] : entries_) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      fail(key, "unknown key");
  }
}

Document Document::parse(std::string_view text) {
  Document doc;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  Section* current = nullptr;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(line_no) +
                              ": malformed section header",
                          line_no, "");
      const std::string name = trim(std::string_view(line).substr(1, line.size() - 2));
      if (name.empty())
        throw ConfigError("line " + std::to_string(line_no) + ": empty section name",
                          line_no, "");
      if (doc.has(name))
        throw ConfigError("line " + std::to_string(line_no) +
                              ": duplicate section [" + name + "]",
                          line_no, "");
      doc.sections_.emplace_back(name, line_no);
      current = &doc.sections_.back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value",
                        line_no, "");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": empty key", line_no, "");
    if (current == nullptr)
      throw ConfigError("line " + std::to_string(line_no) + ": key '" + key +
                            "' outside of any [section]",
                        line_no, key);
    if (current->has(key))
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" +
                            key + "'",
                        line_no, key);
    current->set(key, value, line_no);
  }
  return doc;
}

bool Document::has(const std::string& section) const {
  return std::any_of(sections_.begin(), sections_.end(),
                     [&](const Section& s) { return s.name() == section; });
}

const Section& Document::section(const std::string& name) const {
  for (const auto& s : sections_)
    if (s.name() == name) return s;
  throw ConfigError("missing section [" + name + "]", 0, "");
}

Section& Document::section_mut(const std::string& name) {
  for (auto& s : sections_)
    if (s.name() == name) return s;
  sections_.emplace_back(name, 0);
  return sections_.back();
}

std::string Document::serialize() const {
  std::ostringstream out;
  bool first = true;
  for (const auto& s : sections_) {
    if (!first) out << '\n';
    first = false;
    out << '[' << s.name() << "]\n";
    for (const auto& [key, entry] : s.entries()) out << key << " = " << entry.value << '\n';
  }
  return out.str();
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_numbers(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_number(v[i]);
  }
  return out;
}

}  // namespace dodiff::kv
