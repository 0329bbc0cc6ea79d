#pragma once
// Plain sectioned key-value configuration ("[section]" headers, "key = value"
// lines, '#' comments) and a small rational expression evaluator for rules
// such as "2^k" or "2^(-3k)".

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tubelab/rational.hpp"

namespace tubelab {

class Config {
public:
    static Config parse(std::istream& in);
    static Config load(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    std::optional<std::string> get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key, const std::string& fallback) const;
    void set(const std::string& section, const std::string& key, const std::string& value);
    std::vector<std::string> sections() const;
    const std::map<std::string, std::string>& section(const std::string& name) const;

    // Canonical text: sections and keys sorted, one "key = value" per line.
    std::string canonical() const;

private:
    std::map<std::string, std::map<std::string, std::string>> data_;
};

// Evaluates an expression over rationals with +, -, *, /, ^ (integer
// exponents), parentheses, implicit multiplication ("3k") and named variables.
Rational eval_rule(const std::string& expr, const std::map<std::string, Rational>& vars);

std::vector<std::string> split_list(const std::string& text, char sep = ',');
std::string trim_copy(const std::string& s);

// 64-bit FNV-1a hash rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

}  // namespace tubelab
