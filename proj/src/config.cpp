#include "tubelab/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tubelab {

std::string trim_copy(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim_copy(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

Config Config::parse(std::istream& in) {
    Config cfg;
    std::string section = "general";
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim_copy(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw std::invalid_argument("config line " + std::to_string(lineno) + ": bad section header");
            section = trim_copy(line.substr(1, line.size() - 2));
            cfg.data_[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim_copy(line.substr(0, eq));
        if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
        cfg.data_[section][key] = trim_copy(line.substr(eq + 1));
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    return parse(in);
}

bool Config::has(const std::string& section, const std::string& key) const {
    auto it = data_.find(section);
    return it != data_.end() && it->second.count(key) > 0;
}

std::optional<std::string> Config::get(const std::string& section, const std::string& key) const {
    auto it = data_.find(section);
    if (it == data_.end()) return std::nullopt;
    auto jt = it->second.find(key);
    if (jt == it->second.end()) return std::nullopt;
    return jt->second;
}

std::string Config::get_or(const std::string& section, const std::string& key, const std::string& fallback) const {
    return get(section, key).value_or(fallback);
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
    data_[section][key] = value;
}

std::vector<std::string> Config::sections() const {
    std::vector<std::string> out;
    for (const auto& kv : data_) out.push_back(kv.first);
    return out;
}

const std::map<std::string, std::string>& Config::section(const std::string& name) const {
    static const std::map<std::string, std::string> empty;
    auto it = data_.find(name);
    return it == data_.end() ? empty : it->second;
}

std::string Config::canonical() const {
    std::string out;
    for (const auto& [name, kv] : data_) {
        out += "[" + name + "]\n";
        for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
    }
    return out;
}

namespace {

class RuleParser {
public:
    RuleParser(const std::string& text, const std::map<std::string, Rational>& vars) : s_(text), vars_(vars) {}

    Rational run() {
        Rational v = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return v;
    }

private:
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("rule '" + s_ + "': " + what);
    }

    Rational expr() {
        Rational v = term();
        for (;;) {
            if (eat('+')) v += term();
            else if (eat('-')) v -= term();
            else return v;
        }
    }
    bool starts_factor() {
        skip();
        if (pos_ >= s_.size()) return false;
        const char c = s_[pos_];
        return std::isalnum(static_cast<unsigned char>(c)) || c == '(' || c == '_';
    }
    Rational term() {
        Rational v = unary();
        for (;;) {
            if (eat('*')) v *= unary();
            else if (eat('/')) {
                const Rational d = unary();
                if (d.is_zero()) fail("division by zero");
                v /= d;
            } else if (starts_factor()) v *= power();
            else return v;
        }
    }
    Rational unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return power();
    }
    Rational power() {
        Rational base = primary();
        if (eat('^')) {
            const Rational e = unary();
            if (e.den() != 1) fail("non-integer exponent");
            if (e.num() > 4096 || e.num() < -4096) fail("exponent too large");
            return pow(base, static_cast<int>(e.num()));
        }
        return base;
    }
    Rational primary() {
        skip();
        if (eat('(')) {
            Rational v = expr();
            if (!eat(')')) fail("missing ')'");
            return v;
        }
        if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            std::int64_t v = 0;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                if (v > (INT64_MAX - 9) / 10) fail("integer literal too large");
                v = v * 10 + (s_[pos_++] - '0');
            }
            return Rational(v);
        }
        if (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
            const std::size_t b = pos_;
            while (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            const std::string name = s_.substr(b, pos_ - b);
            auto it = vars_.find(name);
            if (it == vars_.end()) fail("unknown variable '" + name + "'");
            return it->second;
        }
        fail("expected a number, variable or '('");
    }

    const std::string& s_;
    const std::map<std::string, Rational>& vars_;
    std::size_t pos_ = 0;
};

}  // namespace

Rational eval_rule(const std::string& expr, const std::map<std::string, Rational>& vars) {
    return RuleParser(expr, vars).run();
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace tubelab
