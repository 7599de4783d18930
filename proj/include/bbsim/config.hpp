#ifndef BBSIM_CONFIG_HPP
#define BBSIM_CONFIG_HPP

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bbsim {

/// Flat `name = value` file, one parameter per line, `#` comments. Preserves
/// insertion order and per-key comments so emitted files are deterministic
/// and self-documenting.
class Config {
  public:
    struct Entry {
        std::string key, value, comment; // comment emitted above the key
    };

    static Config parse(std::istream& in, const std::string& origin = "<stream>") {
        Config cfg;
        std::string line;
        long line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const std::string stripped = strip(strip_comment(line));
            if (stripped.empty()) continue;
            const auto eq = stripped.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                                         ": expected 'name = value'");
            const std::string key = strip(stripped.substr(0, eq));
            const std::string value = strip(stripped.substr(eq + 1));
            if (key.empty())
                throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                                         ": empty parameter name");
            cfg.set(key, value);
        }
        return cfg;
    }

    static Config load(const std::string& path) {
        std::ifstream in(path);
        if (!in)
            throw std::runtime_error("cannot open config file '" + path + "'");
        return parse(in, path);
    }

    void set(const std::string& key, const std::string& value,
             const std::string& comment = "") {
        auto it = index_.find(key);
        if (it != index_.end()) {
            entries_[it->second].value = value;
            if (!comment.empty()) entries_[it->second].comment = comment;
            return;
        }
        index_[key] = entries_.size();
        entries_.push_back({key, value, comment});
    }

    void set_double(const std::string& key, double value,
                    const std::string& comment = "") {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.12g", value);
        set(key, buf, comment);
    }

    void set_long(const std::string& key, long value,
                  const std::string& comment = "") {
        set(key, std::to_string(value), comment);
    }

    bool has(const std::string& key) const { return index_.count(key) != 0; }

    const std::string& get_string(const std::string& key) const {
        auto it = index_.find(key);
        if (it == index_.end())
            throw std::runtime_error("missing config parameter '" + key + "'");
        return entries_[it->second].value;
    }

    double get_double(const std::string& key) const {
        const std::string& v = get_string(key);
        try {
            std::size_t pos = 0;
            const double d = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            throw std::runtime_error("config parameter '" + key +
                                     "' is not a number: '" + v + "'");
        }
    }

    long get_long(const std::string& key) const {
        const double d = get_double(key);
        return static_cast<long>(d);
    }

    double get_double_or(const std::string& key, double fallback) const {
        return has(key) ? get_double(key) : fallback;
    }

    long get_long_or(const std::string& key, long fallback) const {
        return has(key) ? get_long(key) : fallback;
    }

    std::string get_string_or(const std::string& key, const std::string& fallback) const {
        return has(key) ? get_string(key) : fallback;
    }

    std::string to_string() const {
        std::ostringstream out;
        for (const Entry& e : entries_) {
            if (!e.comment.empty()) out << "# " << e.comment << "\n";
            out << e.key << " = " << e.value << "\n";
        }
        return out.str();
    }

    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out)
            throw std::runtime_error("cannot write config file '" + path + "'");
        out << to_string();
    }

    const std::vector<Entry>& entries() const { return entries_; }

  private:
    static std::string strip_comment(const std::string& s) {
        const auto pos = s.find('#');
        return pos == std::string::npos ? s : s.substr(0, pos);
    }
    static std::string strip(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return "";
        const auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

    std::vector<Entry> entries_;
    std::map<std::string, std::size_t> index_;
};

} // namespace bbsim

#endif
