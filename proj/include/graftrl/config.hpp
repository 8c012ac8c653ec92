#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace graftrl {

// Flat key=value configuration. One `key = value` pair per line, '#' starts
// a comment. Every key must appear in the documented schema; see
// Config::schema() and the README table.
class Config {
public:
    struct KeySpec {
        std::string key;
        std::string default_value;
        std::string doc;
    };

    static const std::vector<KeySpec>& schema();

    static Config from_file(const std::string& path);
    static Config from_string(const std::string& text);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;

    std::string get_string(const std::string& key) const;
    double get_double(const std::string& key) const;
    int get_int(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;
    bool get_bool(const std::string& key) const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    // Effective value: explicit setting or the schema default. Unknown keys
    // throw.
    std::string lookup(const std::string& key) const;

    std::map<std::string, std::string> values_;
};

}  // namespace graftrl
