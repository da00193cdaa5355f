#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracleforge::testing {

inline std::string fixture_path(const std::string& name)
{
    return std::string(ORACLE_FORGE_FIXTURE_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string read_fixture(const std::string& name) { return read_file(fixture_path(name)); }

struct FixtureTest {
    std::string id;
    std::string category;
    std::string source;
};

// Splits grammar_fixtures.java on its `//== <id> <category>` markers.
inline std::vector<FixtureTest> grammar_fixtures()
{
    std::istringstream in(read_fixture("grammar_fixtures.java"));
    std::vector<FixtureTest> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("//== ", 0) == 0) {
            std::istringstream header(line.substr(5));
            FixtureTest t;
            header >> t.id >> t.category;
            out.push_back(t);
        } else if (!out.empty()) {
            out.back().source += line + "\n";
        }
    }
    return out;
}

inline std::vector<std::string> read_lines(const std::string& path)
{
    std::istringstream in(read_file(path));
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) {
            out.push_back(line);
        }
    }
    return out;
}

} // namespace oracleforge::testing
