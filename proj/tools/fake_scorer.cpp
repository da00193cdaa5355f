// Test double for the external scorer protocol. Reads request frames on stdin
// and answers on stdout according to the mode in argv[1]:
//   const <x>   every score is x
//   rule        exception: 0.9 when the docstring has @throws, else 0.1;
//               assertion: 0.9 for assertEquals(0, ...), else 0.2
//   reverse     like rule, but answers each burst of requests in reverse order
//   range       scores 1.5
//   error       error frames
//   garbage     non-JSON lines
//   dupe        answers every request twice
//   hang        reads but never answers
//   die         exits on the first request

#include "json.hpp"

#include <poll.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

using nlohmann::json;

namespace {

std::string mode;
double constant = 0.5;

bool read_line(std::string& buf, std::string& line, int timeout_ms)
{
    for (;;) {
        auto nl = buf.find('\n');
        if (nl != std::string::npos) {
            line = buf.substr(0, nl);
            buf.erase(0, nl + 1);
            return true;
        }
        pollfd p{0, POLLIN, 0};
        if (poll(&p, 1, timeout_ms) <= 0) {
            return false;
        }
        char chunk[65536];
        ssize_t n = read(0, chunk, sizeof chunk);
        if (n <= 0) {
            std::exit(0);
        }
        buf.append(chunk, static_cast<std::size_t>(n));
    }
}

std::string answer(const std::string& line)
{
    json req = json::parse(line, nullptr, false);
    if (!req.is_object() || !req.contains("id")) {
        return json{{"id", 0}, {"error", "malformed request"}}.dump();
    }
    auto id = req["id"];
    if (mode == "error") {
        return json{{"id", id}, {"error", "model not loaded"}}.dump();
    }
    if (mode == "garbage") {
        return "not a frame";
    }
    double score = constant;
    if (mode == "range") {
        score = 1.5;
    } else if (mode != "const") {
        if (req.value("task", "") == "exception") {
            score = req.value("docstring", "").find("@throws") != std::string::npos ? 0.9 : 0.1;
        } else {
            score = req.value("candidate", "").rfind("assertEquals(0,", 0) == 0 ? 0.9 : 0.2;
        }
    }
    return json{{"id", id}, {"score", score}}.dump();
}

void emit(const std::string& s)
{
    std::string out = s + "\n";
    if (write(1, out.data(), out.size()) < 0) {
        std::exit(1);
    }
}

} // namespace

int main(int argc, char** argv)
{
    mode = argc > 1 ? argv[1] : "rule";
    if (mode == "const" && argc > 2) {
        constant = std::atof(argv[2]);
    }
    std::string buf;
    std::string line;
    for (;;) {
        if (!read_line(buf, line, -1)) {
            continue;
        }
        if (mode == "die") {
            return 3;
        }
        if (mode == "hang") {
            continue;
        }
        if (mode == "reverse") {
            std::vector<std::string> burst{line};
            while (read_line(buf, line, 50)) {
                burst.push_back(line);
            }
            for (auto it = burst.rbegin(); it != burst.rend(); ++it) {
                emit(answer(*it));
            }
            continue;
        }
        auto a = answer(line);
        emit(a);
        if (mode == "dupe") {
            emit(a);
        }
    }
}
