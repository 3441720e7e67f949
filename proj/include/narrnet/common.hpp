#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace narrnet {

// Errors carry the process exit code the CLI maps them to.
class Error : public std::runtime_error {
public:
    Error(int exit_code, const std::string& what)
        : std::runtime_error(what), exit_code_(exit_code) {}
    int exit_code() const noexcept { return exit_code_; }

private:
    int exit_code_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(2, what) {}
};

struct InputError : Error {
    explicit InputError(const std::string& what) : Error(3, what) {}
};

struct StageError : Error {
    explicit StageError(const std::string& what) : Error(4, what) {}
};

using Day = std::chrono::sys_days;

// Parses "YYYY-MM-DD". Returns nullopt for anything else, including invalid
// calendar dates such as 2021-02-29.
std::optional<Day> parse_day(std::string_view text);
std::string format_day(Day day);

namespace text {

// Lowercases ASCII, splits on whitespace, strips ASCII punctuation at token
// boundaries and drops tokens that end up empty. Bytes >= 0x80 are kept as-is.
std::vector<std::string> tokenize(std::string_view phrase);

// tokenize() joined with single spaces.
std::string normalize(std::string_view phrase);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// True when `needle` occurs as a contiguous run inside `haystack`.
bool contains_sequence(const std::vector<std::string>& haystack,
                       const std::vector<std::string>& needle);

// Number of (possibly overlapping) contiguous occurrences of `needle`.
std::size_t count_sequence(const std::vector<std::string>& haystack,
                           const std::vector<std::string>& needle);

}  // namespace text

namespace log {

enum class Level { quiet = 0, warn = 1, info = 2 };

void set_level(Level level);
Level level();
void warn(const std::string& message);
void info(const std::string& message);

}  // namespace log

// splitmix64 finalizer. Used to derive independent sub-seeds from one master
// seed: derive_seed(master, "louvain", run) etc.
std::uint64_t mix64(std::uint64_t x);

// mt19937_64 with hand-written draws; the std distributions are
// implementation-defined and would make seeded output library-dependent.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    // [0, 1)
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    // [0, n), n > 0
    std::size_t index(std::size_t n);
    double normal();
    template <class T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[index(i)]);
    }

private:
    std::mt19937_64 engine_;
};
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                          std::uint64_t index = 0);

}  // namespace narrnet
