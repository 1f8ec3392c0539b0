#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace ctxemb {

using WordId = std::uint32_t;

// Bad input data: malformed files, empty vocabularies, undefined metrics.
// The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A malformed line in a text file. `line()` is 1-based.
class FormatError : public DataError {
public:
    FormatError(std::string path, std::size_t line, const std::string& what)
        : DataError(path + ":line " + std::to_string(line) + ": " + what),
          path_(std::move(path)), line_(line) {}

    const std::string& path() const { return path_; }
    std::size_t line() const { return line_; }

private:
    std::string path_;
    std::size_t line_;
};

// A metric whose value is mathematically undefined for the given input
// (constant ranking, single-class labels).
class UndefinedMetric : public DataError {
public:
    using DataError::DataError;
};

// Internal consistency violated (mismatched vocabularies, corrupt pairing).
// The CLI maps this to exit code 3.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Runs fn(begin, end, shard) over `shards` contiguous slices of [0, n).
// Slice boundaries depend only on (n, shards). Exceptions from workers are
// rethrown on the calling thread; the lowest shard's wins.
template <typename Fn>
void parallel_shards(std::size_t n, std::size_t shards, Fn&& fn) {
    shards = std::max<std::size_t>(1, std::min(shards, std::max<std::size_t>(n, 1)));
    if (shards == 1) {
        fn(std::size_t{0}, n, std::size_t{0});
        return;
    }
    std::vector<std::exception_ptr> errors(shards);
    std::vector<std::thread> workers;
    workers.reserve(shards);
    for (std::size_t s = 0; s < shards; ++s) {
        std::size_t begin = n * s / shards;
        std::size_t end = n * (s + 1) / shards;
        workers.emplace_back([&, begin, end, s] {
            try {
                fn(begin, end, s);
            } catch (...) {
                errors[s] = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

// Calls fn(i) for every i in [0, n) across `threads` workers.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
    parallel_shards(n, threads, [&](std::size_t begin, std::size_t end, std::size_t) {
        for (std::size_t i = begin; i < end; ++i) fn(i);
    });
}

// Shortest decimal form that parses back to the same double.
std::string format_exact(double value);

// Fixed-point with the given number of decimals.
std::string format_fixed(double value, int decimals);

// Parses a whole string as a double / unsigned integer; false on any junk.
bool parse_double(std::string_view text, double& out);
bool parse_uint(std::string_view text, std::uint64_t& out);

// Splits on a single character, keeping empty fields.
std::vector<std::string_view> split(std::string_view text, char sep);

// Splits on runs of ASCII whitespace, dropping empty fields.
std::vector<std::string_view> split_ws(std::string_view text);

}  // namespace ctxemb
