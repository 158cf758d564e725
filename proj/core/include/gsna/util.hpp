#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gsna {

inline constexpr std::string_view kVersion = "0.1.0";

// Shortest round-trip decimal representation, locale independent.
std::string format_double(double value);

// Worker count to use; 0 picks the hardware concurrency (at least 1).
unsigned effective_threads(unsigned requested);

// Runs fn(block_index, begin, end) for [0, count) split into fixed-size
// blocks. The block layout depends only on count and block_size, never on
// the worker count, so callers that keep per-block partials and reduce them
// in block order get bit-identical results for any number of threads.
void parallel_blocks(std::size_t count, std::size_t block_size, unsigned threads,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

// FNV-1a, 64 bit.
std::uint64_t fnv1a64(std::span<const std::byte> bytes) noexcept;
std::uint64_t fnv1a64(std::string_view text) noexcept;
std::uint64_t fnv1a64_file(const std::filesystem::path& path);

// mt19937_64 output is fixed by the standard; the mappings below avoid the
// unspecified std::*_distribution implementations so every draw is portable.
double uniform01(std::mt19937_64& rng);                                // [0,1)
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n);    // [0,n)

// Fisher-Yates permutation of 0..count-1 driven by uniform_below.
std::vector<std::size_t> shuffled_indices(std::size_t count, std::mt19937_64& rng);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace gsna
