#ifndef LEXMT_UTIL_HPP
#define LEXMT_UTIL_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lexmt {

using Tokens = std::vector<std::string>;

// UTF-8 <-> codepoint helpers. Decoding is lenient: malformed byte
// sequences come back as U+FFFD, one replacement per bad byte.
std::u32string utf8_decode(std::string_view s);
std::string utf8_encode(const std::u32string& cps);
void utf8_append(std::string& out, char32_t cp);

bool is_space_cp(char32_t cp);
// Unicode P*/S* approximation over the blocks this toolkit meets in
// practice (ASCII, Latin-1, general punctuation, currency, math,
// CJK punctuation, fullwidth forms, Indic danda, Sinhala kunddaliya).
// ZWJ/ZWNJ are format characters, never split points.
bool is_punct_or_symbol_cp(char32_t cp);

std::string ascii_lower(std::string_view s);

std::string join(const Tokens& toks, std::string_view sep = " ");
std::vector<std::string> split_tab(std::string_view line);
std::vector<std::string> split_ws(std::string_view line);
// Split on an exact multi-char delimiter; keeps empty fields.
std::vector<std::string> split_str(std::string_view line, std::string_view delim);

// Fixed-format floats so serialized artifacts are byte-stable.
std::string fmt_fixed(double v, int decimals);       // printf %.Nf
std::string fmt_sig(double v, int significant = 6);  // printf %.Ng

std::vector<std::string> read_lines(const std::filesystem::path& path);
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// FNV-1a, used for manifest/config fingerprints.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

// Runs fn(i) for i in [0, n) over at most `jobs` threads; each index
// writes only its own slot, so results are identical for any job count.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

[[noreturn]] inline void fail(const std::string& msg) { throw std::runtime_error(msg); }

}  // namespace lexmt

#endif
