#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace csent {

std::string base64_encode(std::string_view bytes);
std::string base64_decode(std::string_view text); // throws FormatError on bad input

// Number of worker threads: CSENT_THREADS when set and positive, otherwise
// the number of logical cores.
int worker_count();

// Run fn(i) for i in [0, n) on up to worker_count() threads. Exceptions from
// workers are rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

std::vector<std::string> split_lines(std::string_view text);

// Replace bytes that are not valid UTF-8 with U+FFFD so text can travel
// through JSON.
std::string sanitize_utf8(std::string_view bytes);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

} // namespace csent
