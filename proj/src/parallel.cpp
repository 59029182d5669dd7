#include "climd/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <string_view>

namespace climd {

unsigned worker_count(unsigned requested) {
  unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CLIMD_THREADS")) {
    std::string_view text(env);
    unsigned cap = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), cap);
    if (ec == std::errc() && ptr == text.data() + text.size() && cap > 0) n = std::min(n, cap);
  }
  return n;
}

}  // namespace climd
