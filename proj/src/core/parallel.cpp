#include "parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

namespace tlasso {

unsigned threads_from_env() {
  const char* raw = std::getenv("TLASSO_THREADS");
  if (!raw) return 1;
  unsigned value = 0;
  const char* end = raw + std::strlen(raw);
  auto [ptr, ec] = std::from_chars(raw, end, value);
  if (ec != std::errc{} || ptr != end || value == 0) return 1;
  return value;
}

}  // namespace tlasso
