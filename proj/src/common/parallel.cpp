#include "distwatch/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "common/text.hpp"
#include "distwatch/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace distwatch::parallel {

int max_threads() noexcept {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_max_threads(int n) noexcept {
#ifdef _OPENMP
  omp_set_num_threads(std::clamp(n, 1, std::max(1, omp_get_thread_limit())));
#else
  (void)n;
#endif
}

int parse_thread_cap(std::string_view text) {
  const auto value = text::parse_number<int>(text);
  if (!value || *value <= 0) {
    throw ConfigError("DISTWATCH_THREADS must be a positive integer, got '" + std::string(text) + "'");
  }
  return *value;
}

int configure_from_env() {
  if (const char* env = std::getenv("DISTWATCH_THREADS"); env != nullptr && *env != '\0') {
    set_max_threads(parse_thread_cap(env));
  }
  return max_threads();
}

bool openmp_enabled() noexcept {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

}  // namespace distwatch::parallel
