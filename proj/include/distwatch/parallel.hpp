#pragma once

#include <optional>
#include <string_view>

namespace distwatch::parallel {

/// Worker count OpenMP regions will use (1 without OpenMP).
int max_threads() noexcept;

/// Sets the worker count, clamped to [1, OpenMP thread limit].
void set_max_threads(int n) noexcept;

/// Parses a DISTWATCH_THREADS value. Throws ConfigError unless a positive integer.
int parse_thread_cap(std::string_view text);

/// Applies DISTWATCH_THREADS when set; returns the resulting worker count.
int configure_from_env();

bool openmp_enabled() noexcept;

}  // namespace distwatch::parallel
