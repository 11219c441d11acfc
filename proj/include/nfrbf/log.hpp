#pragma once

#include <string>

namespace nfrbf {

/// 0 = silent, 1 = warnings (default), 2 = progress.
void set_verbosity(int level);
int verbosity();

void log_warning(const std::string& msg);
void log_info(const std::string& msg);

/// Number of warnings issued since start-up (counted even when silent).
long warning_count();

/// Thread count from NFRBF_THREADS, or 0 when unset (runtime default).
int configured_threads();
/// Applies configured_threads() to the OpenMP runtime when set.
void apply_thread_config();

}  // namespace nfrbf
