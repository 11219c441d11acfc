#include "nfrbf/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nfrbf {

namespace {
std::atomic<int> g_verbosity{1};
std::atomic<long> g_warnings{0};
std::mutex g_mutex;
}  // namespace

void set_verbosity(int level) { g_verbosity = level; }
int verbosity() { return g_verbosity; }

void log_warning(const std::string& msg) {
    ++g_warnings;
    if (g_verbosity < 1) return;
    std::lock_guard<std::mutex> lock(g_mutex);
    std::cerr << "warning: " << msg << '\n';
}

void log_info(const std::string& msg) {
    if (g_verbosity < 2) return;
    std::lock_guard<std::mutex> lock(g_mutex);
    std::cerr << msg << '\n';
}

long warning_count() { return g_warnings; }

int configured_threads() {
    const char* env = std::getenv("NFRBF_THREADS");
    if (!env || !*env) return 0;
    const int n = std::atoi(env);
    return n > 0 ? n : 0;
}

void apply_thread_config() {
#ifdef _OPENMP
    if (const int n = configured_threads(); n > 0) omp_set_num_threads(n);
#endif
}

}  // namespace nfrbf
