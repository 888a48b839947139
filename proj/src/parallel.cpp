#include "spex/parallel.hpp"

namespace spex {

namespace {

std::atomic<unsigned> g_default_threads{0};

}  // namespace

unsigned default_threads() {
    const unsigned configured = g_default_threads.load();
    if (configured > 0) return configured;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

void set_default_threads(unsigned threads) { g_default_threads.store(threads); }

}  // namespace spex
