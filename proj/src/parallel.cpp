#include "qrg/parallel.hpp"

namespace qrg {

namespace {
int g_threads = 1;
}

int default_threads() { return g_threads; }
void set_default_threads(int threads) { g_threads = threads < 1 ? 1 : threads; }

} // namespace qrg
