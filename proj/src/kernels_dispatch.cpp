#include "nids/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <string>

#include "nids/common.hpp"

namespace nids::kern {

#if defined(NIDS_HAVE_AVX2_TU)
const Backend* avx2_backend_impl(); // defined in kernels_avx2.cpp
#endif

const Backend* avx2_backend() {
#if defined(NIDS_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
    if (__builtin_cpu_supports("avx2")) return avx2_backend_impl();
#endif
    return nullptr;
}

namespace {

std::atomic<const Backend*> g_active{nullptr};

const Backend* select_default() {
    if (const char* env = std::getenv("NIDS_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return &scalar_backend();
        if (std::strcmp(env, "avx2") == 0) {
            if (const Backend* b = avx2_backend()) return b;
            throw Error("NIDS_KERNELS=avx2 requested but AVX2 is unavailable");
        }
        throw Error(std::string("unknown NIDS_KERNELS backend: ") + env);
    }
    if (const Backend* b = avx2_backend()) return b;
    return &scalar_backend();
}

} // namespace

const Backend& active() {
    const Backend* b = g_active.load(std::memory_order_acquire);
    if (!b) {
        b = select_default();
        g_active.store(b, std::memory_order_release);
    }
    return *b;
}

void force_backend(const char* name) {
    if (std::strcmp(name, "scalar") == 0) {
        g_active.store(&scalar_backend(), std::memory_order_release);
        return;
    }
    if (std::strcmp(name, "avx2") == 0) {
        if (const Backend* b = avx2_backend()) {
            g_active.store(b, std::memory_order_release);
            return;
        }
        throw Error("AVX2 backend unavailable on this CPU/build");
    }
    throw Error(std::string("unknown kernel backend: ") + name);
}

} // namespace nids::kern
