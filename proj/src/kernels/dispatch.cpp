#include <atomic>
#include <cstdlib>
#include <string>

#include "holoseq/kernels.hpp"

namespace holoseq::kernels {

#if defined(HOLOSEQ_HAVE_AVX2)
namespace avx2 {
const KernelTable& table();
}
#endif
#if defined(HOLOSEQ_HAVE_NEON)
namespace neon {
const KernelTable& table();
}
#endif

const KernelTable* avx2_table() {
#if defined(HOLOSEQ_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return ok ? &avx2::table() : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable* neon_table() {
#if defined(HOLOSEQ_HAVE_NEON)
    return &neon::table();
#else
    return nullptr;
#endif
}

namespace {

const KernelTable* best() {
    if (const char* env = std::getenv("HOLOSEQ_SIMD"); env && std::string(env) == "scalar") {
        return &scalar_table();
    }
    if (const KernelTable* t = avx2_table()) return t;
    if (const KernelTable* t = neon_table()) return t;
    return &scalar_table();
}

std::atomic<const KernelTable*>& current() {
    static std::atomic<const KernelTable*> ptr{best()};
    return ptr;
}

}  // namespace

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

bool select(std::string_view name) {
    const KernelTable* t = nullptr;
    if (name == "auto") {
        t = best();
    } else if (name == "scalar") {
        t = &scalar_table();
    } else if (name == "avx2") {
        t = avx2_table();
    } else if (name == "neon") {
        t = neon_table();
    }
    if (!t) return false;
    current().store(t, std::memory_order_relaxed);
    return true;
}

}  // namespace holoseq::kernels
