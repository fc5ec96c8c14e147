#include <cstdlib>
#include <string_view>

#include "beb/kernels.hpp"

namespace beb::kernels {

const Table& active() {
    static const Table* chosen = [] {
        const char* env = std::getenv("BEB_SIMD");
        const std::string_view want = env ? env : "";
        if (want == "scalar") return &scalar_table();
        if (want == "avx2" && avx2_table()) return avx2_table();
        if (want == "neon" && neon_table()) return neon_table();
        if (const Table* t = avx2_table()) return t;
        if (const Table* t = neon_table()) return t;
        return &scalar_table();
    }();
    return *chosen;
}

}  // namespace beb::kernels
