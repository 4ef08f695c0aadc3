#include "bohm/parallel.hpp"

#include <cstdlib>
#include <string>

namespace bohm {

unsigned resolve_workers(int requested)
{
    if (const char* env = std::getenv("BOHM_WORKERS")) {
        try {
            const int v = std::stoi(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
            // ignore malformed values
        }
    }
    if (requested > 0) return static_cast<unsigned>(requested);
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1u;
}

}  // namespace bohm
