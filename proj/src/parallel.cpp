#include "rcm/parallel.hpp"

#include <cstdlib>
#include <string>

namespace rcm {

int default_threads() {
    if (const char* v = std::getenv("RCM_LAB_THREADS")) {
        try {
            int n = std::stoi(v);
            if (n >= 1) return n;
        } catch (...) {
        }
    }
    return 1;
}

}  // namespace rcm
