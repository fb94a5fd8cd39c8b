#include "sigma_lab/parallel.hpp"

namespace sigma_lab {

unsigned default_jobs() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

}  // namespace sigma_lab
