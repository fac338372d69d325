#include "pds/parallel.hpp"

namespace pds {

int& default_thread_count() {
    static int n = 1;
    return n;
}

}  // namespace pds
