#pragma once
/* ============================================================================
 * Shared test scaffolding: always-on REQUIRE that survives Release builds,
 * plus small helpers for float comparisons and progress lines.
 * ==========================================================================*/

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

// Always-on requirement: never compiled out in Release.
#define REQUIRE(cond, msg)                                                      \
    do {                                                                        \
        if (!(cond)) {                                                          \
            std::cerr << "[FAIL] " << __FILE__ << ":" << __LINE__ << " " << msg \
                      << "\n";                                                  \
            std::exit(1);                                                       \
        }                                                                       \
    } while (0)

#define REQUIRE_FINITE(x, msg) REQUIRE(std::isfinite(x), msg << " (value=" << (x) << ")")

inline void pass(const std::string& what) { std::cout << "[PASS] " << what << "\n"; }

template <typename T>
void pass(const std::string& what, const T& detail) {
    std::cout << "[PASS] " << what << " (" << detail << ")\n";
}

inline void require_close(const std::string& name, double got, double want, double abs_tol,
                          double rel_tol) {
    double diff = std::fabs(got - want);
    double scale = std::max(std::fabs(got), std::fabs(want));
    REQUIRE(diff <= abs_tol || diff <= rel_tol * scale,
            name << ": got " << got << " want " << want << " diff " << diff);
}
